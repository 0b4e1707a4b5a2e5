use autoexp::automata::{block_decompose_sum, builtin, find_synchronizing_word, sync_failure_count, Dfao};
use autoexp::congruence::{
    brute_force_count, count_solutions, cyclic_convolve, solution_table, value_histogram, PoleMode, ValueHistogram,
};
use autoexp::expsums::{
    complete_sum, correlation_u, difference_agreement, difference_sum, difference_sum_pointwise, progression_sum,
    IntervalProgression,
};
use autoexp::modring::{is_well_defined, mod_inverse, EqEvaluator, FactoredModulus, IntPoly, RationalFunction};
use autoexp::vandercorput::{
    carry_violation_count, decompose_weyl, vdc_inequality_check, vdc_inequality_check_scalar, ScalarTransducer,
    WeylConfig,
};
use autoexp::{Budget, Phase, Scalar};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use proptest::collection::vec;
use proptest::prelude::*;

fn arb_dfao() -> impl Strategy<Value = Dfao> {
    (2u32..=4, 1usize..=5)
        .prop_flat_map(|(k, s)| (Just(k), vec(vec(0..s, k as usize), s), vec(-3i64..=3, s)))
        .prop_map(|(k, mut t, out)| {
            t[0][0] = 0;
            Dfao::new(k, t, 0, out.into_iter().map(Scalar::integer).collect()).unwrap()
        })
}

fn arb_indicator() -> impl Strategy<Value = Dfao> {
    (arb_dfao(), vec(any::<bool>(), 5)).prop_map(|(d, bits)| {
        let outs = (0..d.num_states()).map(|q| Scalar::integer(bits[q] as i64)).collect();
        d.with_outputs(outs).unwrap()
    })
}

fn nonzero_poly(max_len: usize, c: i64) -> impl Strategy<Value = Vec<i64>> {
    vec(-c..=c, 1..=max_len).prop_filter("nonzero", |v| v.iter().any(|&x| x != 0))
}

fn arb_rational() -> impl Strategy<Value = RationalFunction> {
    (nonzero_poly(4, 6), nonzero_poly(3, 4))
        .prop_map(|(p, q)| RationalFunction::reduce(IntPoly::from_i64(&p), IntPoly::from_i64(&q)).unwrap())
}

fn arb_complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn modulus(q: u64) -> FactoredModulus {
    FactoredModulus::new(q).unwrap()
}

fn transducer(i: usize) -> ScalarTransducer {
    ScalarTransducer::builtin(["thue_morse", "rudin_shapiro", "digit_sum_mod(3,4)"][i]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn leading_zeros_do_not_change_output(d in arb_dfao(), n in 0u64..5000, pad in 0u32..6) {
        let width = autoexp::automata::digits(n, d.base()).len() as u32 + pad;
        prop_assert_eq!(d.run_padded(d.initial(), n, width), d.state_of(n));
    }

    #[test]
    fn truncation_below_block_is_identity(d in arb_dfao(), lambda in 1u32..8, n in 0u64..70000) {
        let m = (d.base() as u64).pow(lambda);
        let n = n % m;
        prop_assert_eq!(d.evaluate_truncated(n, lambda), d.evaluate(n));
    }

    #[test]
    fn synchronizing_word_collapses_states(d in arb_dfao()) {
        if let Some(w) = find_synchronizing_word(&d) {
            let target = d.run_word(0, &w);
            for q in 0..d.num_states() {
                prop_assert_eq!(d.run_word(q, &w), target);
            }
        }
    }

    #[test]
    fn local_factors_match_direct_formula(f in arb_rational(), q in 1u64..=10_000, n in -100_000i128..100_000) {
        let qm = modulus(q);
        prop_assume!(is_well_defined(&f, &qm));
        let ev = EqEvaluator::new(&f, &qm).unwrap();
        prop_assert_eq!(ev.eval(n), ev.eval_direct(n));
        prop_assert_eq!(ev.eval(n), ev.eval(n + q as i128));
    }

    #[test]
    fn reduce_is_idempotent_and_commutes_with_derivative(
        p in nonzero_poly(3, 5), q in nonzero_poly(3, 5), c in nonzero_poly(2, 3)
    ) {
        let (p, q, c) = (IntPoly::from_i64(&p), IntPoly::from_i64(&q), IntPoly::from_i64(&c));
        let f = RationalFunction::reduce(p.clone(), q.clone()).unwrap();
        let again = RationalFunction::reduce(f.numerator().clone(), f.denominator().clone()).unwrap();
        prop_assert_eq!(&again, &f);
        let (pc, qc) = (&p * &c, &q * &c);
        prop_assert_eq!(&RationalFunction::reduce(pc.clone(), qc.clone()).unwrap(), &f);
        let num = &(&pc.derivative() * &qc) - &(&pc * &qc.derivative());
        let raw = RationalFunction::reduce(num, &qc * &qc).unwrap();
        prop_assert_eq!(raw, f.derivative());
    }

    #[test]
    fn shift_scale_at_most_doubles_degree(f in arb_rational(), a in -20i64..20, s in 1i64..6, r in -20i64..20) {
        let g = f.shift_scale(a, s, r).unwrap();
        let (dp, dq) = (f.numerator().degree_or_zero(), f.denominator().degree_or_zero());
        prop_assert!(g.total_degree() <= dp + 3 * dq);
        if dq <= dp {
            prop_assert!(g.total_degree() <= 2 * f.total_degree());
        }
    }

    #[test]
    fn quadratic_phase_identity(u in -50i64..50, v in 1i64..30, q in 2u64..2000, n in -5000i128..5000, r in -50i128..50) {
        prop_assume!(num_integer::gcd(v as u64, q) == 1);
        let qm = modulus(q);
        let f = RationalFunction::constant_ratio(BigInt::from(u), BigInt::from(v)).unwrap().mul(&RationalFunction::x().pow(2));
        prop_assume!(is_well_defined(&f, &qm));
        let ev = EqEvaluator::new(&f, &qm).unwrap();
        let inv = mod_inverse(v as i128, q).unwrap() as i128;
        let want = Phase::new(u as i128 * inv % q as i128 * ((2 * n * r + r * r) % q as i128), q);
        prop_assert_eq!(ev.eval(n + r).unwrap() - ev.eval(n).unwrap(), want);
    }

    #[test]
    fn correlation_bounded_by_cardinality(
        f in arb_rational(), q in 2u64..500, x in 1u64..400, y in 0u64..1000, h in 0u64..50, m in 1u64..8, a in 0u64..8
    ) {
        let qm = modulus(q);
        prop_assume!(is_well_defined(&f, &qm));
        let ev = EqEvaluator::new(&f, &qm).unwrap();
        let u = correlation_u(|n| ev.eval_scalar(n as i128), x, y, h, m, a).unwrap();
        let card = IntervalProgression::new(y, x, m, a % m).unwrap().cardinality();
        prop_assert!(u.abs() <= card as f64 + 1e-9);
    }

    #[test]
    fn symbolic_difference_matches_pointwise(f in arb_rational(), q in 2u64..400, r in 0i64..20, y in 0u64..500, x in 1u64..300) {
        let qm = modulus(q);
        prop_assume!(is_well_defined(&f, &qm));
        let region = IntervalProgression::interval(y, x).unwrap();
        let (_, bad) = difference_agreement(&f, &qm, r, &region).unwrap();
        prop_assert_eq!(bad, 0);
        if f.is_polynomial() {
            let sym = difference_sum(&f, &qm, r, &region).unwrap();
            let pw = difference_sum_pointwise(&f, &qm, r, &region).unwrap();
            prop_assert!(sym.exact_part().exact_eq(pw.exact_part()));
        }
    }

    #[test]
    fn transducer_weights_form_a_cocycle(
        which in 0usize..3, q in 0usize..4, u in vec(0u32..4, 0..30), v in vec(0u32..4, 0..30)
    ) {
        let tr = transducer(which);
        let k = tr.base();
        let q = q % tr.automaton().num_states();
        let u: Vec<u32> = u.into_iter().map(|d| d % k).collect();
        let v: Vec<u32> = v.into_iter().map(|d| d % k).collect();
        let (p1, s1) = tr.run_word(q, &u);
        let (p2, s2) = tr.run_word(s1, &v);
        let uv: Vec<u32> = u.iter().chain(&v).copied().collect();
        prop_assert_eq!(tr.run_word(q, &uv), (p1 + p2, s2));
    }

    #[test]
    fn vdc_scalar_inequality(z in vec(arb_complex(), 1..120), big_r in 1.0f64..24.0, k in 1u64..5) {
        prop_assert!(vdc_inequality_check_scalar(&z, big_r, k).unwrap().holds);
    }

    #[test]
    fn vdc_matrix_inequality(
        (d, z) in (1usize..4).prop_flat_map(|d| (Just(d), vec(vec(arb_complex(), d * d), 1..60))),
        big_r in 1.0f64..16.0,
        k in 1u64..4,
    ) {
        let mats: Vec<DMatrix<Complex64>> = z.iter().map(|e| DMatrix::from_iterator(d, d, e.iter().copied())).collect();
        prop_assert!(vdc_inequality_check(&mats, big_r, k).unwrap().holds);
    }

    #[test]
    fn carry_counts_non_increasing_in_rho(additive in any::<bool>(), lambda in 2u32..6, alpha in 0u32..3, r in 0u64..50) {
        // digit-additive weights only; Rudin-Shapiro pairs straddle the cut
        let tr = transducer(if additive { 0 } else { 2 });
        let counts: Vec<u64> = (0..lambda)
            .map(|rho| carry_violation_count(&tr, lambda, alpha, rho, r, Budget::DEFAULT).unwrap())
            .collect();
        prop_assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{:?}", counts);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn blocks_reassemble_direct_sum(d in arb_dfao(), y in 0u64..2000, x in 20u64..1500, sigma in 1u32..4, c in 1u64..50) {
        prop_assume!((d.base() as u64).pow(sigma) <= x);
        let g = |n: u64| Scalar::unit(Phase::new((c * n * n) as i128, 97));
        let dec = block_decompose_sum(&d, g, y, x, sigma).unwrap();
        let direct = progression_sum(&IntervalProgression::interval(y, x).unwrap(), |n| d.evaluate(n).mul(&g(n)));
        prop_assert!(dec.total.exact_part().exact_eq(direct.exact_part()));
    }

    #[test]
    fn sync_failures_non_increasing_in_lambda(i in 0usize..3, y in 0u64..5000, x in 1024u64..3000) {
        let last_digit = Dfao::new(3, vec![vec![0, 1, 2]; 3], 0, vec![Scalar::zero(), Scalar::one(), Scalar::one()]).unwrap();
        let d = if i == 2 { last_digit } else { builtin(["block_11", "constant_one"][i]).unwrap() };
        prop_assert!(find_synchronizing_word(&d).is_some());
        let max = (1..12u32).take_while(|&l| (d.base() as u64).pow(l) <= x).last().unwrap();
        let counts: Vec<u64> = (1..=max).map(|l| sync_failure_count(&d, y, x, l).unwrap()).collect();
        prop_assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{:?}", counts);
    }

    #[test]
    fn kloosterman_sums_are_real(i in 0usize..95, a in 1i64..1000, b in 1i64..1000) {
        let p = autoexp::modring::primes_between(2, 500)[i];
        prop_assume!(!(a as u64).is_multiple_of(p) && !(b as u64).is_multiple_of(p));
        let f = RationalFunction::reduce(IntPoly::from_i64(&[b, 0, a]), IntPoly::x()).unwrap();
        let s = complete_sum(&f, &modulus(p)).unwrap();
        prop_assert!(s.exact_part().exact_eq(&s.exact_part().conj()));
    }

    #[test]
    fn complete_sums_factor_over_coprime_moduli(f in arb_rational(), q1 in 2u64..100, q2 in 2u64..100) {
        prop_assume!(num_integer::gcd(q1, q2) == 1);
        let q = modulus(q1 * q2);
        prop_assume!(is_well_defined(&f, &q));
        let twisted = |qi: u64| {
            let t = mod_inverse((q1 * q2 / qi) as i128, qi).unwrap();
            complete_sum(&f.mul(&RationalFunction::constant(BigInt::from(t))), &modulus(qi)).unwrap()
        };
        let prod = twisted(q1).exact_part().mul(twisted(q2).exact_part());
        prop_assert!(complete_sum(&f, &q).unwrap().exact_part().exact_eq(&prod));
    }

    #[test]
    fn weyl_stages_reconstruct(which in 0usize..2, y in 0u64..3000, extra in 0u64..400, l1 in 1u32..3, l2 in 1u32..3, c in 0u64..50) {
        let tr = transducer(which);
        let x = 10 * 2u64.pow(2 * l1 + l2) + extra;
        let g = |n: u64| Scalar::unit(Phase::new((c * n) as i128, 101));
        let rep = decompose_weyl(&tr, |s: Phase, _| Scalar::unit(s), g, WeylConfig { y, x, lambda1: l1, lambda2: l2 }).unwrap();
        prop_assert!(rep.exact && rep.all_identities_hold());
    }

    #[test]
    fn congruence_brute_force_and_symmetries(
        s in arb_indicator(), fs in vec(arb_rational(), 1..=3), q in 2u64..40, m in 0u64..40, c in 0u64..40
    ) {
        let qm = modulus(q);
        prop_assume!(fs.iter().all(|f| is_well_defined(f, &qm)));
        let m = m % q;
        let table = solution_table(&fs, &s, &qm, PoleMode::Exclude).unwrap();
        let brute = brute_force_count(&fs, &s, &qm, m, Budget::DEFAULT).unwrap();
        prop_assert_eq!(count_solutions(&fs, &s, &qm, m, PoleMode::Exclude).unwrap().count, brute);
        prop_assert_eq!(table.histogram.counts[m as usize], brute);

        let total: u128 = table.histogram.counts.iter().sum();
        prop_assert_eq!(total, table.supports.iter().product::<u128>());

        let mut rev = fs.clone();
        rev.reverse();
        prop_assert_eq!(&solution_table(&rev, &s, &qm, PoleMode::Exclude).unwrap().histogram.counts, &table.histogram.counts);

        let mut moved = fs.clone();
        moved[0] = moved[0].add(&RationalFunction::constant(BigInt::from(c)));
        let shifted = solution_table(&moved, &s, &qm, PoleMode::Exclude).unwrap();
        prop_assert_eq!(&shifted.histogram.counts, &table.histogram.shifted(c).counts);
    }

    #[test]
    fn convolution_mass_and_commutativity(a in vec(0u128..1000, 1..30), b in vec(0u128..1000, 1..30)) {
        let q = a.len().min(b.len());
        let h1 = ValueHistogram::from_counts(q as u64, a[..q].to_vec()).unwrap();
        let h2 = ValueHistogram::from_counts(q as u64, b[..q].to_vec()).unwrap();
        let ab = cyclic_convolve(&h1, &h2).unwrap();
        prop_assert_eq!(ab.support_size, h1.support_size * h2.support_size);
        prop_assert_eq!(ab.counts, cyclic_convolve(&h2, &h1).unwrap().counts);
    }

    #[test]
    fn histogram_of_translate_is_shifted(s in arb_indicator(), f in arb_rational(), q in 2u64..200, c in 0u64..200) {
        let qm = modulus(q);
        prop_assume!(is_well_defined(&f, &qm));
        let h = value_histogram(&s, &f, &qm, PoleMode::Exclude).unwrap();
        let g = f.add(&RationalFunction::constant(BigInt::from(c)));
        prop_assert_eq!(value_histogram(&s, &g, &qm, PoleMode::Exclude).unwrap().counts, h.shifted(c).counts);
    }
}

#[test]
fn carry_counts_across_r_are_recorded() {
    let tr = ScalarTransducer::builtin("thue_morse").unwrap();
    for r in [0u64, 1, 7, 101] {
        let counts: Vec<u64> =
            (0..6).map(|rho| carry_violation_count(&tr, 8, 2, rho, r, Budget::DEFAULT).unwrap()).collect();
        eprintln!("r = {r}: {counts:?}");
        assert!(counts.windows(2).all(|w| w[1] <= w[0]));
    }
}
