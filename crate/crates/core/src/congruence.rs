//! Counting solutions of `f_1(n_1) + ... + f_r(n_r) = m mod q` with every
//! `n_j` in an automatic set, by convolving per-coordinate value histograms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::automata::Dfao;
use crate::error::{Budget, Error, Result};
use crate::modring::{EqEvaluator, FactoredModulus, RationalFunction};
use crate::parallel::{map_chunks, map_collect, CHUNK};

/// What to do with `n` in the set where `gcd(Q(n), q) > 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum PoleMode {
    /// Drop them from the effective support.
    #[default]
    Exclude,
    /// Fail on the first one.
    Strict,
}

/// Distribution of `f(n) mod q` over the set elements `n` in `[1, q]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValueHistogram {
    pub modulus: u64,
    pub counts: Vec<u128>,
    /// Number of `n` counted; the sum of `counts`.
    pub support_size: u128,
    /// Set elements skipped as poles.
    pub poles: u128,
}

impl ValueHistogram {
    /// Point mass `count` at residue `m`.
    pub fn delta(q: u64, m: u64, count: u128) -> Self {
        let mut counts = vec![0; q as usize];
        counts[(m % q) as usize] = count;
        ValueHistogram { modulus: q, counts, support_size: count, poles: 0 }
    }

    pub fn from_counts(q: u64, counts: Vec<u128>) -> Result<Self> {
        if counts.len() as u64 != q {
            return Err(Error::DimensionMismatch(format!("{} counts for modulus {q}", counts.len())));
        }
        let support_size = counts
            .iter()
            .try_fold(0u128, |a, &c| a.checked_add(c))
            .ok_or_else(|| Error::Range("count overflows 128 bits".into()))?;
        Ok(ValueHistogram { modulus: q, counts, support_size, poles: 0 })
    }

    /// The histogram of `f + c`.
    pub fn shifted(&self, c: u64) -> Self {
        let q = self.modulus as usize;
        let c = (c % self.modulus) as usize;
        let mut counts = vec![0; q];
        for (m, &v) in self.counts.iter().enumerate() {
            counts[(m + c) % q] = v;
        }
        ValueHistogram { counts, ..self.clone() }
    }
}

fn check_indicator(d: &Dfao) -> Result<()> {
    if d.is_indicator() {
        Ok(())
    } else {
        Err(Error::Precondition("set automaton must have outputs in {0, 1}".into()))
    }
}

fn in_set(d: &Dfao, n: u64) -> bool {
    !d.evaluate(n).is_zero()
}

/// `counts[m] = #{n in [1, q] : n in S, gcd(Q(n), q) = 1, f(n) = m mod q}`.
pub fn value_histogram(d: &Dfao, f: &RationalFunction, q: &FactoredModulus, mode: PoleMode) -> Result<ValueHistogram> {
    check_indicator(d)?;
    let ev = EqEvaluator::new(f, q)?;
    let qv = q.value();
    let parts = map_chunks(1, qv + 1, CHUNK, |lo, hi| {
        let mut hits = Vec::new();
        let mut poles = Vec::new();
        for n in (lo..hi).filter(|&n| in_set(d, n)) {
            match ev.residue(n as i128) {
                Some(a) => hits.push(a),
                None => poles.push(n),
            }
        }
        (hits, poles)
    });
    let mut counts = vec![0u128; qv as usize];
    let (mut support_size, mut poles) = (0u128, 0u128);
    for (hits, pole_list) in parts {
        if mode == PoleMode::Strict {
            if let Some(n) = pole_list.first() {
                return Err(Error::Domain(format!("{f} has a pole mod {qv} at n = {n}")));
            }
        }
        poles += pole_list.len() as u128;
        support_size += hits.len() as u128;
        for a in hits {
            counts[a as usize] += 1;
        }
    }
    Ok(ValueHistogram { modulus: qv, counts, support_size, poles })
}

/// `counts[m] = sum_j h1[j] h2[(m - j) mod q]`, exact.
pub fn cyclic_convolve(h1: &ValueHistogram, h2: &ValueHistogram) -> Result<ValueHistogram> {
    if h1.modulus != h2.modulus {
        return Err(Error::ModulusMismatch { left: h1.modulus, right: h2.modulus });
    }
    let support_size = h1
        .support_size
        .checked_mul(h2.support_size)
        .ok_or_else(|| Error::Range("convolved counts overflow 128 bits".into()))?;
    let q = h1.modulus as usize;
    let nz: Vec<(usize, u128)> = h1.counts.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
    // every partial sum is bounded by the product of the supports, so u128 cannot overflow
    let counts: Vec<u128> = map_chunks(0, q as u64, 256, |lo, hi| {
        (lo as usize..hi as usize)
            .map(|m| nz.iter().map(|&(j, c)| c * h2.counts[(m + q - j) % q]).sum::<u128>())
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    Ok(ValueHistogram { modulus: h1.modulus, counts, support_size, poles: h1.poles + h2.poles })
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceReport {
    pub f: Vec<String>,
    pub q: u64,
    pub m: u64,
    pub count: u128,
    pub supports: Vec<u128>,
    /// `|S cap [1, q]|`, poles included.
    pub set_size: u128,
    /// `prod supports / q` as an exact fraction and as a float.
    pub main_term: String,
    pub main_term_f64: f64,
    pub relative_error: f64,
    /// `|S cap [1, q]|^r / q`.
    pub set_main_term_f64: f64,
    pub set_relative_error: f64,
    pub warnings: Vec<String>,
}

/// Full solution table over every `m`.
#[derive(Clone, Debug, Serialize)]
pub struct CongruenceTable {
    pub histogram: ValueHistogram,
    pub supports: Vec<u128>,
    pub set_size: u128,
    pub warnings: Vec<String>,
}

fn warnings_for(fs: &[RationalFunction]) -> Vec<String> {
    fs.iter()
        .filter(|f| f.polynomial_degree().is_some_and(|d| d <= 1))
        .map(|f| format!("{f} is a constant or linear polynomial"))
        .collect()
}

/// Convolution of the per-coordinate histograms.
pub fn solution_table(fs: &[RationalFunction], s: &Dfao, q: &FactoredModulus, mode: PoleMode) -> Result<CongruenceTable> {
    if fs.is_empty() {
        return Err(Error::Precondition("need at least one f_j".into()));
    }
    let hists = map_collect(fs.to_vec(), |f| value_histogram(s, &f, q, mode));
    let hists: Vec<ValueHistogram> = hists.into_iter().collect::<Result<_>>()?;
    let supports = hists.iter().map(|h| h.support_size).collect();
    let set_size = hists[0].support_size + hists[0].poles;
    let mut acc = hists[0].clone();
    for h in &hists[1..] {
        acc = cyclic_convolve(&acc, h)?;
    }
    Ok(CongruenceTable { histogram: acc, supports, set_size, warnings: warnings_for(fs) })
}

fn relative(count: u128, q: u64, mass: &BigInt) -> f64 {
    if mass == &BigInt::from(0) {
        return f64::NAN;
    }
    let r = BigRational::new(BigInt::from(count) * BigInt::from(q) - mass, mass.clone());
    r.to_f64().unwrap_or(f64::NAN)
}

/// `N = #{(n_j) in (S cap [1, q])^r : sum f_j(n_j) = m mod q}` with the main term comparison.
pub fn count_solutions(fs: &[RationalFunction], s: &Dfao, q: &FactoredModulus, m: u64, mode: PoleMode) -> Result<CongruenceReport> {
    let table = solution_table(fs, s, q, mode)?;
    Ok(report_for(fs, q, m, &table))
}

pub fn report_for(fs: &[RationalFunction], q: &FactoredModulus, m: u64, table: &CongruenceTable) -> CongruenceReport {
    let qv = q.value();
    let count = table.histogram.counts[(m % qv) as usize];
    let mass = BigInt::from(table.histogram.support_size);
    let set_mass = num_traits::pow(BigInt::from(table.set_size), fs.len());
    let main = BigRational::new(mass.clone(), BigInt::from(qv));
    CongruenceReport {
        f: fs.iter().map(ToString::to_string).collect(),
        q: qv,
        m: m % qv,
        count,
        supports: table.supports.clone(),
        set_size: table.set_size,
        main_term: main.to_string(),
        main_term_f64: main.to_f64().unwrap_or(f64::NAN),
        relative_error: relative(count, qv, &mass),
        set_main_term_f64: BigRational::new(set_mass.clone(), BigInt::from(qv)).to_f64().unwrap_or(f64::NAN),
        set_relative_error: relative(count, qv, &set_mass),
        warnings: table.warnings.clone(),
    }
}

/// Direct enumeration over all admissible tuples.
pub fn brute_force_count(fs: &[RationalFunction], s: &Dfao, q: &FactoredModulus, m: u64, budget: Budget) -> Result<u128> {
    check_indicator(s)?;
    let qv = q.value();
    let needed = (qv as u128)
        .checked_pow(fs.len() as u32)
        .ok_or(Error::Budget { needed: u128::MAX, limit: budget.0 })?;
    budget.check(needed)?;
    if fs.is_empty() {
        return Err(Error::Precondition("need at least one f_j".into()));
    }
    let mut lists = Vec::with_capacity(fs.len());
    for f in fs {
        let ev = EqEvaluator::new(f, q)?;
        lists.push((1..=qv).filter(|&n| in_set(s, n)).filter_map(|n| ev.residue(n as i128)).collect::<Vec<u64>>());
    }
    let target = m % qv;
    let rest = &lists[1..];
    let parts = map_collect(lists[0].clone(), |a| count_from(rest, a, target, qv));
    Ok(parts.into_iter().sum())
}

fn count_from(lists: &[Vec<u64>], partial: u64, target: u64, q: u64) -> u128 {
    match lists.split_first() {
        None => (partial == target) as u128,
        Some((head, tail)) => head.iter().map(|&v| count_from(tail, (partial + v) % q, target, q)).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::builtin;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fq(q: u64) -> FactoredModulus {
        FactoredModulus::new(q).unwrap()
    }

    fn fs(list: &str) -> Vec<RationalFunction> {
        crate::modring::parse_rational_function_list(list).unwrap()
    }

    #[test]
    fn identity_and_inverse_histograms() {
        let all = builtin("constant_one").unwrap();
        let h = value_histogram(&all, &"X".parse().unwrap(), &fq(7), PoleMode::Exclude).unwrap();
        assert_eq!(h.counts, vec![1; 7]);
        let h = value_histogram(&all, &"1/X".parse().unwrap(), &fq(7), PoleMode::Exclude).unwrap();
        assert_eq!(h.counts, vec![0, 1, 1, 1, 1, 1, 1]);
        assert_eq!((h.support_size, h.poles), (6, 1));
        let strict = value_histogram(&all, &"1/X".parse().unwrap(), &fq(7), PoleMode::Strict);
        assert!(matches!(strict, Err(Error::Domain(_))));
        let not_indicator = builtin("digit_sum_mod(2,3)").unwrap();
        assert!(value_histogram(&not_indicator, &"X".parse().unwrap(), &fq(7), PoleMode::Exclude).is_err());
    }

    #[test]
    fn convolution_rules() {
        let h = ValueHistogram::from_counts(5, vec![3, 0, 2, 7, 1]).unwrap();
        assert_eq!(cyclic_convolve(&h, &ValueHistogram::delta(5, 0, 1)).unwrap().counts, h.counts);
        let ones = ValueHistogram::from_counts(9, vec![1; 9]).unwrap();
        assert_eq!(cyclic_convolve(&ones, &ones).unwrap().counts, vec![9; 9]);
        assert!(matches!(cyclic_convolve(&h, &ones), Err(Error::ModulusMismatch { .. })));

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let a: Vec<u128> = (0..12).map(|_| rng.random_range(0..50)).collect();
            let b: Vec<u128> = (0..12).map(|_| rng.random_range(0..50)).collect();
            let ha = ValueHistogram::from_counts(12, a.clone()).unwrap();
            let hb = ValueHistogram::from_counts(12, b.clone()).unwrap();
            let c = cyclic_convolve(&ha, &hb).unwrap();
            for m in 0..12 {
                let direct: u128 = (0..12).map(|j| a[j] * b[(m + 12 - j) % 12]).sum();
                assert_eq!(c.counts[m], direct);
            }
        }
    }

    #[test]
    fn small_counts() {
        let all = builtin("constant_one").unwrap();
        for q in [5u64, 12, 31] {
            for m in [0, 3] {
                let rep = count_solutions(&fs("X"), &all, &fq(q), m, PoleMode::Exclude).unwrap();
                assert_eq!(rep.count, 1);
                assert_eq!(rep.relative_error, 0.0);
                assert_eq!(rep.warnings.len(), 1);
            }
        }
        let rep = count_solutions(&fs("1/X, 1/X"), &all, &fq(7), 0, PoleMode::Exclude).unwrap();
        assert_eq!(rep.count, 6);
        assert!(rep.warnings.is_empty());
    }

    #[test]
    fn evil_numbers_oracle() {
        let evil = builtin("thue_morse_even").unwrap();
        let rep = count_solutions(&fs("1/X,1/X,1/X"), &evil, &fq(101), 1, PoleMode::Exclude).unwrap();
        assert_eq!(rep.count, 1108);
        assert_eq!(rep.supports, vec![49; 3]);
        assert!((rep.relative_error + 0.04879769483803517).abs() < 1e-12);
        assert_eq!(brute_force_count(&fs("1/X,1/X,1/X"), &evil, &fq(101), 1, Budget::DEFAULT).unwrap(), 1108);
        let big = count_solutions(&fs("1/X,1/X,1/X"), &evil, &fq(1009), 1, PoleMode::Exclude).unwrap();
        assert_eq!(big.count, 127399);
        assert_eq!(big.supports, vec![504; 3]);
        assert!(big.relative_error.abs() < rep.relative_error.abs());
    }

    #[test]
    fn brute_force_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let sets = ["constant_one", "thue_morse_even", "block_11"];
        let funcs = ["1/X", "X^2", "X^3 + 2", "1/(X + 1)", "(X^2 + 1)/X", "X"];
        let primes = [5u64, 7, 11, 13, 17, 29, 31, 43, 101];
        for _ in 0..50 {
            let r = rng.random_range(1..=3);
            let q = if r == 3 { primes[rng.random_range(0..7)] } else { primes[rng.random_range(0..primes.len())] };
            let list: Vec<RationalFunction> =
                (0..r).map(|_| funcs[rng.random_range(0..funcs.len())].parse().unwrap()).collect();
            let s = builtin(sets[rng.random_range(0..sets.len())]).unwrap();
            let m = rng.random_range(0..q);
            let fast = count_solutions(&list, &s, &fq(q), m, PoleMode::Exclude).unwrap().count;
            assert_eq!(fast, brute_force_count(&list, &s, &fq(q), m, Budget::DEFAULT).unwrap());
        }
    }

    #[test]
    fn brute_force_edges() {
        let empty = Dfao::new(2, vec![vec![0, 0]], 0, vec![crate::exact::Scalar::zero()]).unwrap();
        assert_eq!(brute_force_count(&fs("1/X"), &empty, &fq(13), 2, Budget::DEFAULT).unwrap(), 0);
        let all = builtin("constant_one").unwrap();
        let err = brute_force_count(&fs("X,X,X,X"), &all, &fq(1009), 0, Budget::DEFAULT).unwrap_err();
        assert!(err.is_budget());
        let h = value_histogram(&all, &"X^2".parse().unwrap(), &fq(13), PoleMode::Exclude).unwrap();
        for m in 0..13 {
            assert_eq!(brute_force_count(&fs("X^2"), &all, &fq(13), m, Budget::DEFAULT).unwrap(), h.counts[m as usize]);
        }
    }

    #[test]
    fn translation_and_mass() {
        let evil = builtin("thue_morse_even").unwrap();
        let q = fq(43);
        let t = solution_table(&fs("1/X, X^2"), &evil, &q, PoleMode::Exclude).unwrap();
        let shifted = solution_table(&fs("1/X + 5, X^2"), &evil, &q, PoleMode::Exclude).unwrap();
        for m in 0..43usize {
            assert_eq!(shifted.histogram.counts[(m + 5) % 43], t.histogram.counts[m]);
        }
        assert_eq!(t.histogram.counts.iter().sum::<u128>(), t.supports.iter().product::<u128>());
        let swapped = solution_table(&fs("X^2, 1/X"), &evil, &q, PoleMode::Exclude).unwrap();
        assert_eq!(swapped.histogram.counts, t.histogram.counts);
    }
}
