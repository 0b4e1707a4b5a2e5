//! Fixed experiment configurations and their drivers. The CLI presets and the
//! acceptance suite both run these, so a preset reproduces a criterion exactly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automata::{builtin, sync_failure_count, Dfao};
use crate::congruence::{brute_force_count, count_solutions, cyclic_convolve, CongruenceReport, PoleMode, ValueHistogram};
use crate::error::{Budget, Result};
use crate::exact::{Phase, Scalar};
use crate::expsums::{
    check_gcd_lemma, check_quadratic_geometric, complete_sum, progression_sum, pv_range_scan, weighted_sum,
    GcdLemmaReport, IntervalProgression, QuadraticRow, SweepReport, YPolicy,
};
use crate::modring::{
    is_well_defined, parse_rational_function_list, primes_between, EqEvaluator, FactoredModulus, IntPoly,
    RationalFunction,
};
use crate::parallel::map_collect;
use crate::vandercorput::{carry_violation_count, decompose_weyl, vdc_inequality_check, ScalarTransducer, WeylConfig};

fn parse(f: &str) -> Result<RationalFunction> {
    f.parse()
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactInverseConfig {
    pub f: String,
    pub p_max: u64,
}

impl Default for ExactInverseConfig {
    fn default() -> Self {
        ExactInverseConfig { f: "1/X".into(), p_max: 499 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactInverseRow {
    pub p: u64,
    /// The complete sum as an exact rational, when it is one.
    pub value: Option<String>,
    pub re: f64,
    pub im: f64,
}

pub fn exact_inverse(cfg: &ExactInverseConfig) -> Result<Vec<ExactInverseRow>> {
    let f = parse(&cfg.f)?;
    primes_between(2, cfg.p_max)
        .into_iter()
        .map(|p| {
            let s = complete_sum(&f, &FactoredModulus::new(p)?)?;
            let z = s.to_complex();
            let value = if s.is_exact() { s.exact_part().as_rational().map(|r| r.to_string()) } else { None };
            Ok(ExactInverseRow { p, value, re: z.re, im: z.im })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WeilGridConfig {
    pub p_max: u64,
}

impl Default for WeilGridConfig {
    fn default() -> Self {
        WeilGridConfig { p_max: 499 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct KloostermanRow {
    pub p: u64,
    pub a: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    /// `2 sqrt(p)`.
    pub bound: f64,
}

/// `sum_{n mod p} e_p(a n + 1/n)` for every prime `p <= p_max` and `a in [1, p)`.
pub fn weil_grid(cfg: &WeilGridConfig) -> Result<Vec<KloostermanRow>> {
    let cells: Vec<(u64, u64)> = primes_between(2, cfg.p_max).into_iter().flat_map(|p| (1..p).map(move |a| (p, a))).collect();
    map_collect(cells, |(p, a)| {
        let f = parse(&format!("{a}X + 1/X"))?;
        let z = complete_sum(&f, &FactoredModulus::new(p)?)?.to_complex();
        Ok(KloostermanRow { p, a, re: z.re, im: z.im, abs: z.norm(), bound: 2.0 * (p as f64).sqrt() })
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CrtConfig {
    pub trials: usize,
    pub q_max: u64,
    pub seed: u64,
}

impl Default for CrtConfig {
    fn default() -> Self {
        CrtConfig { trials: 100, q_max: 10_000, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CrtRow {
    pub f: String,
    pub q1: u64,
    pub q2: u64,
    pub n: i64,
    /// Residue from the prime-power local factors.
    pub local: Option<u64>,
    /// Residue from `P(n) Q(n)^-1 mod q`.
    pub direct: Option<u64>,
    pub agree: bool,
}

fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> IntPoly {
    let deg = rng.random_range(0..=max_deg);
    let mut c: Vec<i64> = (0..=deg).map(|_| rng.random_range(-9..=9)).collect();
    while c[deg] == 0 {
        c[deg] = rng.random_range(-9..=9);
    }
    IntPoly::from_i64(&c)
}

/// Random `f`, coprime `q1 q2 <= q_max` and `n` with `gcd(Q(n), q) = 1`.
pub fn crt_consistency(cfg: &CrtConfig) -> Result<Vec<CrtRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::with_capacity(cfg.trials);
    while rows.len() < cfg.trials {
        let q1 = rng.random_range(2..=(cfg.q_max / 2).clamp(2, 100));
        let q2 = rng.random_range(2..=(cfg.q_max / q1).max(2));
        if q1.gcd(&q2) != 1 || q1 * q2 > cfg.q_max {
            continue;
        }
        let q = FactoredModulus::new(q1 * q2)?;
        let f = RationalFunction::reduce(random_poly(&mut rng, 3), random_poly(&mut rng, 2))?;
        if !is_well_defined(&f, &q) {
            continue;
        }
        let ev = EqEvaluator::new(&f, &q)?;
        let Some(n) = (0..200).map(|_| rng.random_range(-1_000_000i64..=1_000_000)).find(|&n| ev.residue_direct(n as i128).is_some())
        else {
            continue;
        };
        let (local, direct) = (ev.residue(n as i128), ev.residue_direct(n as i128));
        rows.push(CrtRow { f: f.to_string(), q1, q2, n, local, direct, agree: local == direct });
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcFuzzConfig {
    pub trials: usize,
    pub d_max: usize,
    pub x_max: usize,
    pub r_max: f64,
    pub k_max: u64,
    pub seed: u64,
}

impl Default for VdcFuzzConfig {
    fn default() -> Self {
        VdcFuzzConfig { trials: 10_000, d_max: 3, x_max: 200, r_max: 32.0, k_max: 4, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VdcFuzzSummary {
    pub trials: usize,
    pub failures: usize,
    /// Smallest `slack / max(rhs, 1)` seen.
    pub min_relative_slack: f64,
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random sequences of `d x d` matrices: i.i.d. entries, a fixed matrix times
/// a linear phase, and a constant sequence, in rotation.
pub fn vdc_fuzz(cfg: &VdcFuzzConfig) -> Result<VdcFuzzSummary> {
    // trial i draws from stream i of the seeded generator, so trials can run in any order
    let results = map_collect((0..cfg.trials as u64).collect(), |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i);
        let d = rng.random_range(1..=cfg.d_max);
        let x = rng.random_range(1..=cfg.x_max);
        let r = if i % 2 == 0 { rng.random_range(1..=cfg.r_max as u64) as f64 } else { rng.random_range(1.0..=cfg.r_max) };
        let k = rng.random_range(1..=cfg.k_max);
        let z: Vec<DMatrix<Complex64>> = match i % 3 {
            0 => (0..x).map(|_| random_matrix(&mut rng, d)).collect(),
            1 => {
                let a = random_matrix(&mut rng, d);
                let theta: f64 = rng.random_range(0.0..1.0);
                (0..x).map(|n| &a * Complex64::from_polar(1.0, std::f64::consts::TAU * theta * n as f64)).collect()
            }
            _ => vec![random_matrix(&mut rng, d); x],
        };
        vdc_inequality_check(&z, r, k)
    });
    let mut summary = VdcFuzzSummary { trials: cfg.trials, failures: 0, min_relative_slack: f64::INFINITY };
    for res in results {
        let res = res?;
        summary.failures += usize::from(!res.holds);
        summary.min_relative_slack = summary.min_relative_slack.min(res.slack / res.rhs.abs().max(1.0));
    }
    Ok(summary)
}

#[derive(Clone, Debug, Serialize)]
pub struct GcdGridConfig {
    pub fs: Vec<String>,
    pub rs: Vec<i64>,
    pub ls: Vec<i64>,
    pub p_min: u64,
    pub p_max: u64,
}

impl Default for GcdGridConfig {
    fn default() -> Self {
        GcdGridConfig {
            fs: vec!["1/X".into(), "X^3".into(), "(X^2 + 1)/X".into()],
            rs: vec![1, 2, 5],
            ls: vec![0, 1, 3],
            p_min: 5,
            p_max: 199,
        }
    }
}

pub fn gcd_grid(cfg: &GcdGridConfig) -> Result<Vec<GcdLemmaReport>> {
    let primes = primes_between(cfg.p_min, cfg.p_max);
    let mut out = Vec::new();
    for f in &cfg.fs {
        let f = parse(f)?;
        for &r in &cfg.rs {
            for &l in &cfg.ls {
                out.push(check_gcd_lemma(&f, r, l, &primes)?);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticGridConfig {
    /// `(u, v)` for `f = (u/v) X^2`.
    pub ratios: Vec<(i64, i64)>,
    pub qs: Vec<u64>,
    pub r_max: i64,
    pub s_max: u64,
    pub xs: Vec<u64>,
    pub ys: Vec<u64>,
}

impl Default for QuadraticGridConfig {
    fn default() -> Self {
        QuadraticGridConfig {
            ratios: vec![(1, 1), (1, 3)],
            qs: vec![16, 101, 1024],
            r_max: 10,
            s_max: 4,
            xs: vec![1, 50, 700, 5000],
            ys: vec![0, 37],
        }
    }
}

pub fn quadratic_grid(cfg: &QuadraticGridConfig) -> Result<Vec<QuadraticRow>> {
    let mut cells = Vec::new();
    for &(u, v) in &cfg.ratios {
        for &q in &cfg.qs {
            for r in 0..=cfg.r_max {
                for s in 1..=cfg.s_max {
                    for &x in &cfg.xs {
                        for &y in &cfg.ys {
                            cells.push((u, v, q, r, s, y, x));
                        }
                    }
                }
            }
        }
    }
    map_collect(cells, |(u, v, q, r, s, y, x)| {
        check_quadratic_geometric(u, v, &FactoredModulus::new(q)?, r, s, (y + 1) % s, y, x)
    })
    .into_iter()
    .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct PvConfig {
    pub automaton: String,
    pub f: String,
    pub qs: Vec<u64>,
    pub theta: f64,
    pub y_policies: Vec<YPolicy>,
    pub exponent_c: f64,
}

impl Default for PvConfig {
    fn default() -> Self {
        PvConfig {
            automaton: "thue_morse_even".into(),
            f: "1/X".into(),
            qs: vec![1009, 10007, 100003],
            theta: 0.75,
            y_policies: vec![YPolicy::Fixed(0), YPolicy::MultipleOfQ(1), YPolicy::MultipleOfQ(10)],
            exponent_c: 0.5,
        }
    }
}

pub fn pv_scan(cfg: &PvConfig) -> Result<Vec<SweepReport>> {
    let d = builtin(&cfg.automaton)?;
    let f = parse(&cfg.f)?;
    cfg.y_policies
        .iter()
        .map(|&y| pv_range_scan(&d, &cfg.automaton, &f, &cfg.qs, cfg.theta, y, cfg.exponent_c))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceConfig {
    pub set: String,
    pub f: String,
    pub qs: Vec<u64>,
    pub m: u64,
}

impl Default for CongruenceConfig {
    fn default() -> Self {
        CongruenceConfig { set: "thue_morse_even".into(), f: "1/X,1/X,1/X".into(), qs: vec![101, 1009, 10007], m: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CongruenceRow {
    #[serde(flatten)]
    pub report: CongruenceReport,
    /// Direct enumeration, when within budget.
    pub brute: Option<u128>,
}

pub fn congruence_scan(cfg: &CongruenceConfig, budget: Budget) -> Result<Vec<CongruenceRow>> {
    let s = builtin(&cfg.set)?;
    let fs = parse_rational_function_list(&cfg.f)?;
    cfg.qs
        .iter()
        .map(|&q| {
            let fq = FactoredModulus::new(q)?;
            let report = count_solutions(&fs, &s, &fq, cfg.m, PoleMode::Exclude)?;
            let brute = match brute_force_count(&fs, &s, &fq, cfg.m, budget) {
                Ok(n) => Some(n),
                Err(e) if e.is_budget() => None,
                Err(e) => return Err(e),
            };
            Ok(CongruenceRow { report, brute })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct CarryConfig {
    pub transducer: String,
    pub lambda: u32,
    pub alpha: u32,
    pub rhos: Vec<u32>,
    pub rs: Vec<u64>,
}

impl Default for CarryConfig {
    fn default() -> Self {
        CarryConfig { transducer: "thue_morse".into(), lambda: 10, alpha: 3, rhos: (2..=6).collect(), rs: vec![0, 1, 7] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CarryRow {
    pub r: u64,
    pub rho: u32,
    pub count: u64,
}

pub fn carry_decay(cfg: &CarryConfig, budget: Budget) -> Result<Vec<CarryRow>> {
    let tr = ScalarTransducer::builtin(&cfg.transducer)?;
    let mut rows = Vec::new();
    for &r in &cfg.rs {
        for &rho in &cfg.rhos {
            let count = carry_violation_count(&tr, cfg.lambda, cfg.alpha, rho, r, budget)?;
            rows.push(CarryRow { r, rho, count });
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct SyncConfig {
    pub automaton: String,
    pub y: u64,
    pub x: u64,
    pub lambdas: Vec<u32>,
}

impl Default for SyncConfig {
    fn default() -> Self {
        SyncConfig { automaton: "block_11".into(), y: 0, x: 1 << 16, lambdas: (2..=10).collect() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SyncRow {
    pub lambda: u32,
    pub count: u64,
}

pub fn sync_decay(cfg: &SyncConfig) -> Result<Vec<SyncRow>> {
    let d = builtin(&cfg.automaton)?;
    cfg.lambdas
        .iter()
        .map(|&lambda| Ok(SyncRow { lambda, count: sync_failure_count(&d, cfg.y, cfg.x, lambda)? }))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylGridConfig {
    pub y: u64,
    pub x: u64,
    /// Modulus for `g = e_q(1/X)`; the grid also runs `g = 1`.
    pub q: u64,
    pub lambdas: Vec<(u32, u32)>,
}

impl Default for WeylGridConfig {
    fn default() -> Self {
        WeylGridConfig { y: 37, x: 2000, q: 1009, lambdas: vec![(1, 1), (2, 1), (1, 2), (2, 2), (3, 1)] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylGridRow {
    pub transducer: String,
    pub g: String,
    pub lambda1: u32,
    pub lambda2: u32,
    pub exact: bool,
    pub identities: bool,
    /// `S0` equals the directly computed automatic sum exactly.
    pub matches_direct: bool,
    pub s0_re: f64,
    pub s0_im: f64,
    pub sync_failures: u64,
    pub carry_failures: u64,
    pub comparator: f64,
}

/// `thue_morse` with the even-weight output and `rudin_shapiro` with the sign
/// output, each against `g = 1` and `g = e_q(1/X)`, over the block exponents.
pub fn weyl_grid(cfg: &WeylGridConfig) -> Result<Vec<WeylGridRow>> {
    let q = FactoredModulus::new(cfg.q)?;
    let inv = parse("1/X")?;
    let ev = EqEvaluator::new(&inv, &q)?;
    let region = IntervalProgression::interval(cfg.y, cfg.x)?;
    type Tau = fn(Phase, usize) -> Scalar;
    let pairs: [(&str, &str, Tau); 2] = [
        ("thue_morse", "thue_morse_even", |s, _| if s.is_zero() { Scalar::one() } else { Scalar::zero() }),
        ("rudin_shapiro", "rudin_shapiro", |s, _| Scalar::unit(s)),
    ];
    let mut rows = Vec::new();
    for (tname, dname, tau) in pairs {
        let tr = ScalarTransducer::builtin(tname)?;
        let d: Dfao = builtin(dname)?;
        for twisted in [false, true] {
            let g = |n: u64| if twisted { ev.eval_scalar(n as i128) } else { Scalar::one() };
            let direct = if twisted {
                weighted_sum(&d, &inv, &q, &region)?
            } else {
                progression_sum(&region, |n| d.evaluate(n))
            };
            for &(l1, l2) in &cfg.lambdas {
                let wc = WeylConfig { y: cfg.y, x: cfg.x, lambda1: l1, lambda2: l2 };
                let rep = decompose_weyl(&tr, tau, g, wc)?;
                rows.push(WeylGridRow {
                    transducer: tname.into(),
                    g: if twisted { format!("e_{}(1/X)", cfg.q) } else { "1".into() },
                    lambda1: l1,
                    lambda2: l2,
                    exact: rep.exact,
                    identities: rep.all_identities_hold(),
                    matches_direct: rep.s0.is_exact()
                        && direct.is_exact()
                        && rep.s0.exact_part().exact_eq(direct.exact_part()),
                    s0_re: rep.s0_re,
                    s0_im: rep.s0_im,
                    sync_failures: rep.sync_failures,
                    carry_failures: rep.carry_failures,
                    comparator: rep.comparator,
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraConfig {
    pub instances: usize,
    pub q_max: u64,
    pub count_max: u128,
    pub seed: u64,
}

impl Default for AlgebraConfig {
    fn default() -> Self {
        AlgebraConfig { instances: 200, q_max: 60, count_max: 1000, seed: 0 }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AlgebraSummary {
    pub instances: usize,
    pub commutativity_failures: usize,
    pub associativity_failures: usize,
    pub mass_failures: usize,
}

pub fn convolution_algebra(cfg: &AlgebraConfig) -> Result<AlgebraSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = AlgebraSummary { instances: cfg.instances, ..Default::default() };
    for _ in 0..cfg.instances {
        let q = rng.random_range(1..=cfg.q_max);
        let mut hist = || -> Result<ValueHistogram> {
            // sparse rows as well as dense ones
            let density = rng.random_range(0.05..=1.0);
            let counts = (0..q)
                .map(|_| if rng.random_bool(density) { rng.random_range(0..=cfg.count_max) } else { 0 })
                .collect();
            ValueHistogram::from_counts(q, counts)
        };
        let (a, b, c) = (hist()?, hist()?, hist()?);
        let ab = cyclic_convolve(&a, &b)?;
        if ab.counts != cyclic_convolve(&b, &a)?.counts {
            out.commutativity_failures += 1;
        }
        if cyclic_convolve(&ab, &c)?.counts != cyclic_convolve(&a, &cyclic_convolve(&b, &c)?)?.counts {
            out.associativity_failures += 1;
        }
        if ab.counts.iter().sum::<u128>() != a.support_size * b.support_size {
            out.mass_failures += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_configs_run() {
        let rows = exact_inverse(&ExactInverseConfig { f: "1/X".into(), p_max: 30 }).unwrap();
        assert!(rows.iter().all(|r| r.value.as_deref() == Some("-1")));
        let k = weil_grid(&WeilGridConfig { p_max: 13 }).unwrap();
        assert_eq!(k.len(), 1 + 2 + 4 + 6 + 10 + 12);
        let crt = crt_consistency(&CrtConfig { trials: 10, ..Default::default() }).unwrap();
        assert!(crt.iter().all(|r| r.agree && r.local.is_some()));
        let fuzz = vdc_fuzz(&VdcFuzzConfig { trials: 60, ..Default::default() }).unwrap();
        assert_eq!(fuzz.failures, 0);
        let alg = convolution_algebra(&AlgebraConfig { instances: 10, ..Default::default() }).unwrap();
        assert_eq!(alg.commutativity_failures + alg.associativity_failures + alg.mass_failures, 0);
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = crt_consistency(&CrtConfig { trials: 5, seed: 9, ..Default::default() }).unwrap();
        let b = crt_consistency(&CrtConfig { trials: 5, seed: 9, ..Default::default() }).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
