use num_complex::Complex64;
use serde::Serialize;

use super::{vdc_inequality_check_scalar, ScalarTransducer};
use crate::automata::{checked_pow, sync_failure_count, Dfao};
use crate::error::{Error, Result};
use crate::exact::{Phase, Scalar, Total};
use crate::expsums::correlation_u;
use crate::parallel::{fold_chunks, map_chunks, map_collect, CHUNK};

/// Interval `(y, y + x]` and block exponents: `M = k^lambda1`, `R = k^lambda2`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct WeylConfig {
    pub y: u64,
    pub x: u64,
    pub lambda1: u32,
    pub lambda2: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRow {
    pub stage: String,
    pub index: String,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

impl StageRow {
    fn new(stage: &str, index: String, t: &Total) -> Self {
        let z = t.to_complex();
        StageRow { stage: stage.into(), index, re: z.re, im: z.im, abs: z.norm() }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylReport {
    pub config: WeylConfig,
    pub m: u64,
    pub r: u64,
    pub group_order: u64,
    pub s0_re: f64,
    pub s0_im: f64,
    pub s0_abs: f64,
    #[serde(skip)]
    pub s0: Total,
    /// Every `g(n)` and every `tau'` value was exact.
    pub exact: bool,
    /// `S0 = sum tau'(sigma, q) S1(sigma, q)`.
    pub s0_from_s1: bool,
    /// `S1 = sum_m [delta(q0, (m)_k) = q] S2(m, sigma) + E1` with `E1` over the sync failures.
    pub s1_from_s2: bool,
    /// `S3(m, t) = sum_sigma e(t sigma) S2(m, sigma)`.
    pub s3_from_s2: bool,
    /// `S4 = sum_{m'} (truncated weights) S5(m', r) + E4` with `E4` over the carry failures.
    pub s4_from_s5: bool,
    /// `S5(m', r) = U(x, y; rM; RM^2, m')`.
    pub s5_is_u: bool,
    pub vdc_holds: bool,
    pub vdc_min_slack: f64,
    /// `n` in the interval with `delta(q0, (n)_k) != delta(q0, (n mod M)_k)`.
    pub sync_failures: u64,
    /// Pairs `(n, r)` whose weight ratio changes under truncation to `2 lambda1 + lambda2` digits.
    pub carry_failures: u64,
    pub eta_fit: Option<f64>,
    /// `x M^-eta + sum_m sqrt(x/(RM) sum_{r, m'} |S5(m', r)|)`.
    pub comparator: f64,
    pub rows: Vec<StageRow>,
}

impl WeylReport {
    pub fn all_identities_hold(&self) -> bool {
        self.s0_from_s1 && self.s1_from_s2 && self.s3_from_s2 && self.s4_from_s5 && self.s5_is_u && self.vdc_holds
    }

    pub fn stage_csv(&self) -> Result<String> {
        crate::report::to_csv(&self.rows)
    }
}

/// Least-squares slope through the origin of `ln(count/x) = -eta lambda ln k`
/// over `lambda = 1..=floor(log_k x)`, using the positive counts only.
pub fn fit_eta(d: &Dfao, y: u64, x: u64) -> Result<Option<f64>> {
    let k = d.base() as u64;
    let mut top = 0u32;
    while checked_pow(d.base(), top + 1).is_some_and(|p| p <= x) {
        top += 1;
    }
    let (mut suv, mut suu) = (0.0, 0.0);
    for lambda in 1..=top.min(20) {
        let c = sync_failure_count(d, y, x, lambda)?;
        if c == 0 {
            continue;
        }
        let u = lambda as f64 * (k as f64).ln();
        let v = (c as f64 / x as f64).ln();
        suv += u * v;
        suu += u * u;
    }
    Ok((suu > 0.0).then(|| -suv / suu))
}

fn same(a: &Total, b: &Total) -> bool {
    a.matches(b, 1e-9)
}

fn phase_label(j: u64, n: u64) -> String {
    Phase::new(j as i128, n).to_string()
}

struct Point {
    t: u64,
    state: usize,
    t_trunc: u64,
    state_mod_m: usize,
    g: Scalar,
}

#[derive(Default)]
struct Acc {
    s0: Total,
    s1: Vec<Total>,
    s2: Vec<Total>,
    e1: Vec<Total>,
    s3: Vec<Total>,
    s4: Vec<Total>,
    e4: Vec<Total>,
    s5: Vec<Total>,
    sync: u64,
    carry: u64,
}

impl Acc {
    fn sized(s1: usize, s2: usize, s4: usize, s5: usize) -> Self {
        Acc {
            s0: Total::zero(),
            s1: vec![Total::zero(); s1],
            s2: vec![Total::zero(); s2],
            e1: vec![Total::zero(); s1],
            s3: vec![Total::zero(); s2],
            s4: vec![Total::zero(); s4],
            e4: vec![Total::zero(); s4],
            s5: vec![Total::zero(); s5],
            sync: 0,
            carry: 0,
        }
    }

    fn merge(&mut self, other: Acc) {
        self.s0.merge(other.s0);
        for (dst, src) in [
            (&mut self.s1, other.s1),
            (&mut self.s2, other.s2),
            (&mut self.e1, other.e1),
            (&mut self.s3, other.s3),
            (&mut self.s4, other.s4),
            (&mut self.e4, other.e4),
            (&mut self.s5, other.s5),
        ] {
            for (a, b) in dst.iter_mut().zip(src) {
                a.merge(b);
            }
        }
        self.sync += other.sync;
        self.carry += other.carry;
    }
}

fn add_nonzero(t: &mut Total, s: Scalar) {
    if !s.is_zero() {
        t.add_owned(s);
    }
}

/// Runs the twisted sum `sum_{y < n <= y + x} tau'(T(q0, (n)_k), delta(q0, (n)_k)) g(n)`
/// through every stage of the decomposition and checks each identity exactly
/// (to `1e-9` relative when `g` has float values).
///
/// Characters of the weight group `Z/N` are `chi_t(j/N) = e(tj/N)`.
/// Requires `R M^2 <= x / 10`.
pub fn decompose_weyl<Tau, G>(tr: &ScalarTransducer, tau: Tau, g: G, cfg: WeylConfig) -> Result<WeylReport>
where
    Tau: Fn(Phase, usize) -> Scalar + Sync + Send,
    G: Fn(u64) -> Scalar + Sync + Send,
{
    let WeylConfig { y, x, lambda1, lambda2 } = cfg;
    let k = tr.base();
    let overflow = || Error::Range("block sizes overflow".into());
    let m_mod = checked_pow(k, lambda1).ok_or_else(overflow)?;
    let r_cnt = checked_pow(k, lambda2).ok_or_else(overflow)?;
    let big = checked_pow(k, 2 * lambda1 + lambda2).ok_or_else(overflow)?;
    if big.checked_mul(10).is_none_or(|b| b > x) {
        return Err(Error::Precondition(format!("R M^2 = {big} exceeds x / 10 for x = {x}")));
    }
    let end = y
        .checked_add(x)
        .and_then(|e| e.checked_add((r_cnt - 1) * m_mod))
        .ok_or_else(|| Error::Range("interval overflows".into()))?;
    let n_ord = tr.group_order();
    let states = tr.automaton().num_states();
    let q0 = tr.automaton().initial();
    let l_digits = 2 * lambda1 + lambda2;

    // per-point data on (y, end]; index i is n = y + 1 + i
    let pts: Vec<Point> = map_chunks(y + 1, end + 1, CHUNK, |lo, hi| {
        (lo..hi)
            .map(|n| {
                let (t, state) = tr.run(q0, n);
                Point {
                    t: t.numerator_over(n_ord),
                    state,
                    t_trunc: tr.truncated_t(n, l_digits).numerator_over(n_ord),
                    state_mod_m: tr.run(q0, n % m_mod).1,
                    g: g(n),
                }
            })
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();

    let (nu, mu, ru, bu) = (n_ord as usize, m_mod as usize, r_cnt as usize, big as usize);
    let chi = |t: u64, j: u64| Phase::new((t * j % n_ord) as i128, n_ord);
    let tau_vals: Vec<Scalar> = (0..nu * states).map(|idx| tau(Phase::new((idx / states) as i128, n_ord), idx % states)).collect();
    let exact = tau_vals.iter().all(Scalar::is_exact) && pts.iter().all(|p| p.g.is_exact());

    let acc = fold_chunks(
        0,
        x,
        CHUNK,
        Acc::sized(nu * states, mu * nu, mu * nu * ru, bu * ru),
        |lo, hi| {
            let mut a = Acc::sized(nu * states, mu * nu, mu * nu * ru, bu * ru);
            for i in lo..hi {
                let n = y + 1 + i;
                let p = &pts[i as usize];
                let (j, q) = (p.t as usize, p.state);
                let m = (n % m_mod) as usize;
                add_nonzero(&mut a.s0, tau_vals[j * states + q].mul(&p.g));
                add_nonzero(&mut a.s1[j * states + q], p.g.clone());
                add_nonzero(&mut a.s2[m * nu + j], p.g.clone());
                if p.state != p.state_mod_m {
                    a.sync += 1;
                    add_nonzero(&mut a.e1[j * states + p.state], p.g.clone());
                    add_nonzero(&mut a.e1[j * states + p.state_mod_m], p.g.neg());
                }
                for t in 0..n_ord {
                    add_nonzero(&mut a.s3[m * nu + t as usize], p.g.mul_phase(chi(t, p.t)));
                }
                let mp = (n % big) as usize;
                for r in 0..r_cnt {
                    let p2 = &pts[(i + r * m_mod) as usize];
                    let prod = p.g.mul(&p2.g.conj());
                    let diff = (p.t + n_ord - p2.t) % n_ord;
                    let diff_trunc = (p.t_trunc + n_ord - p2.t_trunc) % n_ord;
                    if diff != diff_trunc {
                        a.carry += 1;
                    }
                    for t in 0..n_ord {
                        let idx = (m * nu + t as usize) * ru + r as usize;
                        add_nonzero(&mut a.s4[idx], prod.mul_phase(chi(t, diff)));
                        if diff != diff_trunc {
                            add_nonzero(&mut a.e4[idx], prod.mul_phase(chi(t, diff)));
                            add_nonzero(&mut a.e4[idx], prod.mul_phase(chi(t, diff_trunc)).neg());
                        }
                    }
                    add_nonzero(&mut a.s5[mp * ru + r as usize], prod);
                }
            }
            a
        },
        |acc, part| acc.merge(part),
    );

    let mut rows = Vec::new();
    rows.push(StageRow::new("S0", String::new(), &acc.s0));

    // S0 from S1
    let mut rebuilt = Total::zero();
    for j in 0..nu {
        for q in 0..states {
            let s1 = &acc.s1[j * states + q];
            rows.push(StageRow::new("S1", format!("sigma={};q={q}", phase_label(j as u64, n_ord)), s1));
            rebuilt.merge(s1.mul_scalar(&tau_vals[j * states + q]));
        }
    }
    let s0_from_s1 = same(&acc.s0, &rebuilt);

    // S1 from S2 plus the sync-failure error
    let state_of_m: Vec<usize> = (0..m_mod).map(|m| tr.run(q0, m).1).collect();
    let mut s1_from_s2 = true;
    for j in 0..nu {
        for q in 0..states {
            let mut rhs = acc.e1[j * states + q].clone();
            for (m, _) in state_of_m.iter().enumerate().take(mu).filter(|&(_, &s)| s == q) {
                rhs.merge(acc.s2[m * nu + j].clone());
            }
            s1_from_s2 &= same(&acc.s1[j * states + q], &rhs);
            rows.push(StageRow::new("E1", format!("sigma={};q={q}", phase_label(j as u64, n_ord)), &acc.e1[j * states + q]));
        }
    }
    for m in 0..mu {
        for j in 0..nu {
            rows.push(StageRow::new("S2", format!("m={m};sigma={}", phase_label(j as u64, n_ord)), &acc.s2[m * nu + j]));
        }
    }

    // S3 from S2, and the inequality on each residue class
    let mut s3_from_s2 = true;
    for m in 0..mu {
        for t in 0..n_ord {
            let mut rhs = Total::zero();
            for j in 0..n_ord {
                rhs.merge(acc.s2[m * nu + j as usize].mul_scalar(&Scalar::unit(chi(t, j))));
            }
            let s3 = &acc.s3[m * nu + t as usize];
            s3_from_s2 &= same(s3, &rhs);
            rows.push(StageRow::new("S3", format!("m={m};t={t}"), s3));
        }
    }
    let classes: Vec<(u64, u64)> = (0..m_mod).flat_map(|m| (0..n_ord).map(move |t| (m, t))).collect();
    let vdc = map_collect(classes, |(m, t)| {
        let first = (0..m_mod).map(|i| y + 1 + i).find(|n| n % m_mod == m).unwrap();
        let z: Vec<Complex64> = (first..=y + x)
            .step_by(m_mod as usize)
            .map(|n| {
                let p = &pts[(n - y - 1) as usize];
                p.g.mul_phase(chi(t, p.t)).to_complex()
            })
            .collect();
        vdc_inequality_check_scalar(&z, r_cnt as f64, 1)
    });
    let mut vdc_holds = true;
    let mut vdc_min_slack = f64::INFINITY;
    for res in vdc {
        let res = res?;
        vdc_holds &= res.holds;
        vdc_min_slack = vdc_min_slack.min(res.slack);
    }

    // S4 from S5 plus the carry error
    let t_big: Vec<u64> = (0..big).map(|n| tr.t(n).numerator_over(n_ord)).collect();
    let mut s4_from_s5 = true;
    for m in 0..m_mod {
        for t in 0..n_ord {
            for r in 0..r_cnt {
                let idx = ((m as usize) * nu + t as usize) * ru + r as usize;
                let mut rhs = acc.e4[idx].clone();
                for mp in (m..big).step_by(mu) {
                    let shifted = (mp + r * m_mod) % big;
                    let w = chi(t, (t_big[mp as usize] + n_ord - t_big[shifted as usize]) % n_ord);
                    rhs.merge(acc.s5[mp as usize * ru + r as usize].mul_scalar(&Scalar::unit(w)));
                }
                s4_from_s5 &= same(&acc.s4[idx], &rhs);
                rows.push(StageRow::new("S4", format!("m={m};t={t};r={r}"), &acc.s4[idx]));
                rows.push(StageRow::new("E4", format!("m={m};t={t};r={r}"), &acc.e4[idx]));
            }
        }
    }

    let mut s5_is_u = true;
    let mut s5_abs = vec![0.0; mu];
    for mp in 0..big {
        for r in 0..r_cnt {
            let s5 = &acc.s5[mp as usize * ru + r as usize];
            let u = correlation_u(&g, x, y, r * m_mod, big, mp)?;
            s5_is_u &= same(s5, &u);
            s5_abs[(mp % m_mod) as usize] += s5.abs();
            rows.push(StageRow::new("S5", format!("m'={mp};r={r}"), s5));
        }
    }

    let eta_fit = fit_eta(tr.automaton(), y, x)?;
    let xf = x as f64;
    let sync_term = eta_fit.map_or(0.0, |eta| xf * (m_mod as f64).powf(-eta));
    let vdc_term: f64 = s5_abs.iter().map(|s| (xf / (r_cnt * m_mod) as f64 * s).sqrt()).sum();
    let s0 = acc.s0.to_complex();

    Ok(WeylReport {
        config: cfg,
        m: m_mod,
        r: r_cnt,
        group_order: n_ord,
        s0_re: s0.re,
        s0_im: s0.im,
        s0_abs: s0.norm(),
        s0: acc.s0,
        exact,
        s0_from_s1,
        s1_from_s2,
        s3_from_s2,
        s4_from_s5,
        s5_is_u,
        vdc_holds,
        vdc_min_slack,
        sync_failures: acc.sync,
        carry_failures: acc.carry,
        eta_fit,
        comparator: sync_term + vdc_term,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::builtin;
    use crate::modring::{EqEvaluator, FactoredModulus};

    fn even(sigma: Phase, _q: usize) -> Scalar {
        if sigma.is_zero() {
            Scalar::one()
        } else {
            Scalar::zero()
        }
    }

    #[test]
    fn thue_morse_count() {
        let tm = ScalarTransducer::builtin("thue_morse").unwrap();
        let d = builtin("thue_morse_even").unwrap();
        for (l1, l2) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
            let cfg = WeylConfig { y: 13, x: 2000, lambda1: l1, lambda2: l2 };
            let rep = decompose_weyl(&tm, even, |_| Scalar::one(), cfg).unwrap();
            assert!(rep.exact && rep.all_identities_hold(), "{l1} {l2}");
            let want = (14..=2013u64).filter(|&n| d.evaluate(n) == Scalar::one()).count() as f64;
            assert!((rep.s0_re - want).abs() < 1e-9);
            assert_eq!(rep.sync_failures, 0);
            assert_eq!(rep.eta_fit, None);
        }
    }

    #[test]
    fn rudin_shapiro_twisted() {
        let rs = ScalarTransducer::builtin("rudin_shapiro").unwrap();
        let q = FactoredModulus::new(1009).unwrap();
        let f = "1/X".parse().unwrap();
        let ev = EqEvaluator::new(&f, &q).unwrap();
        let g = |n: u64| ev.eval(n as i128).map_or(Scalar::zero(), Scalar::unit);
        let cfg = WeylConfig { y: 0, x: 3000, lambda1: 2, lambda2: 1 };
        let rep = decompose_weyl(&rs, |s: Phase, _| Scalar::unit(s), g, cfg).unwrap();
        assert!(rep.exact && rep.all_identities_hold());
        // from q0 the state is the last digit, which truncation keeps
        assert_eq!(rep.sync_failures, 0);
        assert!(rep.carry_failures > 0);
        let eta = rep.eta_fit.unwrap();
        assert!(eta > 0.5 && eta < 1.5, "{eta}");
        let csv = rep.stage_csv().unwrap();
        assert!(csv.starts_with("stage,index,re,im,abs\n"));
    }

    #[test]
    fn sync_error_term() {
        let w = vec![vec![Phase::ZERO, Phase::HALF]; 3];
        let tr = ScalarTransducer::new(builtin("block_11").unwrap(), w).unwrap();
        let tau = |s: Phase, q: usize| Scalar::unit(s).mul(&Scalar::integer(q as i64 + 1));
        let cfg = WeylConfig { y: 100, x: 1500, lambda1: 1, lambda2: 1 };
        let rep = decompose_weyl(&tr, tau, |n| Scalar::unit(Phase::new(n as i128 * n as i128, 7)), cfg).unwrap();
        assert!(rep.exact && rep.all_identities_hold());
        assert!(rep.sync_failures > 0);
        assert!(rep.rows.iter().any(|r| r.stage == "E1" && r.abs > 0.0));
        assert!(rep.eta_fit.is_some() && rep.comparator > 0.0);
    }

    #[test]
    fn float_values() {
        let tm = ScalarTransducer::builtin("thue_morse").unwrap();
        let g = |n: u64| Scalar::Float(Complex64::from_polar(1.0, (n as f64).sqrt()));
        let cfg = WeylConfig { y: 5, x: 800, lambda1: 1, lambda2: 1 };
        let rep = decompose_weyl(&tm, |s: Phase, _| Scalar::unit(s), g, cfg).unwrap();
        assert!(!rep.exact && rep.all_identities_hold());
    }

    #[test]
    fn block_precondition() {
        let tm = ScalarTransducer::builtin("thue_morse").unwrap();
        let cfg = WeylConfig { y: 0, x: 100, lambda1: 2, lambda2: 1 };
        assert!(matches!(decompose_weyl(&tm, even, |_| Scalar::one(), cfg), Err(Error::Precondition(_))));
    }
}
