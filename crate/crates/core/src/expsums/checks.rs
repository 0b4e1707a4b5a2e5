use num_bigint::BigInt;
use serde::Serialize;

use super::{complete_sum, difference_sum, IntervalProgression};
use crate::error::{Error, Result};
use crate::exact::Phase;
use crate::modring::{
    arith::mul_mod, is_in_qf, mod_inverse, rational_gcd, FactoredModulus, IntPoly, QfMode, RationalFunction,
};

#[derive(Clone, Debug, Serialize)]
pub struct WeilRow {
    pub f: String,
    pub q: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    /// `(q, f')`.
    pub gcd: u64,
    /// `sqrt(q (q, f'))`.
    pub comparator: f64,
    pub ratio: f64,
}

/// `|sum_{n mod q} e_q(f(n))|` against `sqrt(q (q, f'))` for squarefree `q`.
pub fn check_weil(f: &RationalFunction, q: &FactoredModulus) -> Result<WeilRow> {
    if !q.is_squarefree() {
        return Err(Error::Precondition(format!("{q} is not squarefree")));
    }
    let sum = complete_sum(f, q)?.to_complex();
    let gcd = rational_gcd(q, &f.derivative())?;
    let comparator = (q.value() as f64 * gcd as f64).sqrt();
    Ok(WeilRow {
        f: f.to_string(),
        q: q.value(),
        re: sum.re,
        im: sum.im,
        abs: sum.norm(),
        gcd,
        comparator,
        ratio: sum.norm() / comparator,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GcdViolation {
    pub p: u64,
    pub gcd: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GcdLemmaReport {
    pub f: String,
    pub r: i64,
    pub l: i64,
    /// Primes at or below this bound may legitimately have a nontrivial gcd.
    pub degree_bound: u64,
    pub checked: Vec<u64>,
    /// Primes excluded by the side conditions, with the reason.
    pub exempt: Vec<(u64, &'static str)>,
    /// Nontrivial gcds at primes not above the degree bound.
    pub small_primes: Vec<GcdViolation>,
    pub violations: Vec<GcdViolation>,
}

/// For each prime `p` meeting the side conditions (`p` outside `Q_f`, `p` not
/// dividing `2r`, denominator nonzero mod `p`), computes
/// `(p, f'(X + r) - f'(X) + l)` and records every `p` above the degree bound
/// where it is not 1.
pub fn check_gcd_lemma(f: &RationalFunction, r: i64, l: i64, primes: &[u64]) -> Result<GcdLemmaReport> {
    if f.polynomial_degree().is_some_and(|d| d <= 2) {
        return Err(Error::Precondition(format!("{f} is a polynomial of degree at most 2")));
    }
    let g = f
        .derivative()
        .shift_scale(0, 1, r)?
        .add(&RationalFunction::constant(BigInt::from(l)));
    let degree_bound = f.total_degree() as u64;
    let mut report = GcdLemmaReport {
        f: f.to_string(),
        r,
        l,
        degree_bound,
        checked: Vec::new(),
        exempt: Vec::new(),
        small_primes: Vec::new(),
        violations: Vec::new(),
    };
    for &p in primes {
        if f.denominator().mod_p(p).is_zero() {
            report.exempt.push((p, "denominator vanishes"));
            continue;
        }
        if (2 * r as i128).rem_euclid(p as i128) == 0 {
            report.exempt.push((p, "p divides 2r"));
            continue;
        }
        if is_in_qf(f, p, QfMode::AtMostQuadratic)? {
            report.exempt.push((p, "p in Q_f"));
            continue;
        }
        let gcd = rational_gcd(&FactoredModulus::new(p)?, &g)?;
        report.checked.push(p);
        if gcd != 1 {
            let v = GcdViolation { p, gcd };
            if p <= degree_bound {
                report.small_primes.push(v);
            } else {
                report.violations.push(v);
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadraticRow {
    pub u: i64,
    pub v: i64,
    pub q: u64,
    pub r: i64,
    pub s: u64,
    pub a: u64,
    pub y: u64,
    pub x: u64,
    pub lhs: f64,
    /// `1 / ||2 u v^{-1} r s / q||`, absent when the phase is an integer.
    pub geometric: Option<f64>,
    pub comparator: f64,
    pub holds: bool,
}

/// `|sum e_q(f(n + r) - f(n))|` for `f = (u/v) X^2` against
/// `min(x/s + 1, ||2 u v^{-1} r s / q||^{-1})`.
#[allow(clippy::too_many_arguments)]
pub fn check_quadratic_geometric(
    u: i64,
    v: i64,
    q: &FactoredModulus,
    r: i64,
    s: u64,
    a: u64,
    y: u64,
    x: u64,
) -> Result<QuadraticRow> {
    if v <= 0 {
        return Err(Error::Precondition("v must be positive".into()));
    }
    let uq = BigInt::from(u) * BigInt::from(q.value());
    if num_integer::Integer::gcd(&uq, &BigInt::from(v)) != BigInt::from(1) {
        return Err(Error::Precondition(format!("gcd(u q, v) != 1 for u = {u}, v = {v}, q = {q}")));
    }
    let f = RationalFunction::reduce(IntPoly::monomial(BigInt::from(u), 2), IntPoly::constant(BigInt::from(v)))?;
    let region = IntervalProgression::new(y, x, s, a)?;
    let lhs = difference_sum(&f, q, r, &region)?.abs();

    let qv = q.value();
    let vinv = mod_inverse(v as i128, qv)?;
    let red = |t: i128| t.rem_euclid(qv as i128) as u64;
    let step = [red(2 * u as i128), vinv, red(r as i128), s % qv].into_iter().fold(1 % qv, |acc, t| mul_mod(acc, t, qv));
    let theta = Phase::from_residue(step, qv);
    let (dn, dd) = theta.dist_to_int();
    let geometric = (dn != 0).then(|| dd as f64 / dn as f64);
    let trivial = x as f64 / s as f64 + 1.0;
    let comparator = geometric.map_or(trivial, |g| g.min(trivial));
    Ok(QuadraticRow {
        u,
        v,
        q: qv,
        r,
        s,
        a,
        y,
        x,
        lhs,
        geometric,
        comparator,
        holds: lhs <= comparator * (1.0 + 1e-9),
    })
}
