//! Complete and incomplete sums of `e_q(f(n))`, correlations and differences.

mod checks;
mod sweep;

pub use checks::{
    check_gcd_lemma, check_quadratic_geometric, check_weil, GcdLemmaReport, GcdViolation, QuadraticRow, WeilRow,
};
pub use sweep::{pv_range_scan, x_for_theta, SweepReport, SweepRow, YPolicy};

use serde::Serialize;

use crate::automata::Dfao;
use crate::error::{Error, Result};
use crate::exact::{Cyclotomic, Scalar, Total};
use crate::modring::{EqEvaluator, FactoredModulus, RationalFunction};
use crate::parallel::{fold_chunks, map_chunks, CHUNK};

/// `{n : y < n <= y + x, n = a mod s}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IntervalProgression {
    pub y: u64,
    pub x: u64,
    pub s: u64,
    pub a: u64,
}

impl IntervalProgression {
    pub fn new(y: u64, x: u64, s: u64, a: u64) -> Result<Self> {
        if s == 0 {
            return Err(Error::Domain("progression modulus must be at least 1".into()));
        }
        if a >= s {
            return Err(Error::Domain(format!("residue {a} not in [0, {s})")));
        }
        y.checked_add(x).ok_or_else(|| Error::Range("y + x overflows".into()))?;
        Ok(IntervalProgression { y, x, s, a })
    }

    /// The whole interval `(y, y + x]`.
    pub fn interval(y: u64, x: u64) -> Result<Self> {
        Self::new(y, x, 1, 0)
    }

    pub fn contains(&self, n: u64) -> bool {
        n > self.y && n <= self.y + self.x && n % self.s == self.a
    }

    /// `floor((y + x - a)/s) - floor((y - a)/s)`.
    pub fn cardinality(&self) -> u64 {
        let fl = |t: i128| t.div_euclid(self.s as i128);
        let (y, x, a) = (self.y as i128, self.x as i128, self.a as i128);
        (fl(y + x - a) - fl(y - a)) as u64
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<u64> {
        let lo = self.y + 1;
        let n = lo + (self.a + self.s - lo % self.s) % self.s;
        (n <= self.y + self.x).then_some(n)
    }

    /// The `j`-th member, `0 <= j < cardinality()`.
    pub fn nth(&self, j: u64) -> u64 {
        self.first().expect("non-empty progression") + j * self.s
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        let first = self.first();
        (0..self.cardinality()).map(move |j| first.unwrap() + j * self.s)
    }
}

/// `sum_{n in region} term(n)`, partitioned in fixed chunks.
pub fn progression_sum<F>(region: &IntervalProgression, term: F) -> Total
where
    F: Fn(u64) -> Scalar + Send + Sync,
{
    let count = region.cardinality();
    if count == 0 {
        return Total::zero();
    }
    let first = region.first().unwrap();
    let s = region.s;
    fold_chunks(
        0,
        count,
        CHUNK,
        Total::zero(),
        |lo, hi| {
            let mut t = Total::zero();
            for j in lo..hi {
                let v = term(first + j * s);
                if !v.is_zero() {
                    t.add_owned(v);
                }
            }
            t
        },
        |acc, part| acc.merge(part),
    )
}

/// `sum_{n mod q} e_q(f(n))`, exact.
pub fn complete_sum(f: &RationalFunction, q: &FactoredModulus) -> Result<Total> {
    let ev = EqEvaluator::new(f, q)?;
    let qv = ev.modulus();
    let parts = map_chunks(0, qv, CHUNK, |lo, hi| {
        (lo..hi).filter_map(|n| ev.residue(n as i128)).collect::<Vec<u64>>()
    });
    let mut counts = vec![0u64; qv as usize];
    for a in parts.into_iter().flatten() {
        counts[a as usize] += 1;
    }
    Ok(Total::from_cyclotomic(Cyclotomic::from_histogram(&counts, qv)))
}

/// `sum_{n in region} a_n e_q(f(n))`.
pub fn weighted_sum(d: &Dfao, f: &RationalFunction, q: &FactoredModulus, region: &IntervalProgression) -> Result<Total> {
    let ev = EqEvaluator::new(f, q)?;
    Ok(progression_sum(region, |n| {
        let a = d.evaluate(n);
        if a.is_zero() {
            return a;
        }
        match ev.eval(n as i128) {
            Some(ph) => a.mul_phase(ph),
            None => Scalar::zero(),
        }
    }))
}

/// `U(x, y; h; q, a) = sum_{y < n <= y + x, n = a mod q} g(n) conj(g(n + h))`.
pub fn correlation_u<G>(g: G, x: u64, y: u64, h: u64, q: u64, a: u64) -> Result<Total>
where
    G: Fn(u64) -> Scalar + Send + Sync,
{
    let region = IntervalProgression::new(y, x, q, a % q.max(1))?;
    Ok(progression_sum(&region, |n| g(n).mul(&g(n + h).conj())))
}

/// `f(X + r) - f(X)` in reduced form.
pub fn difference_fraction(f: &RationalFunction, r: i64) -> Result<RationalFunction> {
    f.shift_scale(0, 1, r)
}

/// `sum_{n in region} e_q(f(n + r) - f(n))` through the symbolic difference.
pub fn difference_sum(f: &RationalFunction, q: &FactoredModulus, r: i64, region: &IntervalProgression) -> Result<Total> {
    let diff = difference_fraction(f, r)?;
    let ev = EqEvaluator::new(&diff, q)?;
    Ok(progression_sum(region, |n| ev.eval_scalar(n as i128)))
}

/// `sum_{n in region} e_q(f(n + r)) conj(e_q(f(n)))`, zero wherever either factor is.
pub fn difference_sum_pointwise(
    f: &RationalFunction,
    q: &FactoredModulus,
    r: i64,
    region: &IntervalProgression,
) -> Result<Total> {
    let ev = EqEvaluator::new(f, q)?;
    Ok(progression_sum(region, |n| {
        let n = n as i128;
        match (ev.eval(n + r as i128), ev.eval(n)) {
            (Some(a), Some(b)) => Scalar::unit(a - b),
            _ => Scalar::zero(),
        }
    }))
}

/// Counts `(checked, mismatches)` over points where neither `n` nor `n + r` is a
/// pole of `f`, comparing the symbolic difference with the pointwise product.
pub fn difference_agreement(
    f: &RationalFunction,
    q: &FactoredModulus,
    r: i64,
    region: &IntervalProgression,
) -> Result<(u64, u64)> {
    let ev = EqEvaluator::new(f, q)?;
    let dv = EqEvaluator::new(&difference_fraction(f, r)?, q)?;
    let mut checked = 0;
    let mut bad = 0;
    for n in region.iter() {
        let n = n as i128;
        if let (Some(a), Some(b)) = (ev.eval(n + r as i128), ev.eval(n)) {
            checked += 1;
            if dv.eval(n) != Some(a - b) {
                bad += 1;
            }
        }
    }
    Ok((checked, bad))
}
