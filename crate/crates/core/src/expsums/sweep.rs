use serde::Serialize;

use super::{weighted_sum, IntervalProgression};
use crate::automata::Dfao;
use crate::error::{Error, Result};
use crate::modring::{q1_of, FactoredModulus, QfMode, RationalFunction};

/// Where each interval starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum YPolicy {
    Fixed(u64),
    /// `y = c q`.
    MultipleOfQ(u64),
}

impl YPolicy {
    pub fn y_for(self, q: u64) -> Result<u64> {
        match self {
            YPolicy::Fixed(y) => Ok(y),
            YPolicy::MultipleOfQ(c) => c.checked_mul(q).ok_or_else(|| Error::Range("y overflows".into())),
        }
    }
}

/// Smallest integer `x >= q^theta`.
pub fn x_for_theta(q: u64, theta: f64) -> u64 {
    let t = (q as f64).powf(theta);
    let mut x = t.ceil() as u64;
    // guard against powf landing a hair above an exact integer
    if x > 1 && ((x - 1) as f64) >= t {
        x -= 1;
    }
    x.max(1)
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub q: u64,
    pub y: u64,
    pub x: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub normalizer: f64,
    pub ratio: f64,
    pub q1: u64,
    /// `(1/q1 + q^2/(q1 x^2))^c`.
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepMeta {
    pub f: String,
    pub automaton: String,
    pub theta: f64,
    pub exponent_c: f64,
    pub y_policy: YPolicy,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub meta: SweepMeta,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub fn to_csv(&self) -> Result<String> {
        crate::report::to_csv(&self.rows)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }
}

/// `|sum_{y < n <= y + x} a_n e_q(f(n))| / x` with `x = ceil(q^theta)` for each `q`.
pub fn pv_range_scan(
    d: &Dfao,
    automaton_name: &str,
    f: &RationalFunction,
    qs: &[u64],
    theta: f64,
    y_policy: YPolicy,
    exponent_c: f64,
) -> Result<SweepReport> {
    let mut rows = Vec::with_capacity(qs.len());
    for &q in qs {
        let fq = FactoredModulus::new(q)?;
        let x = x_for_theta(q, theta);
        let y = y_policy.y_for(q)?;
        let sum = weighted_sum(d, f, &fq, &IntervalProgression::interval(y, x)?)?.to_complex();
        let q1 = q1_of(f, &fq, d.base() as u64, QfMode::AtMostQuadratic)?;
        let (qf, xf, q1f) = (q as f64, x as f64, q1 as f64);
        rows.push(SweepRow {
            q,
            y,
            x,
            re: sum.re,
            im: sum.im,
            abs: sum.norm(),
            normalizer: xf,
            ratio: sum.norm() / xf,
            q1,
            bound: (1.0 / q1f + qf * qf / (q1f * xf * xf)).powf(exponent_c),
        });
    }
    rows.sort_by_key(|r| (r.q, r.y));
    Ok(SweepReport {
        meta: SweepMeta {
            f: f.to_string(),
            automaton: automaton_name.to_string(),
            theta,
            exponent_c,
            y_policy,
        },
        rows,
    })
}
