//! The value `e_q(f(n))` of a rational function modulo an arbitrary modulus,
//! built from prime-power local factors, plus the prime sets derived from `f`.

use num_integer::Integer;
use num_traits::Zero;

use super::arith::{mod_inverse, mul_mod};
use super::modulus::FactoredModulus;
use super::poly::FpPoly;
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::exact::{Phase, Scalar};

/// True iff the content of the denominator is coprime to `q`.
pub fn is_well_defined(f: &RationalFunction, q: &FactoredModulus) -> bool {
    let content = f.denominator().content();
    q.primes().all(|p| !(&content % p).is_zero())
}

fn horner(coeffs: &[u64], x: u64, m: u64) -> u64 {
    coeffs.iter().rev().fold(0u64, |acc, &c| {
        let t = mul_mod(acc, x, m) as u128 + c as u128;
        (t % m as u128) as u64
    })
}

#[derive(Clone, Debug)]
struct Local {
    p: u64,
    pe: u64,
    /// Inverse of `q / p^nu` modulo `p^nu`.
    twist: u64,
    cofactor: u64,
    num: Vec<u64>,
    den: Vec<u64>,
}

/// Precomputed evaluator for `n -> e_q(f(n))`.
///
/// Values are `None` at poles (the zero value) and otherwise an exact phase
/// with denominator dividing `q`.
#[derive(Clone, Debug)]
pub struct EqEvaluator {
    q: u64,
    locals: Vec<Local>,
    num_q: Vec<u64>,
    den_q: Vec<u64>,
}

impl EqEvaluator {
    pub fn new(f: &RationalFunction, q: &FactoredModulus) -> Result<Self> {
        if !is_well_defined(f, q) {
            return Err(Error::NotWellDefined { f: f.to_string(), q: q.value() });
        }
        let qv = q.value();
        let locals = q
            .prime_powers()
            .map(|(p, pe)| {
                let cofactor = qv / pe;
                Ok(Local {
                    p,
                    pe,
                    twist: mod_inverse(cofactor as i128, pe)?,
                    cofactor,
                    num: f.numerator().residues(pe),
                    den: f.denominator().residues(pe),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EqEvaluator { q: qv, locals, num_q: f.numerator().residues(qv), den_q: f.denominator().residues(qv) })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Numerator `A` of the phase `A/q`, via the product of local factors.
    pub fn residue(&self, n: i128) -> Option<u64> {
        let mut acc: u128 = 0;
        for l in &self.locals {
            let x = n.rem_euclid(l.pe as i128) as u64;
            let qn = horner(&l.den, x, l.pe);
            if qn.is_multiple_of(l.p) {
                return None;
            }
            let pn = horner(&l.num, x, l.pe);
            let inv = mod_inverse(qn as i128, l.pe).expect("unit modulo p^nu");
            let local = mul_mod(mul_mod(l.twist, pn, l.pe), inv, l.pe);
            acc = (acc + local as u128 * l.cofactor as u128) % self.q as u128;
        }
        Some(acc as u64)
    }

    /// `P(n) * Q(n)^{-1} mod q` computed directly, `None` if `gcd(Q(n), q) > 1`.
    pub fn residue_direct(&self, n: i128) -> Option<u64> {
        if self.q == 1 {
            return Some(0);
        }
        let x = n.rem_euclid(self.q as i128) as u64;
        let qn = horner(&self.den_q, x, self.q);
        if qn.gcd(&self.q) != 1 {
            return None;
        }
        let pn = horner(&self.num_q, x, self.q);
        Some(mul_mod(pn, mod_inverse(qn as i128, self.q).ok()?, self.q))
    }

    pub fn eval(&self, n: i128) -> Option<Phase> {
        self.residue(n).map(|a| Phase::from_residue(a, self.q))
    }

    pub fn eval_direct(&self, n: i128) -> Option<Phase> {
        self.residue_direct(n).map(|a| Phase::from_residue(a, self.q))
    }

    pub fn eval_scalar(&self, n: i128) -> Scalar {
        self.eval(n).map_or_else(Scalar::zero, Scalar::unit)
    }
}

/// One-shot `e_q(f(n))`; `None` is the zero value at a pole.
pub fn eval_eq(f: &RationalFunction, q: &FactoredModulus, n: i128) -> Result<Option<Phase>> {
    Ok(EqEvaluator::new(f, q)?.eval(n))
}

/// Whether `deg P1` must equal 2 or may be any value up to 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize)]
pub enum QfMode {
    #[default]
    AtMostQuadratic,
    ExactlyQuadratic,
}

/// `P/Q` over `F_p` after cancelling the gcd.
fn reduce_mod_p(f: &RationalFunction, p: u64) -> Result<(FpPoly, FpPoly)> {
    let num = f.numerator().mod_p(p);
    let den = f.denominator().mod_p(p);
    if den.is_zero() {
        return Err(Error::Domain(format!("denominator of {f} vanishes identically mod {p}")));
    }
    if num.is_zero() {
        return Ok((num, FpPoly::new(vec![1], p)));
    }
    let g = num.gcd(&den);
    Ok((num.div_rem(&g).0, den.div_rem(&g).0))
}

/// Membership of the prime `p` in `Q_f`: `f` reduces mod `p` to a polynomial
/// of degree at most (or exactly) two.
pub fn is_in_qf(f: &RationalFunction, p: u64, mode: QfMode) -> Result<bool> {
    let (num, den) = reduce_mod_p(f, p)?;
    if den.degree() != Some(0) {
        return Ok(false);
    }
    let d = num.degree().unwrap_or(0);
    Ok(match mode {
        QfMode::AtMostQuadratic => d <= 2,
        QfMode::ExactlyQuadratic => d == 2,
    })
}

/// Product of the primes `p` with `p || q`, `p` not dividing `k` and `p` outside `Q_f`.
pub fn q1_of(f: &RationalFunction, q: &FactoredModulus, k: u64, mode: QfMode) -> Result<u64> {
    if !is_well_defined(f, q) {
        return Err(Error::NotWellDefined { f: f.to_string(), q: q.value() });
    }
    let mut out = 1u64;
    for &(p, e) in q.factors() {
        if e == 1 && !k.is_multiple_of(p) && !is_in_qf(f, p, mode)? {
            out *= p;
        }
    }
    Ok(out)
}

/// `(q, g)` for a rational `g` and squarefree `q`: the product of primes
/// `p | q` at which `g` vanishes identically.
pub fn rational_gcd(q: &FactoredModulus, g: &RationalFunction) -> Result<u64> {
    if !q.is_squarefree() {
        return Err(Error::Precondition(format!("{q} is not squarefree")));
    }
    let mut out = 1u64;
    for p in q.primes() {
        if g.denominator().mod_p(p).is_zero() {
            return Err(Error::Domain(format!("denominator of {g} vanishes identically mod {p}")));
        }
        if g.numerator().mod_p(p).is_zero() {
            out *= p;
        }
    }
    Ok(out)
}
