use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::poly::IntPoly;
use crate::error::{Error, Result};

/// Reduced rational function `P/Q` over the integers.
///
/// Invariants: `P` and `Q` share no non-constant factor and no common integer
/// content; `Q` is nonzero with positive leading coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: IntPoly,
    den: IntPoly,
}

impl RationalFunction {
    /// Cancels the polynomial gcd and integer content of `p/q`, then normalizes
    /// the sign so the denominator has positive leading coefficient.
    pub fn reduce(p: IntPoly, q: IntPoly) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if p.is_zero() {
            return Ok(RationalFunction { num: IntPoly::zero(), den: IntPoly::one() });
        }
        let g = p.gcd_primitive(&q);
        let (mut p, mut q) = if g.is_constant() { (p, q) } else { (p.div_exact(&g), q.div_exact(&g)) };
        let c = p.content().gcd(&q.content());
        if !c.is_one() {
            p = p.div_scalar(&c);
            q = q.div_scalar(&c);
        }
        if q.leading().is_some_and(|l| l.is_negative()) {
            p = -&p;
            q = -&q;
        }
        Ok(RationalFunction { num: p, den: q })
    }

    pub fn from_poly(p: IntPoly) -> Self {
        RationalFunction { num: p, den: IntPoly::one() }
    }

    pub fn constant(c: BigInt) -> Self {
        Self::from_poly(IntPoly::constant(c))
    }

    /// `c/d` as a constant rational function.
    pub fn constant_ratio(c: BigInt, d: BigInt) -> Result<Self> {
        Self::reduce(IntPoly::constant(c), IntPoly::constant(d))
    }

    pub fn x() -> Self {
        Self::from_poly(IntPoly::x())
    }

    pub fn numerator(&self) -> &IntPoly {
        &self.num
    }

    pub fn denominator(&self) -> &IntPoly {
        &self.den
    }

    pub fn total_degree(&self) -> usize {
        self.num.degree_or_zero() + self.den.degree_or_zero()
    }

    /// True when the denominator is a nonzero integer constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Degree when `self` is a polynomial over `Q`.
    pub fn polynomial_degree(&self) -> Option<usize> {
        if self.is_polynomial() {
            Some(self.num.degree_or_zero())
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, rhs: &RationalFunction) -> RationalFunction {
        let p = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let q = &self.den * &rhs.den;
        Self::reduce(p, q).expect("product of nonzero denominators")
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, rhs: &RationalFunction) -> RationalFunction {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &RationalFunction) -> RationalFunction {
        Self::reduce(&self.num * &rhs.num, &self.den * &rhs.den).expect("product of nonzero denominators")
    }

    pub fn div(&self, rhs: &RationalFunction) -> Result<RationalFunction> {
        Self::reduce(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn pow(&self, e: u32) -> RationalFunction {
        (0..e).fold(Self::constant(BigInt::one()), |acc, _| acc.mul(self))
    }

    /// Quotient rule, then reduce.
    pub fn derivative(&self) -> RationalFunction {
        let p = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let q = &self.den * &self.den;
        Self::reduce(p, q).expect("square of a nonzero denominator")
    }

    /// `f(a + sX)`.
    pub fn compose_linear(&self, a: &BigInt, s: &BigInt) -> Result<RationalFunction> {
        Self::reduce(self.num.compose_linear(a, s), self.den.compose_linear(a, s))
    }

    /// `f(a + sX + r) - f(a + sX)`.
    pub fn shift_scale(&self, a: i64, s: i64, r: i64) -> Result<RationalFunction> {
        let a = BigInt::from(a);
        let s = BigInt::from(s);
        let shifted = self.compose_linear(&(&a + BigInt::from(r)), &s)?;
        let base = self.compose_linear(&a, &s)?;
        Ok(shifted.sub(&base))
    }

    /// `f + l X`.
    pub fn add_linear(&self, l: i64) -> RationalFunction {
        self.add(&Self::from_poly(IntPoly::from_i64(&[0, l])))
    }

    /// Exact value at an integer, `None` at a pole.
    pub fn eval(&self, n: &BigInt) -> Option<num_rational::BigRational> {
        let d = self.den.eval(n);
        if d.is_zero() {
            None
        } else {
            Some(num_rational::BigRational::new(self.num.eval(n), d))
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |p: &IntPoly| {
            let s = p.to_string();
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() <= 1 {
                s
            } else {
                format!("({s})")
            }
        };
        if self.den.is_constant() && self.den.leading().is_some_and(One::is_one) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

impl FromStr for RationalFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        super::parse::parse_rational_function(s)
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rf(p: &[i64], q: &[i64]) -> RationalFunction {
        RationalFunction::reduce(IntPoly::from_i64(p), IntPoly::from_i64(q)).unwrap()
    }

    #[test]
    fn reduce_examples() {
        // (X^2+X)/X -> X+1
        let f = rf(&[0, 1, 1], &[0, 1]);
        assert_eq!(f.numerator(), &IntPoly::from_i64(&[1, 1]));
        assert_eq!(f.denominator(), &IntPoly::one());
        // 2/(4X) -> 1/(2X)
        let f = rf(&[2], &[0, 4]);
        assert_eq!(f.numerator(), &IntPoly::one());
        assert_eq!(f.denominator(), &IntPoly::from_i64(&[0, 2]));
        // 1/X unchanged
        let f = rf(&[1], &[0, 1]);
        assert_eq!(f.to_string(), "1/X");
        // sign normalization
        let f = rf(&[1], &[0, -3]);
        assert_eq!(f.to_string(), "-1/3X");
        assert!(matches!(
            RationalFunction::reduce(IntPoly::one(), IntPoly::zero()),
            Err(Error::ZeroDenominator)
        ));
    }

    #[test]
    fn reduce_is_idempotent() {
        let f = rf(&[6, 0, -6], &[4, 4]);
        let g = RationalFunction::reduce(f.numerator().clone(), f.denominator().clone()).unwrap();
        assert_eq!(f, g);
        assert_eq!(f.to_string(), "(-3X + 3)/2");
    }

    #[test]
    fn calculus_examples() {
        let inv = rf(&[1], &[0, 1]);
        assert_eq!(inv.derivative(), rf(&[-1], &[0, 0, 1]));
        let sq = rf(&[0, 0, 1], &[1]);
        assert_eq!(sq.shift_scale(0, 1, 1).unwrap(), rf(&[1, 2], &[1]));
        // 1/(X+r) - 1/X = -r/(X^2 + rX)
        for r in [1i64, 3, -2] {
            assert_eq!(inv.shift_scale(0, 1, r).unwrap(), rf(&[-r], &[0, r, 1]));
        }
        assert_eq!(inv.add_linear(2), rf(&[1, 0, 2], &[0, 1]));
        assert_eq!(rf(&[0, -1, 0, 1], &[0, 1]).total_degree(), 2);
    }

    #[test]
    fn exact_eval() {
        let f = rf(&[1, 0, 1], &[0, 1]);
        assert_eq!(f.eval(&BigInt::from(2)).unwrap(), num_rational::BigRational::new(5.into(), 2.into()));
        assert!(f.eval(&BigInt::zero()).is_none());
    }
}
