//! Integer polynomials and their images over prime fields.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::arith::{add_mod, mod_inverse, mul_mod};

/// Polynomial in `Z[X]`, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `X`.
    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn monomial(c: BigInt, deg: usize) -> Self {
        let mut v = vec![BigInt::zero(); deg + 1];
        v[deg] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Degree; the zero polynomial has no degree.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention `deg 0 = 0`, as used for total degree.
    pub fn degree_or_zero(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    /// Non-negative gcd of the coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_scalar(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a / c).collect())
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().is_some_and(|l| l.is_negative()) {
            c = -c;
        }
        self.div_scalar(&c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn residues(&self, m: u64) -> Vec<u64> {
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| c.mod_floor(&mb).to_u64().expect("residue fits in u64"))
            .collect()
    }

    /// `P(a + sX)`.
    pub fn compose_linear(&self, a: &BigInt, s: &BigInt) -> Self {
        let lin = IntPoly::new(vec![a.clone(), s.clone()]);
        self.coeffs.iter().rev().fold(IntPoly::zero(), |acc, c| &(&acc * &lin) + &IntPoly::constant(c.clone()))
    }

    /// Pseudo-remainder: `lc(d)^k * self = q*d + r` with `deg r < deg d`.
    fn pseudo_rem(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("pseudo_rem by zero polynomial");
        let lc = d.leading().unwrap().clone();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let lr = r.leading().unwrap().clone();
            let shifted = IntPoly::monomial(lr, rd - dd);
            r = &r.scale(&lc) - &(&shifted * d);
        }
        r
    }

    /// Exact quotient in `Z[X]`; `d` must divide `self`.
    pub fn div_exact(&self, d: &IntPoly) -> IntPoly {
        let dd = d.degree().expect("division by zero polynomial");
        let lc = d.leading().unwrap();
        let mut r = self.clone();
        let mut q = vec![BigInt::zero(); self.coeffs.len().saturating_sub(dd)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let (c, rem) = r.leading().unwrap().div_rem(lc);
            assert!(rem.is_zero(), "inexact polynomial division");
            q[rd - dd] = c.clone();
            r = &r - &(&IntPoly::monomial(c, rd - dd) * d);
        }
        assert!(r.is_zero(), "inexact polynomial division");
        IntPoly::new(q)
    }

    /// Primitive gcd with positive leading coefficient (gcd over `Q[X]`
    /// normalized into `Z[X]`). `gcd(0, 0) = 0`.
    pub fn gcd_primitive(&self, other: &IntPoly) -> IntPoly {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Image over `F_p`.
    pub fn mod_p(&self, p: u64) -> FpPoly {
        FpPoly::new(self.residues(p), p)
    }
}

impl<'a> Add<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl<'a> Sub<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl<'a> Mul<&'a IntPoly> for &'a IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl fmt::Display for IntPoly {
    /// Highest degree first, e.g. `3X^2 - X + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// Polynomial over `F_p`, constant term first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    coeffs: Vec<u64>,
    p: u64,
}

impl FpPoly {
    pub fn new(mut coeffs: Vec<u64>, p: u64) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { coeffs, p }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    fn monic(&self) -> FpPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => {
                let inv = mod_inverse(lc as i128, self.p).expect("nonzero in prime field");
                FpPoly::new(self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)).collect(), self.p)
            }
        }
    }

    /// Quotient and remainder; `d` must be nonzero.
    pub fn div_rem(&self, d: &FpPoly) -> (FpPoly, FpPoly) {
        let p = self.p;
        let dd = d.degree().expect("division by zero polynomial");
        let inv = mod_inverse(*d.coeffs.last().unwrap() as i128, p).expect("nonzero in prime field");
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; r.len().saturating_sub(dd)];
        for i in (dd..r.len()).rev() {
            let c = mul_mod(r[i], inv, p);
            if c == 0 {
                continue;
            }
            q[i - dd] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[i - dd + j] = add_mod(r[i - dd + j], p - mul_mod(c, dj, p), p);
            }
        }
        (FpPoly::new(q, p), FpPoly::new(r, p))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let p = IntPoly::from_i64(&[1, -1, 3]);
        assert_eq!(p.to_string(), "3X^2 - X + 1");
        assert_eq!(IntPoly::from_i64(&[0, 0, -1]).to_string(), "-X^2");
        assert_eq!((&p * &IntPoly::x()).to_string(), "3X^3 - X^2 + X");
        assert_eq!(IntPoly::from_i64(&[1, 2, 0, 0]).degree(), Some(1));
        assert_eq!(IntPoly::zero().degree(), None);
        assert_eq!(p.derivative(), IntPoly::from_i64(&[-1, 6]));
    }

    #[test]
    fn gcd_over_rationals() {
        // (X+1)(X-2) and 4(X+1)(X+3)
        let a = &IntPoly::from_i64(&[1, 1]) * &IntPoly::from_i64(&[-2, 1]);
        let b = (&IntPoly::from_i64(&[1, 1]) * &IntPoly::from_i64(&[3, 1])).scale(&BigInt::from(4));
        assert_eq!(a.gcd_primitive(&b), IntPoly::from_i64(&[1, 1]));
        assert_eq!(a.gcd_primitive(&IntPoly::zero()), a.primitive_part());
        assert_eq!(IntPoly::from_i64(&[2]).gcd_primitive(&IntPoly::from_i64(&[0, 4])), IntPoly::one());
    }

    #[test]
    fn compose_linear_shift() {
        // (X)^2 at 1 + X -> X^2 + 2X + 1
        let sq = IntPoly::from_i64(&[0, 0, 1]);
        assert_eq!(sq.compose_linear(&BigInt::from(1), &BigInt::from(1)), IntPoly::from_i64(&[1, 2, 1]));
        // X^2 at 2X -> 4X^2
        assert_eq!(sq.compose_linear(&BigInt::zero(), &BigInt::from(2)), IntPoly::from_i64(&[0, 0, 4]));
    }

    #[test]
    fn div_exact_roundtrip() {
        let a = IntPoly::from_i64(&[3, -1, 2]);
        let b = IntPoly::from_i64(&[-5, 0, 7, 1]);
        assert_eq!((&a * &b).div_exact(&b), a);
    }

    #[test]
    fn fp_gcd() {
        // over F_5: X^2 - 1 = (X-1)(X+1); X^2 + 3X + 2 = (X+1)(X+2)
        let a = FpPoly::new(vec![4, 0, 1], 5);
        let b = FpPoly::new(vec![2, 3, 1], 5);
        assert_eq!(a.gcd(&b), FpPoly::new(vec![1, 1], 5));
        let (q, r) = a.div_rem(&FpPoly::new(vec![1, 1], 5));
        assert!(r.is_zero());
        assert_eq!(q, FpPoly::new(vec![4, 1], 5));
    }
}
