//! Exact values built from roots of unity.
//!
//! A [`Phase`] is a reduced fraction `a/b` in `[0, 1)` standing for `e(a/b)`.
//! A [`Scalar`] is either `c * e(a/b)` with `c` rational, or a float fallback.
//! A [`Cyclotomic`] is a formal finite sum `sum_i c_i e(a_i/b_i)`; two such sums
//! that arise from regrouping the same terms are *formally* equal, and
//! [`Cyclotomic::is_zero`] decides true equality in `Q(zeta_N)` by reducing
//! modulo the cyclotomic polynomial.
//!
//! [`Total`] is the accumulator used by every summation routine: exact terms go
//! to a `Cyclotomic`, float terms to a compensated (Neumaier) accumulator.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// `e(num/den)`, stored reduced with `0 <= num < den`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phase {
    den: u64,
    num: u64,
}

impl Phase {
    pub const ZERO: Phase = Phase { den: 1, num: 0 };
    pub const HALF: Phase = Phase { den: 2, num: 1 };

    /// Builds `e(num/den)` for any integer numerator; reduces mod 1.
    pub fn new(num: i128, den: u64) -> Phase {
        assert!(den > 0, "phase denominator must be positive");
        let r = num.rem_euclid(den as i128) as u64;
        Self::reduced(r, den)
    }

    /// `e(a/q)` for a residue `a` (taken mod `q`).
    pub fn from_residue(a: u64, q: u64) -> Phase {
        assert!(q > 0, "phase denominator must be positive");
        Self::reduced(a % q, q)
    }

    fn reduced(num: u64, den: u64) -> Phase {
        let g = num.gcd(&den);
        if g == 0 {
            return Phase::ZERO;
        }
        Phase { den: den / g, num: num / g }
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// `t * phase` (mod 1).
    pub fn mul_int(self, t: i128) -> Phase {
        let prod = (self.num as i128 * t.rem_euclid(self.den as i128)) % self.den as i128;
        Phase::new(prod, self.den)
    }

    /// The phase lifted to denominator `n`, i.e. `a` with `self = a/n`.
    /// Panics if `den` does not divide `n`.
    pub fn numerator_over(self, n: u64) -> u64 {
        assert!(n.is_multiple_of(self.den), "{} does not divide {}", self.den, n);
        self.num * (n / self.den)
    }

    pub fn to_complex(self) -> Complex64 {
        if self.num == 0 {
            return Complex64::new(1.0, 0.0);
        }
        // Fold into (-1/2, 1/2] for a tighter argument.
        let mut t = self.num as f64 / self.den as f64;
        if 2 * self.num > self.den {
            t = -((self.den - self.num) as f64 / self.den as f64);
        }
        let (s, c) = (2.0 * std::f64::consts::PI * t).sin_cos();
        Complex64::new(c, s)
    }

    /// Distance of `num/den` to the nearest integer, as an exact fraction (num, den).
    pub fn dist_to_int(self) -> (u64, u64) {
        let d = self.num.min(self.den - self.num);
        (if self.num == 0 { 0 } else { d }, self.den)
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        let l = (self.den as u128).lcm(&(rhs.den as u128));
        let a = self.num as u128 * (l / self.den as u128) + rhs.num as u128 * (l / rhs.den as u128);
        let l64 = u64::try_from(l).expect("phase denominator overflow");
        Phase::reduced((a % l) as u64, l64)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        if self.num == 0 {
            self
        } else {
            Phase { den: self.den, num: self.den - self.num }
        }
    }
}

impl Sub for Phase {
    type Output = Phase;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn sub(self, rhs: Phase) -> Phase {
        self + (-rhs)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e({}/{})", self.num, self.den)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// A single term: `coeff * e(phase)` exactly, or a float.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Exact { coeff: BigRational, phase: Phase },
    Float(Complex64),
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::Exact { coeff: BigRational::zero(), phase: Phase::ZERO }
    }

    pub fn one() -> Scalar {
        Scalar::Exact { coeff: BigRational::one(), phase: Phase::ZERO }
    }

    pub fn rational(r: BigRational) -> Scalar {
        Scalar::Exact { coeff: r, phase: Phase::ZERO }
    }

    pub fn integer(n: i64) -> Scalar {
        Scalar::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn unit(phase: Phase) -> Scalar {
        Scalar::Exact { coeff: BigRational::one(), phase }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact { .. })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact { coeff, .. } => coeff.is_zero(),
            Scalar::Float(z) => *z == Complex64::new(0.0, 0.0),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self {
            Scalar::Exact { coeff, phase } => phase.to_complex() * rational_to_f64(coeff),
            Scalar::Float(z) => *z,
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact { coeff, phase } => Scalar::Exact { coeff: coeff.clone(), phase: -*phase },
            Scalar::Float(z) => Scalar::Float(z.conj()),
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact { coeff: a, phase: p }, Scalar::Exact { coeff: b, phase: r }) => {
                if a.is_zero() || b.is_zero() {
                    return Scalar::zero();
                }
                Scalar::Exact { coeff: a * b, phase: *p + *r }
            }
            _ => Scalar::Float(self.to_complex() * rhs.to_complex()),
        }
    }

    pub fn neg(&self) -> Scalar {
        self.mul_phase(Phase::HALF)
    }

    pub fn mul_phase(&self, phase: Phase) -> Scalar {
        match self {
            Scalar::Exact { coeff, phase: p } => Scalar::Exact { coeff: coeff.clone(), phase: *p + phase },
            Scalar::Float(z) => Scalar::Float(z * phase.to_complex()),
        }
    }

    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact { coeff, .. } => rational_to_f64(&coeff.abs()),
            Scalar::Float(z) => z.norm(),
        }
    }
}

impl From<Phase> for Scalar {
    fn from(p: Phase) -> Self {
        Scalar::unit(p)
    }
}

/// Formal sum of rational multiples of roots of unity.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct Cyclotomic {
    terms: BTreeMap<Phase, BigRational>,
}

impl Cyclotomic {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut c = Self::zero();
        c.add_term(r, Phase::ZERO);
        c
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Builds `sum_a counts[a] e(a/q)`.
    pub fn from_histogram(counts: &[u64], q: u64) -> Self {
        let mut c = Self::zero();
        for (a, &n) in counts.iter().enumerate() {
            if n != 0 {
                c.add_term(BigRational::from_integer(BigInt::from(n)), Phase::from_residue(a as u64, q));
            }
        }
        c
    }

    pub fn add_term(&mut self, coeff: BigRational, phase: Phase) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(phase) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Phase, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when no terms remain after formal cancellation.
    pub fn is_formally_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mul_phase(&self, phase: Phase) -> Cyclotomic {
        let mut out = Cyclotomic::zero();
        for (p, c) in &self.terms {
            out.add_term(c.clone(), *p + phase);
        }
        out
    }

    pub fn scale(&self, r: &BigRational) -> Cyclotomic {
        if r.is_zero() {
            return Cyclotomic::zero();
        }
        Cyclotomic { terms: self.terms.iter().map(|(p, c)| (*p, c * r)).collect() }
    }

    pub fn mul_scalar_exact(&self, coeff: &BigRational, phase: Phase) -> Cyclotomic {
        self.scale(coeff).mul_phase(phase)
    }

    pub fn mul(&self, rhs: &Cyclotomic) -> Cyclotomic {
        let mut out = Cyclotomic::zero();
        for (p, c) in &self.terms {
            for (r, d) in &rhs.terms {
                out.add_term(c * d, *p + *r);
            }
        }
        out
    }

    pub fn conj(&self) -> Cyclotomic {
        Cyclotomic { terms: self.terms.iter().map(|(p, c)| (-*p, c.clone())).collect() }
    }

    pub fn to_complex(&self) -> Complex64 {
        let mut acc = CompensatedSum::default();
        for (p, c) in &self.terms {
            acc.add(p.to_complex() * rational_to_f64(c));
        }
        acc.value()
    }

    /// Least common multiple of the phase denominators.
    pub fn conductor(&self) -> u64 {
        self.terms.keys().fold(1u64, |acc, p| acc.lcm(&p.den()))
    }

    /// Decides whether the sum is zero as a complex number.
    ///
    /// Lifts every phase to the common denominator `N`, clears coefficient
    /// denominators, and reduces the resulting integer polynomial modulo the
    /// `N`-th cyclotomic polynomial. Cost is `O((N - phi(N)) * phi(N))`.
    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        let n = self.conductor();
        if n == 1 {
            return false;
        }
        let coeff_den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut dense = vec![BigInt::zero(); n as usize];
        for (p, c) in &self.terms {
            let scaled = c.numer() * (&coeff_den / c.denom());
            dense[p.numerator_over(n) as usize] += scaled;
        }
        let phi = cyclotomic_polynomial(n);
        reduce_mod_monic(&mut dense, &phi);
        dense.iter().all(Zero::is_zero)
    }

    /// Equality in `Q(zeta)`, trying the formal comparison first.
    pub fn exact_eq(&self, other: &Cyclotomic) -> bool {
        if self == other {
            return true;
        }
        (self.clone() - other.clone()).is_zero()
    }

    /// The rational value when the sum reduces to a rational number.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.conductor();
        if n == 1 {
            return Some(self.terms.get(&Phase::ZERO).cloned().unwrap_or_else(BigRational::zero));
        }
        let coeff_den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut dense = vec![BigInt::zero(); n as usize];
        for (p, c) in &self.terms {
            dense[p.numerator_over(n) as usize] += c.numer() * (&coeff_den / c.denom());
        }
        reduce_mod_monic(&mut dense, &cyclotomic_polynomial(n));
        if dense.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(dense[0].clone(), coeff_den))
        } else {
            None
        }
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(mut self, rhs: Cyclotomic) -> Cyclotomic {
        self += rhs;
        self
    }
}

impl AddAssign for Cyclotomic {
    fn add_assign(&mut self, rhs: Cyclotomic) {
        for (p, c) in rhs.terms {
            self.add_term(c, p);
        }
    }
}

impl<'a> AddAssign<&'a Cyclotomic> for Cyclotomic {
    fn add_assign(&mut self, rhs: &'a Cyclotomic) {
        for (p, c) in &rhs.terms {
            self.add_term(c.clone(), *p);
        }
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Cyclotomic {
        Cyclotomic { terms: self.terms.into_iter().map(|(p, c)| (p, -c)).collect() }
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Cyclotomic) -> Cyclotomic {
        self + (-rhs)
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(p, c)| format!("{c}*{p:?}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Coefficients (constant first) of the `n`-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    let primes = distinct_prime_factors(n);
    let rad: u64 = primes.iter().product();
    // Phi_1 = x - 1; Phi_{p m}(x) = Phi_m(x^p) / Phi_m(x) for p not dividing m.
    let mut phi = vec![BigInt::from(-1), BigInt::one()];
    for &p in &primes {
        let stretched = stretch(&phi, p);
        phi = exact_div(&stretched, &phi);
    }
    // Phi_n(x) = Phi_rad(x^(n/rad)).
    stretch(&phi, n / rad)
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn stretch(poly: &[BigInt], e: u64) -> Vec<BigInt> {
    if e == 1 {
        return poly.to_vec();
    }
    let mut out = vec![BigInt::zero(); (poly.len() - 1) * e as usize + 1];
    for (i, c) in poly.iter().enumerate() {
        out[i * e as usize] = c.clone();
    }
    out
}

/// Exact division of integer polynomials with monic divisor (up to sign of lead 1).
fn exact_div(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = &rem[i + dd] / &lead;
        if !c.is_zero() {
            for (j, dj) in den.iter().enumerate() {
                rem[i + j] -= &c * dj;
            }
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

fn reduce_mod_monic(dense: &mut [BigInt], modulus: &[BigInt]) {
    let d = modulus.len() - 1;
    for i in (d..dense.len()).rev() {
        if dense[i].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut dense[i]);
        for j in 0..d {
            if !modulus[j].is_zero() {
                dense[i - d + j] -= &c * &modulus[j];
            }
        }
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (s, c) = *acc;
    let t = s + x;
    let c = if s.abs() >= x.abs() { c + ((s - t) + x) } else { c + ((x - t) + s) };
    *acc = (t, c);
}

impl CompensatedSum {
    pub fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        neumaier(&mut self.re, other.re.0);
        neumaier(&mut self.re, other.re.1);
        neumaier(&mut self.im, other.im.0);
        neumaier(&mut self.im, other.im.1);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Accumulator for sums of [`Scalar`] terms. Mergeable, so range partitions can
/// be summed independently and combined in a fixed order.
#[derive(Clone, Default, Debug)]
pub struct Total {
    exact: Cyclotomic,
    float: CompensatedSum,
    float_terms: usize,
}

impl Total {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_cyclotomic(c: Cyclotomic) -> Self {
        Total { exact: c, ..Default::default() }
    }

    pub fn add(&mut self, s: &Scalar) {
        match s {
            Scalar::Exact { coeff, phase } => self.exact.add_term(coeff.clone(), *phase),
            Scalar::Float(z) => {
                self.float.add(*z);
                self.float_terms += 1;
            }
        }
    }

    pub fn add_owned(&mut self, s: Scalar) {
        match s {
            Scalar::Exact { coeff, phase } => self.exact.add_term(coeff, phase),
            Scalar::Float(z) => {
                self.float.add(z);
                self.float_terms += 1;
            }
        }
    }

    pub fn merge(&mut self, other: Total) {
        self.exact += other.exact;
        self.float.merge(&other.float);
        self.float_terms += other.float_terms;
    }

    /// True when every accumulated term was exact.
    pub fn is_exact(&self) -> bool {
        self.float_terms == 0
    }

    pub fn exact_part(&self) -> &Cyclotomic {
        &self.exact
    }

    pub fn float_part(&self) -> Complex64 {
        self.float.value()
    }

    pub fn to_complex(&self) -> Complex64 {
        self.exact.to_complex() + self.float.value()
    }

    pub fn abs(&self) -> f64 {
        self.to_complex().norm()
    }

    pub fn conj(&self) -> Total {
        let f = self.float.value().conj();
        let mut float = CompensatedSum::default();
        float.add(f);
        Total { exact: self.exact.conj(), float, float_terms: self.float_terms }
    }

    /// Multiplies the whole sum by a scalar.
    pub fn mul_scalar(&self, s: &Scalar) -> Total {
        match s {
            Scalar::Exact { coeff, phase } => {
                let mut float = CompensatedSum::default();
                float.add(self.float.value() * s.to_complex());
                Total {
                    exact: self.exact.mul_scalar_exact(coeff, *phase),
                    float,
                    float_terms: self.float_terms,
                }
            }
            Scalar::Float(z) => {
                let mut float = CompensatedSum::default();
                float.add(self.to_complex() * z);
                Total { exact: Cyclotomic::zero(), float, float_terms: self.float_terms.max(1) }
            }
        }
    }

    /// Exact comparison of the exact parts plus a relative tolerance on float parts.
    pub fn matches(&self, other: &Total, float_tol: f64) -> bool {
        if !self.exact.exact_eq(&other.exact) {
            return false;
        }
        let a = self.float.value();
        let b = other.float.value();
        (a - b).norm() <= float_tol * a.norm().max(b.norm()).max(1.0)
    }
}

impl fmt::Display for Total {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex();
        write!(f, "{:.12}{:+.12}i", z.re, z.im)
    }
}
