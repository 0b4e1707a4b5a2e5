use std::fmt;

use serde::Serialize;

use super::arith::{factorize, is_prime};
use crate::error::{Error, Result};

/// A positive modulus together with its certified prime factorization.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FactoredModulus {
    value: u64,
    factors: Vec<(u64, u32)>,
}

impl FactoredModulus {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("modulus must be positive".into()));
        }
        Self::from_factors(q, factorize(q).into_iter().collect())
    }

    /// Accepts a claimed factorization after checking primality, ordering and the product.
    pub fn from_factors(q: u64, factors: Vec<(u64, u32)>) -> Result<Self> {
        let mut prod: u128 = 1;
        for w in factors.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::Domain("prime factors must be distinct and ascending".into()));
            }
        }
        for &(p, e) in &factors {
            if e == 0 || !is_prime(p) {
                return Err(Error::Domain(format!("invalid factor {p}^{e}")));
            }
            for _ in 0..e {
                prod *= p as u128;
                if prod > q as u128 {
                    return Err(Error::Domain(format!("factorization does not multiply to {q}")));
                }
            }
        }
        if prod != q as u128 {
            return Err(Error::Domain(format!("factorization does not multiply to {q}")));
        }
        Ok(FactoredModulus { value: q, factors })
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// `(p, p^nu)` for each exact prime power dividing the modulus.
    pub fn prime_powers(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.factors.iter().map(|&(p, e)| (p, p.pow(e)))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

impl fmt::Display for FactoredModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
