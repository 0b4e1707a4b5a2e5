//! Scalar transducers, the matrix van der Corput inequality, the carry
//! property counter and the exact stage decomposition of a twisted sum.

mod vdc;
mod weyl;

pub use vdc::{vdc_inequality_check, vdc_inequality_check_scalar, VdcResult};
pub use weyl::{decompose_weyl, fit_eta, StageRow, WeylConfig, WeylReport};

use num_integer::Integer;

use crate::automata::{find_synchronizing_word, truncate, Dfao};
use crate::error::{Budget, Error, Result};
use crate::exact::{Phase, Scalar};
use crate::parallel::map_chunks;

/// A synchronizing automaton whose edges carry roots of unity `e(w(q, d))`.
///
/// `T(q, w)` is the product of the weights along the path, stored as the sum
/// of phases. The weights generate the cyclic group `Z/N` of phases `j/N`.
#[derive(Clone, Debug)]
pub struct ScalarTransducer {
    automaton: Dfao,
    weights: Vec<Phase>,
    order: u64,
}

impl ScalarTransducer {
    /// `weights[q][d]` is the phase on the edge leaving `q` with digit `d`.
    /// The output map of `automaton` is ignored.
    pub fn new(automaton: Dfao, weights: Vec<Vec<Phase>>) -> Result<Self> {
        let k = automaton.base() as usize;
        if weights.len() != automaton.num_states() || weights.iter().any(|row| row.len() != k) {
            return Err(Error::DimensionMismatch("one weight per (state, digit) required".into()));
        }
        if find_synchronizing_word(&automaton).is_none() {
            return Err(Error::Precondition("transducer automaton is not synchronizing".into()));
        }
        let weights: Vec<Phase> = weights.into_iter().flatten().collect();
        let order = weights.iter().fold(1u64, |acc, w| acc.lcm(&w.den()));
        Ok(ScalarTransducer { automaton, weights, order })
    }

    /// Named instances: `thue_morse`, `rudin_shapiro`, `constant`, `digit_sum_mod(k,m)`.
    pub fn builtin(name: &str) -> Result<Self> {
        let name = name.trim();
        let single = |k: u32, w: Vec<Phase>| {
            let a = Dfao::new(k, vec![vec![0; k as usize]], 0, vec![Scalar::one()])?;
            ScalarTransducer::new(a, vec![w])
        };
        match name {
            "thue_morse" => single(2, vec![Phase::ZERO, Phase::HALF]),
            "constant" => single(2, vec![Phase::ZERO, Phase::ZERO]),
            "rudin_shapiro" => {
                // state = last digit read; weight -1 on a second consecutive 1
                let a = Dfao::new(2, vec![vec![0, 1], vec![0, 1]], 0, vec![Scalar::one(), Scalar::one()])?;
                ScalarTransducer::new(a, vec![vec![Phase::ZERO, Phase::ZERO], vec![Phase::ZERO, Phase::HALF]])
            }
            _ => {
                if let Some(args) = name.strip_prefix("digit_sum_mod(").and_then(|s| s.strip_suffix(')')) {
                    let parts: Vec<&str> = args.split(',').map(str::trim).collect();
                    if let [k, m] = parts[..] {
                        let k: u32 = k.parse().map_err(|_| Error::UnknownName(name.into()))?;
                        let m: u64 = m.parse().map_err(|_| Error::UnknownName(name.into()))?;
                        if k >= 2 && m >= 1 {
                            return single(k, (0..k).map(|d| Phase::new(d as i128, m)).collect());
                        }
                    }
                }
                Err(Error::UnknownName(name.into()))
            }
        }
    }

    pub fn automaton(&self) -> &Dfao {
        &self.automaton
    }

    pub fn base(&self) -> u32 {
        self.automaton.base()
    }

    /// Order `N` of the cyclic group generated by the weights.
    pub fn group_order(&self) -> u64 {
        self.order
    }

    #[inline]
    pub fn weight(&self, q: usize, d: u32) -> Phase {
        self.weights[q * self.base() as usize + d as usize]
    }

    /// `T(q, w)` and `delta(q, w)`.
    pub fn run_word(&self, q: usize, word: &[u32]) -> (Phase, usize) {
        word.iter().fold((Phase::ZERO, q), |(t, s), &d| (t + self.weight(s, d), self.automaton.next(s, d)))
    }

    /// `T(q, (n)_k)` and `delta(q, (n)_k)`.
    pub fn run(&self, q: usize, n: u64) -> (Phase, usize) {
        let k = self.base() as u64;
        let mut buf = [0u32; 64];
        let mut len = 0;
        let mut m = n;
        while m > 0 {
            buf[len] = (m % k) as u32;
            m /= k;
            len += 1;
        }
        buf[..len].reverse();
        self.run_word(q, &buf[..len])
    }

    /// `T(q0, (n)_k)`.
    pub fn t(&self, n: u64) -> Phase {
        self.run(self.automaton.initial(), n).0
    }

    /// `T(q0, (n mod k^mu)_k)`.
    pub fn truncated_t(&self, n: u64, mu: u32) -> Phase {
        self.t(truncate(n, self.base(), mu))
    }
}

/// Number of `l in [0, k^lambda)` for which some `(n1, n2) in [0, k^alpha)^2`
/// gives `f(a + n2)^H f(a) != f_{alpha+rho}(a + n2)^H f_{alpha+rho}(a)` with
/// `a = l k^alpha + n1 + r`, `f = T` and `f_mu` the truncation to `mu` digits.
pub fn carry_violation_count(
    tr: &ScalarTransducer,
    lambda: u32,
    alpha: u32,
    rho: u32,
    r: u64,
    budget: Budget,
) -> Result<u64> {
    if rho >= lambda {
        return Err(Error::Precondition(format!("rho = {rho} must be below lambda = {lambda}")));
    }
    let k = tr.base() as u128;
    let work = k
        .checked_pow(lambda + 2 * alpha)
        .ok_or(Error::Budget { needed: u128::MAX, limit: budget.0 })?;
    budget.check(work)?;
    let big_l = (k as u64).pow(lambda);
    let big_a = (k as u64).pow(alpha);
    let mu = alpha + rho;
    let parts = map_chunks(0, big_l, 64, |lo, hi| {
        (lo..hi)
            .filter(|&l| {
                (0..big_a).any(|n1| {
                    let a = l * big_a + n1 + r;
                    let (ta, tta) = (tr.t(a), tr.truncated_t(a, mu));
                    (0..big_a).any(|n2| tr.t(a + n2) - ta != tr.truncated_t(a + n2, mu) - tta)
                })
            })
            .count() as u64
    });
    Ok(parts.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thue_morse_weights() {
        let tm = ScalarTransducer::builtin("thue_morse").unwrap();
        assert_eq!(tm.group_order(), 2);
        for n in 0..512u64 {
            let want = if n.count_ones() % 2 == 0 { Phase::ZERO } else { Phase::HALF };
            assert_eq!(tm.t(n), want);
        }
        assert_eq!(tm.truncated_t(5, 2), Phase::HALF);
        assert_eq!(tm.truncated_t(5, 0), Phase::ZERO);
        assert_eq!(tm.truncated_t(5, 10), tm.t(5));
    }

    #[test]
    fn rudin_shapiro_weights() {
        let rs = ScalarTransducer::builtin("rudin_shapiro").unwrap();
        for n in 0..1024u64 {
            let want = if (n & (n >> 1)).count_ones() % 2 == 0 { Phase::ZERO } else { Phase::HALF };
            assert_eq!(rs.t(n), want, "n={n}");
        }
    }

    #[test]
    fn cocycle_identity() {
        let rs = ScalarTransducer::builtin("rudin_shapiro").unwrap();
        let words: [&[u32]; 4] = [&[1, 1, 0, 1], &[], &[0, 1, 1, 1, 1], &[1]];
        for u in words {
            for v in words {
                for q in 0..2 {
                    let uv: Vec<u32> = u.iter().chain(v).copied().collect();
                    let (tu, su) = rs.run_word(q, u);
                    let (tv, sv) = rs.run_word(su, v);
                    assert_eq!(rs.run_word(q, &uv), (tu + tv, sv));
                }
            }
        }
    }

    #[test]
    fn rejects_non_synchronizing() {
        let a = crate::automata::builtin("thue_morse_even").unwrap();
        let w = vec![vec![Phase::ZERO; 2]; 2];
        assert!(matches!(ScalarTransducer::new(a, w), Err(Error::Precondition(_))));
        assert!(ScalarTransducer::builtin("nope").is_err());
        assert_eq!(ScalarTransducer::builtin("digit_sum_mod(3,6)").unwrap().group_order(), 6);
    }

    #[test]
    fn carry_counts_match_enumeration() {
        let tm = ScalarTransducer::builtin("thue_morse").unwrap();
        let b = Budget::DEFAULT;
        let counts: Vec<u64> = (2..=6).map(|rho| carry_violation_count(&tm, 10, 3, rho, 0, b).unwrap()).collect();
        assert_eq!(counts, vec![171, 85, 43, 21, 11]);
        let c7: Vec<u64> = (2..=6).map(|rho| carry_violation_count(&tm, 10, 3, rho, 7, b).unwrap()).collect();
        assert_eq!(c7, vec![342, 170, 86, 42, 22]);
        let flat = ScalarTransducer::builtin("constant").unwrap();
        assert_eq!(carry_violation_count(&flat, 6, 2, 1, 3, b).unwrap(), 0);
        assert!(carry_violation_count(&tm, 10, 3, 10, 0, b).is_err());
        assert!(carry_violation_count(&tm, 20, 10, 2, 0, b).unwrap_err().is_budget());
    }

    #[test]
    fn degenerate_pair_range() {
        let tm = ScalarTransducer::builtin("thue_morse").unwrap();
        // alpha = 0 forces n1 = n2 = 0, so the products always agree
        assert_eq!(carry_violation_count(&tm, 8, 0, 7, 0, Budget::DEFAULT).unwrap(), 0);
    }
}
