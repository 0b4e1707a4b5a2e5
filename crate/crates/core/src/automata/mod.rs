//! Deterministic finite automata with output, read most-significant digit first.

mod blocks;
mod builtins;
mod format;
mod scc;
mod sync;

pub use blocks::{block_decompose_sum, BlockDecomposition, BlockRow};
pub use builtins::{builtin, BUILTIN_NAMES};
pub use format::{parse_dfao, serialize_dfao};
pub use scc::{strongly_connected_components, ComponentDecomposition, ComponentSequence};
pub use sync::{find_synchronizing_word, sync_failure_count, sync_failure_set};

use crate::error::{Error, Result};
use crate::exact::Scalar;

/// Base-`k` digits of `n`, most significant first; empty for `n = 0`.
pub fn digits(mut n: u64, k: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while n > 0 {
        out.push((n % k as u64) as u32);
        n /= k as u64;
    }
    out.reverse();
    out
}

/// Digits of `n mod k^width` left-padded with zeros to exactly `width` digits.
pub fn digits_padded(n: u64, k: u32, width: u32) -> Vec<u32> {
    let mut out = vec![0u32; width as usize];
    let mut n = n;
    for slot in out.iter_mut().rev() {
        *slot = (n % k as u64) as u32;
        n /= k as u64;
    }
    out
}

/// `k^e`, or `None` on overflow.
pub fn checked_pow(k: u32, e: u32) -> Option<u64> {
    (k as u64).checked_pow(e)
}

/// `(Q, Sigma, delta, q0, tau)` with `Sigma = {0, .., k-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dfao {
    base: u32,
    delta: Vec<usize>,
    initial: usize,
    outputs: Vec<Scalar>,
}

impl Dfao {
    /// `transitions[q][d]` is the successor of state `q` on digit `d`.
    pub fn new(base: u32, transitions: Vec<Vec<usize>>, initial: usize, outputs: Vec<Scalar>) -> Result<Self> {
        let s = transitions.len();
        if base < 2 {
            return Err(Error::InvalidAutomaton(format!("base must be at least 2, got {base}")));
        }
        if s == 0 {
            return Err(Error::InvalidAutomaton("automaton has no states".into()));
        }
        if outputs.len() != s {
            return Err(Error::InvalidAutomaton(format!("{} outputs for {s} states", outputs.len())));
        }
        if initial >= s {
            return Err(Error::InvalidAutomaton(format!("initial state {initial} out of range")));
        }
        let mut delta = Vec::with_capacity(s * base as usize);
        for (q, row) in transitions.iter().enumerate() {
            if row.len() != base as usize {
                return Err(Error::InvalidAutomaton(format!("state {q} has {} transitions, expected {base}", row.len())));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= s) {
                return Err(Error::InvalidAutomaton(format!("transition target {t} out of range")));
            }
            delta.extend_from_slice(row);
        }
        if delta[initial * base as usize] != initial {
            return Err(Error::InvalidAutomaton("the initial state must be fixed by digit 0".into()));
        }
        Ok(Dfao { base, delta, initial, outputs })
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn num_states(&self) -> usize {
        self.outputs.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn outputs(&self) -> &[Scalar] {
        &self.outputs
    }

    pub fn output(&self, q: usize) -> &Scalar {
        &self.outputs[q]
    }

    /// Same transition structure with a different output map.
    pub fn with_outputs(&self, outputs: Vec<Scalar>) -> Result<Dfao> {
        if outputs.len() != self.num_states() {
            return Err(Error::InvalidAutomaton(format!("{} outputs for {} states", outputs.len(), self.num_states())));
        }
        Ok(Dfao { outputs, ..self.clone() })
    }

    #[inline]
    pub fn next(&self, q: usize, d: u32) -> usize {
        self.delta[q * self.base as usize + d as usize]
    }

    pub fn run_word(&self, q: usize, word: &[u32]) -> usize {
        word.iter().fold(q, |s, &d| self.next(s, d))
    }

    /// `delta(q, (n)_k)`.
    pub fn run(&self, q: usize, n: u64) -> usize {
        let mut buf = [0u32; 64];
        let mut len = 0;
        let mut m = n;
        let k = self.base as u64;
        while m > 0 {
            buf[len] = (m % k) as u32;
            m /= k;
            len += 1;
        }
        buf[..len].iter().rev().fold(q, |s, &d| self.next(s, d))
    }

    /// `delta(q, w)` for the `width`-digit zero-padded word of `n mod k^width`.
    pub fn run_padded(&self, q: usize, n: u64, width: u32) -> usize {
        let k = self.base as u64;
        let mut buf = [0u32; 64];
        let mut m = n;
        for slot in buf[..width as usize].iter_mut() {
            *slot = (m % k) as u32;
            m /= k;
        }
        buf[..width as usize].iter().rev().fold(q, |s, &d| self.next(s, d))
    }

    pub fn state_of(&self, n: u64) -> usize {
        self.run(self.initial, n)
    }

    pub fn evaluate(&self, n: u64) -> Scalar {
        self.outputs[self.state_of(n)].clone()
    }

    /// `evaluate(n mod k^lambda)`.
    pub fn evaluate_truncated(&self, n: u64, lambda: u32) -> Scalar {
        self.evaluate(truncate(n, self.base, lambda))
    }

    /// True when every output is 0 or 1, as needed for an indicator of a set.
    pub fn is_indicator(&self) -> bool {
        self.outputs.iter().all(|o| *o == Scalar::zero() || *o == Scalar::one())
    }
}

/// `n mod k^lambda`, saturating to `n` when `k^lambda` overflows.
pub fn truncate(n: u64, k: u32, lambda: u32) -> u64 {
    match checked_pow(k, lambda) {
        Some(m) => n % m,
        None => n,
    }
}
