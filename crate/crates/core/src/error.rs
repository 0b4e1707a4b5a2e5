use thiserror::Error;

/// Errors raised by the library. Budget overruns are kept separate from
/// validation failures so callers can tell "bad input" from "too big".
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("f not well-defined mod q: {f} mod {q}")]
    NotWellDefined { f: String, q: u64 },

    #[error("{a} is not invertible mod {m}")]
    NotInvertible { a: String, m: u64 },

    #[error("moduli are not pairwise coprime")]
    NonCoprimeModuli,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration budget exceeded: need {needed}, limit {limit}")]
    Budget { needed: u128, limit: u128 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse { line: 0, msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Enumeration budget: an upper bound on the number of elementary steps a
/// brute-force routine may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Budget {
    pub const DEFAULT: Budget = Budget(100_000_000);
    pub const ENV_VAR: &'static str = "AUTOEXP_BUDGET";

    /// Reads `AUTOEXP_BUDGET`, falling back to `DEFAULT` when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|v| v.trim().parse::<u128>().ok())
            .map(Budget)
            .unwrap_or(Self::DEFAULT)
    }

    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 {
            Err(Error::Budget { needed, limit: self.0 })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::DEFAULT
    }
}
