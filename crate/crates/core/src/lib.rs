//! Automatic sequences twisted by `e_q(f(n))` for rational `f`: exact evaluation,
//! complete and incomplete sums, van der Corput differencing, carry and
//! synchronization counters, and congruence counting over automatic sets.

pub mod automata;
pub mod congruence;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod expsums;
pub mod modring;
pub mod parallel;
pub mod report;
pub mod vandercorput;

pub use error::{Budget, Error, Result};
pub use exact::{Cyclotomic, Phase, Scalar, Total};
