//! Rational functions modulo integers and the `e_q(f(n))` convention.

pub mod arith;
pub mod eq;
pub mod modulus;
pub mod parse;
pub mod poly;
pub mod rational;

pub use arith::{crt_combine, factorize, is_prime, mod_inverse, primes_between};
pub use eq::{eval_eq, is_in_qf, is_well_defined, q1_of, rational_gcd, EqEvaluator, QfMode};
pub use modulus::FactoredModulus;
pub use parse::{parse_rational_function, parse_rational_function_list};
pub use poly::{FpPoly, IntPoly};
pub use rational::RationalFunction;
