//! Exact rational scalars and dense univariate polynomials over them.
//!
//! Nothing in this module touches floating point except the explicit
//! `to_f64` conversions used for reporting.

mod combinatorics;
mod poly;
mod rational;

pub use combinatorics::{binomial, factorial, factorial_ratio};
pub use poly::Poly;
pub use rational::{
    int, parse_rational, ratio, rational_serde, rational_to_decimal, rational_to_f64, Rational,
    RationalRepr,
};
