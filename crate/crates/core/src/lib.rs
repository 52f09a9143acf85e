//! Exact order-statistic densities of the reduced-density-matrix spectrum
//! for Gaussian random complex pure states of an `m × n` bipartite system,
//! plus a Monte Carlo ensemble to check them against.
//!
//! The exact side is built on [`exactnum`] (rationals and polynomials) and
//! [`steppoly`] (densities of the form `Σ_j A_j(x) Θ(1 - j x)`). Two
//! independent derivations feed it: [`laplace`] computes the largest
//! eigenvalue density from a determinant of Laplace-transform entries, and
//! [`ordstat`] builds the whole family of ordered-eigenvalue densities from
//! the general coefficient-polynomial formula.

pub mod ensemble;
pub mod exactnum;
pub mod fixtures;
pub mod laplace;
pub mod ordstat;
pub mod steppoly;

mod error;

pub use error::Error;
pub use ordstat::SystemDims;
