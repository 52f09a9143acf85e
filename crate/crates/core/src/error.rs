use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions m = {m}, n = {n}: need 2 <= m <= n")]
    InvalidDims { m: usize, n: usize },
    #[error("order index k = {k} out of range 1..={m}")]
    InvalidOrder { k: usize, m: usize },
    #[error("step index j = {j} out of range 1..={m}")]
    InvalidStep { j: usize, m: usize },
    #[error("endpoint {0} is not a boundary of the support")]
    EndpointOutsideSupport(String),
    #[error("degenerate density: variance is zero")]
    DegenerateDensity,
    #[error("malformed transform: term with s^-{0} cannot be inverted to a polynomial piece")]
    NonInvertibleTerm(i64),
    #[error("negative power of x survived the t = 1/x substitution")]
    NegativePower,
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("moment mismatch at q = {q}: family sum {got}, expected {expected}")]
    MomentMismatch {
        q: u32,
        got: String,
        expected: String,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("eigensolver did not converge within {0} sweeps")]
    EigenNotConverged(usize),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
