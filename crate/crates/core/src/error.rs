use thiserror::Error;

use crate::families::Sample;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("pole at argument {0}")]
    Pole(f64),

    #[error("degenerate elliptic modulus k = {0}")]
    DegenerateModulus(f64),

    #[error("degenerate period lattice: discriminant is zero")]
    DegenerateLattice,

    #[error("{0} failed to converge")]
    NoConvergence(&'static str),

    #[error("C = {c} lies outside the {expected} regime")]
    OutOfRegime { c: f64, expected: &'static str },

    #[error("no real solutions for C = {0}")]
    NoRealSolution(f64),

    #[error("target value {0} is not reachable on this branch")]
    Unreachable(f64),

    #[error("integration failed at xi = {}", last.xi)]
    IntegrationFailure { last: Sample },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
