use thiserror::Error;

/// Errors raised across the library. The CLI maps these onto exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unphysical mode: m = {m} exceeds sqrt(n(n+1)) = {bound} for n = {n}")]
    Physicality { n: f64, m: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unstable coupling: g = {g} >= kappa = {kappa} has no steady state")]
    Stability { g: f64, kappa: f64 },

    #[error("negative population {value} extracted from covariance")]
    NegativePopulation { value: f64 },

    #[error("degree {0} is undefined (vanishing population)")]
    UndefinedDegree(&'static str),

    #[error("configuration does not match a known limiting scenario: {0}")]
    ScenarioMismatch(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
