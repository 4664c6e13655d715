//! Second moments of two bosonic modes prepared in squeezed or thermal states
//! and coupled either by photon exchange or by parametric pair creation.
//!
//! [`analytic`] holds the closed-form solution; [`oracle`] propagates the full
//! covariance matrix numerically and serves as the independent reference.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod figure;
pub mod model;
pub mod observables;
pub mod oracle;
pub mod relations;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
