//! Fractional Hardy operators `|p|^α + a|x|^{-α}` on radial functions.
//!
//! The crate evaluates the closed-form constants (sharp Hardy constant, the
//! Ψ-function and the singularity exponent δ), the pointwise heat and Riesz
//! kernel comparison profiles, and a spectral discretization of the operator
//! on logarithmic radial grids that is used to check the norm and kernel
//! inequalities numerically.

pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use kernels::KernelTriple;
pub use operator::{PotentialSpec, RadialGrid, SpectralOperator};
pub use quadrature::QuadResult;
pub use specfun::{make_params, HardyParams};
pub use verify::{Verdict, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("smallest eigenvalue {min:e} is below -{tol:e} (operator not nonnegative)")]
    Friedrichs { min: f64, tol: f64 },
    #[error("potential leaves its bounds at r = {r:e}: V = {v:e}, allowed [{lo:e}, {hi:e}]")]
    Sandwich { r: f64, v: f64, lo: f64, hi: f64 },
    #[error("grid inadequate: {0}")]
    Grid(String),
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
