//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An index was outside the range its container admits.
    #[error("index out of range: {0}")]
    IndexRange(String),

    /// Matrix or sample data had the wrong shape for the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A Wigner matrix was requested beyond the double-precision stability cap.
    #[error("spin 2l = {two_ell} exceeds the stability cap 2l = {cap_two_ell}; \
             the factorial sum loses double precision above the cap")]
    SpinCap { two_ell: u64, cap_two_ell: u64 },

    /// A quadrature was asked to integrate content beyond its exact band.
    #[error("quadrature under-resolved: {0}")]
    QuadratureOrder(String),

    /// A time grid cannot hold the requested frequency content.
    #[error("time grid aliases the requested band: {0}")]
    Aliasing(String),

    /// The nonresonant solver was called on a resonant mode, or vice versa.
    #[error("mode with 2m = {twice_m} is {actual}, but the {expected} branch was called")]
    WrongBranch {
        twice_m: i64,
        actual: &'static str,
        expected: &'static str,
    },

    /// A resonant mode has no periodic solution: the obstruction integral is nonzero.
    #[error("no periodic solution: |obstruction integral| = {magnitude:.3e} exceeds tolerance {tol:.3e} (2l = {two_ell}, 2m = {twice_m}, 2n = {twice_n})")]
    NoSolution {
        two_ell: u64,
        twice_m: i64,
        twice_n: i64,
        integral: Complex64,
        magnitude: f64,
        tol: f64,
    },

    /// An exact certificate could not be decided with the working enclosure.
    #[error("certification inconclusive: {0}; tighten the enclosure")]
    Certification(String),

    /// Invalid or inconsistent input data.
    #[error("invalid data: {0}")]
    BadData(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
