use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid disk configuration: {0}")]
    InvalidConfig(ValidationReport),

    #[error("{map} has a pole at z = {z}")]
    Pole { map: &'static str, z: Complex64 },

    #[error("point z = {z} outside the domain of {what}")]
    Domain { what: &'static str, z: Complex64 },

    #[error("matrix is not Hermitian (max |M - M*| = {deviation:e}, tolerance {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigenvalue iteration stalled at index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },

    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("non-finite entry in input matrix")]
    NonFinite,

    #[error("analyticity defect {defect:e} exceeds tolerance {tolerance:e} at {samples} samples")]
    AnalyticityDefect {
        defect: f64,
        tolerance: f64,
        samples: usize,
    },

    #[error("eigenvalue is zero; first-order correction undefined")]
    ZeroEigenvalue,

    #[error("eigenvalue {lambda} is not real")]
    NonRealEigenvalue { lambda: Complex64 },

    #[error("map vanishes on the contour (|f| = {value:e} at t = {t})")]
    ZeroOnCurve { t: f64, value: f64 },

    #[error("contour refinement exhausted at {samples} samples")]
    RefinementExhausted { samples: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),
}
