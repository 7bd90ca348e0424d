//! Crate-wide error type.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid moment order {0}, expected 1 or 2")]
    InvalidMomentOrder(u32),

    #[error("point {0} is not in the upper half-plane")]
    NotInHalfPlane(Complex64),

    #[error("point {0} lies on the slit (-inf, 0]")]
    OnSlit(Complex64),

    #[error("point {0} is not in the unit disc")]
    NotInDisc(Complex64),

    #[error("invalid generator triplet: {0}")]
    InvalidTriplet(String),

    #[error("generator is identically zero; the flow is the identity")]
    TrivialGenerator,

    #[error("operation requires a parabolic generator, but the spectral value is {0}")]
    NotParabolic(f64),

    #[error("operation requires a hyperbolic generator, but the spectral value is 0")]
    NotHyperbolic,

    #[error("quadrature did not converge: partial value {partial}, error estimate {error:.3e}")]
    QuadratureDidNotConverge { partial: Complex64, error: f64 },

    #[error("step size underflow at t = {t:.6e} near z = {z} (step {step:.3e})")]
    StepSizeUnderflow { t: f64, z: Complex64, step: f64 },

    #[error("integrator exceeded {0} steps before reaching the requested horizon")]
    StepBudgetExceeded(usize),

    #[error("Newton iteration did not converge at t = {t:.6e} (residual {residual:.3e})")]
    NewtonDidNotConverge { t: f64, residual: f64 },

    #[error("vector field vanishes near {0}; path integral is ill-posed there")]
    VectorFieldVanishes(Complex64),

    #[error("Koenigs chart violation: h({z}) = {value} lands on or near the slit (-inf, 0]")]
    ChartViolation { z: Complex64, value: Complex64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("scenario error: {0}")]
    Scenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
