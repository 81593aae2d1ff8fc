//! Exterior Dirichlet (sound-soft) Helmholtz solver.
//!
//! The scattered field is sought as a combined double- and single-layer
//! potential with coupling `eta = k`,
//!
//! ```text
//! u^s(x) = ∫_∂D [∂Φ(x,y)/∂ν(y) - i η Φ(x,y)] φ(y) ds(y),   Φ = (i/4) H0(k|x-y|),
//! ```
//!
//! which turns `u = 0` on the boundary into a second-kind equation free of
//! interior resonances. The equation is discretised by a Nyström method on a
//! 2π-periodic parametrisation of each boundary curve, with the logarithmic
//! part of the kernel integrated by trigonometric product quadrature and
//! polygon corners resolved by a sigmoidal mesh grading.

mod contour;
mod eval;
mod farfield;
mod system;

pub use contour::{log_weights, Contour, CurvePoint, Grading, DEFAULT_GRADING};
pub use eval::{boundary_trace_check, radial_limit_check, trace_probes, TraceProbe};
pub use farfield::{FarFieldPattern, FarFieldParseError};
pub use system::{assemble, assemble_obstacle, solve_density, BoundarySystem, Density, Obstacle, SolverOptions};

use crate::field::FieldError;
use crate::geometry::Vec2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("wavenumber must be positive and finite, got {0}")]
    InvalidWavenumber(f64),
    #[error("incident direction must be a unit vector")]
    InvalidDirection,
    #[error("scatterers with free (crack) cells are not supported by the solver")]
    FreeCellsUnsupported,
    #[error("nodes per wavelength {0} is below the minimum of 6")]
    ResolutionTooLow(f64),
    #[error("scatterer has no boundary")]
    EmptyBoundary,
    #[error("linear system is numerically singular (condition estimate {condition:e}, residual {residual:e})")]
    SingularSystem { condition: f64, residual: f64 },
    #[error("far-field pattern needs at least 64 directions, got {0}")]
    TooFewDirections(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Wavenumber and unit incident direction of the plane wave `exp(i k ω·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveParams {
    pub k: f64,
    pub omega: Vec2,
}

impl WaveParams {
    pub fn new(k: f64, omega: Vec2) -> Result<Self, SolverError> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(SolverError::InvalidWavenumber(k));
        }
        if (omega.norm() - 1.0).abs() > 1e-14 {
            return Err(SolverError::InvalidDirection);
        }
        Ok(WaveParams { k, omega })
    }

    /// Incidence from polar angle `theta`.
    pub fn from_angle(k: f64, theta: f64) -> Result<Self, SolverError> {
        WaveParams::new(k, Vec2::from_angle(theta))
    }

    pub fn wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.k
    }
}

/// Plane wave `e^{i k ω·x}` and its gradient `i k ω e^{i k ω·x}`.
pub fn incident_field(w: &WaveParams, x: Vec2) -> (Complex64, [Complex64; 2]) {
    let phase = w.k * w.omega.dot(x);
    let value = Complex64::from_polar(1.0, phase);
    let ik = Complex64::new(0.0, w.k);
    (value, [ik * w.omega.x * value, ik * w.omega.y * value])
}
