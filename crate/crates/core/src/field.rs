//! Point evaluation of complex Helmholtz fields and their gradients.

use crate::geometry::Vec2;
use num_complex::Complex64;
use thiserror::Error;

/// Value and gradient of a complex field at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub value: Complex64,
    pub gradient: [Complex64; 2],
}

impl FieldSample {
    pub fn real(value: f64, gradient: Vec2) -> Self {
        FieldSample {
            value: Complex64::new(value, 0.0),
            gradient: [Complex64::new(gradient.x, 0.0), Complex64::new(gradient.y, 0.0)],
        }
    }

    /// Gradient of the real part.
    pub fn real_gradient(&self) -> Vec2 {
        Vec2::new(self.gradient[0].re, self.gradient[1].re)
    }

    /// Gradient of the imaginary part.
    pub fn imag_gradient(&self) -> Vec2 {
        Vec2::new(self.gradient[0].im, self.gradient[1].im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum FieldError {
    #[error("point lies inside the scatterer")]
    PointInsideScatterer,
    #[error("point at distance {distance:e} from the boundary is closer than the guard {guard:e}")]
    TooCloseToBoundary { distance: f64, guard: f64 },
}

/// A complex solution of the Helmholtz equation that can be evaluated
/// pointwise in its domain.
pub trait Field: Sync {
    fn sample(&self, x: Vec2) -> Result<FieldSample, FieldError>;

    fn wavenumber(&self) -> f64;

    /// Minimum distance to the boundary at which [`Field::sample`] succeeds.
    fn guard_distance(&self) -> f64 {
        0.0
    }

    /// Whether the field carries a nonzero imaginary part.
    fn is_complex(&self) -> bool {
        true
    }
}

impl<F: Field + ?Sized> Field for &F {
    fn sample(&self, x: Vec2) -> Result<FieldSample, FieldError> {
        (**self).sample(x)
    }
    fn wavenumber(&self) -> f64 {
        (**self).wavenumber()
    }
    fn guard_distance(&self) -> f64 {
        (**self).guard_distance()
    }
    fn is_complex(&self) -> bool {
        (**self).is_complex()
    }
}

/// Real field given by a closure returning value and gradient.
pub struct FnField<F> {
    f: F,
    k: f64,
}

impl<F> FnField<F>
where
    F: Fn(Vec2) -> (f64, Vec2) + Sync,
{
    pub fn new(k: f64, f: F) -> Self {
        FnField { f, k }
    }
}

impl<F> Field for FnField<F>
where
    F: Fn(Vec2) -> (f64, Vec2) + Sync,
{
    fn sample(&self, x: Vec2) -> Result<FieldSample, FieldError> {
        let (v, g) = (self.f)(x);
        Ok(FieldSample::real(v, g))
    }

    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn is_complex(&self) -> bool {
        false
    }
}
