//! Closed-form reference solutions: scattering by a sound-soft disk, and real
//! analytic Helmholtz fields for exercising the nodal and path machinery.

use crate::field::{Field, FieldError, FieldSample};
use crate::geometry::Vec2;
use crate::solver::{FarFieldPattern, WaveParams};
use crate::specfun::{bessel01, bessel_j_orders, hankel1_orders};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Largest `k a` for which the modal series is trusted.
pub const MAX_KA: f64 = 30.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("k a = {0} exceeds the validated range of the disk series")]
    KaTooLarge(f64),
    #[error("point lies inside the disk")]
    PointInsideDisk,
    #[error("M = {0} is below the minimum of 64 directions")]
    TooFewDirections(usize),
}

/// Default truncation order `⌈ka⌉ + 20`.
pub fn disk_truncation(ka: f64) -> usize {
    ka.ceil() as usize + 20
}

/// Ratios `J_n(ka) / H_n(ka)` for `n = 0..=nmax`.
fn disk_coefficients(ka: f64, nmax: usize) -> Vec<Complex64> {
    let j = bessel_j_orders(nmax, ka);
    let h = hankel1_orders(nmax, ka);
    j.iter().zip(&h).map(|(&j, &h)| j / h).collect()
}

/// Far-field pattern of the sound-soft disk of radius `a` centred at the
/// origin, at `m` directions from angle 0.
pub fn disk_far_field(
    k: f64,
    a: f64,
    omega: Vec2,
    m: usize,
) -> Result<FarFieldPattern, OracleError> {
    disk_far_field_truncated(k, a, omega, m, disk_truncation(k * a))
}

/// As [`disk_far_field`] with an explicit truncation order.
pub fn disk_far_field_truncated(
    k: f64,
    a: f64,
    omega: Vec2,
    m: usize,
    nmax: usize,
) -> Result<FarFieldPattern, OracleError> {
    let ka = k * a;
    if ka > MAX_KA {
        return Err(OracleError::KaTooLarge(ka));
    }
    if m < 64 {
        return Err(OracleError::TooFewDirections(m));
    }
    let wave = WaveParams { k, omega };
    let coef = disk_coefficients(ka, nmax);
    let theta_w = omega.y.atan2(omega.x);
    let pre = Complex64::from_polar(-(2.0 / (PI * k)).sqrt(), -PI / 4.0);
    let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
    let values = angles
        .iter()
        .map(|&th| {
            let phi = th - theta_w;
            // sum over n in Z, using c_{-n} = c_n
            let mut s = coef[0];
            for (n, c) in coef.iter().enumerate().skip(1) {
                s += c * (2.0 * (n as f64 * phi).cos());
            }
            pre * s
        })
        .collect();
    Ok(FarFieldPattern::new(wave, angles, values))
}

/// Total field `u = e^{ikω·x} + u^s` outside the disk of radius `a`.
pub fn disk_total_field(k: f64, a: f64, omega: Vec2, x: Vec2) -> Result<Complex64, OracleError> {
    let r = x.norm();
    if r < a {
        return Err(OracleError::PointInsideDisk);
    }
    let ka = k * a;
    if ka > MAX_KA {
        return Err(OracleError::KaTooLarge(ka));
    }
    let nmax = disk_truncation(ka);
    Ok(disk_total_field_with(k, omega, x, &disk_coefficients(ka, nmax)))
}

fn disk_total_field_with(k: f64, omega: Vec2, x: Vec2, coef: &[Complex64]) -> Complex64 {
    let r = x.norm();
    let nmax = coef.len() - 1;
    let phi = x.y.atan2(x.x) - omega.y.atan2(omega.x);
    let h = hankel1_orders(nmax, k * r);
    let mut us = coef[0] * h[0];
    let mut ipow = Complex64::new(1.0, 0.0);
    for n in 1..=nmax {
        ipow *= Complex64::i();
        us += ipow * coef[n] * h[n] * (2.0 * (n as f64 * phi).cos());
    }
    Complex64::from_polar(1.0, k * omega.dot(x)) - us
}

/// Real analytic solutions of `Δv + k²v = 0` on the whole plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SyntheticKind {
    /// `sin(k n·x)`.
    PlaneStanding { n: Vec2 },
    /// `J0(k|x|)`.
    RadialBessel,
    /// `Σ c_j sin(k n_j·x + φ_j)`.
    SumOfPlaneWaves { terms: Vec<PlaneTerm> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneTerm {
    pub direction: Vec2,
    pub coefficient: f64,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticField {
    #[serde(flatten)]
    pub kind: SyntheticKind,
    pub k: f64,
}

impl SyntheticField {
    pub fn plane_standing(k: f64, n: Vec2) -> Self {
        SyntheticField {
            kind: SyntheticKind::PlaneStanding { n: n.normalized() },
            k,
        }
    }

    pub fn radial_bessel(k: f64) -> Self {
        SyntheticField {
            kind: SyntheticKind::RadialBessel,
            k,
        }
    }

    pub fn sum_of_plane_waves(k: f64, terms: Vec<PlaneTerm>) -> Self {
        let terms = terms
            .into_iter()
            .map(|t| PlaneTerm {
                direction: t.direction.normalized(),
                ..t
            })
            .collect();
        SyntheticField {
            kind: SyntheticKind::SumOfPlaneWaves { terms },
            k,
        }
    }
}

/// Exact value and gradient of a synthetic field.
pub fn synthetic_eval(f: &SyntheticField, x: Vec2) -> (f64, Vec2) {
    let k = f.k;
    match &f.kind {
        SyntheticKind::PlaneStanding { n } => {
            let (s, c) = (k * n.dot(x)).sin_cos();
            (s, *n * (k * c))
        }
        SyntheticKind::RadialBessel => {
            let r = x.norm();
            if r == 0.0 {
                return (1.0, Vec2::new(0.0, 0.0));
            }
            let b = bessel01(k * r);
            // d/dr J0(kr) = -k J1(kr)
            (b.j0, x * (-k * b.j1 / r))
        }
        SyntheticKind::SumOfPlaneWaves { terms } => {
            let mut v = 0.0;
            let mut g = Vec2::new(0.0, 0.0);
            for t in terms {
                let (s, c) = (k * t.direction.dot(x) + t.phase).sin_cos();
                v += t.coefficient * s;
                g = g + t.direction * (t.coefficient * k * c);
            }
            (v, g)
        }
    }
}

impl Field for SyntheticField {
    fn sample(&self, x: Vec2) -> Result<FieldSample, FieldError> {
        let (v, g) = synthetic_eval(self, x);
        Ok(FieldSample::real(v, g))
    }

    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn is_complex(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_bessel_at_origin() {
        let f = SyntheticField::radial_bessel(3.0);
        assert_eq!(synthetic_eval(&f, Vec2::new(0.0, 0.0)), (1.0, Vec2::new(0.0, 0.0)));
    }

    #[test]
    fn errors() {
        let w = Vec2::new(1.0, 0.0);
        assert_eq!(disk_far_field(31.0, 1.0, w, 64), Err(OracleError::KaTooLarge(31.0)));
        assert_eq!(disk_total_field(1.0, 1.0, w, Vec2::new(0.5, 0.0)), Err(OracleError::PointInsideDisk));
    }
}
