//! Field, gradient and far-field evaluation from a solved density.
//!
//! Targets far from the boundary use the Nyström nodes directly. Closer
//! targets use the density resampled by trigonometric interpolation onto a
//! grid refined by a power of two, chosen so the node spacing stays below a
//! quarter of the target's distance to the boundary. Targets closer than a
//! quarter of the finest spacing times 16 are refused.

use super::system::{BoundarySystem, Density};
use super::{incident_field, FarFieldPattern, SolverError};
use crate::field::{Field, FieldError, FieldSample};
use crate::geometry::{Scatterer, Vec2};
use crate::specfun::bessel01;
use num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Refinement factors `1, 2, 4, ..., 2^(LEVELS-1)`.
const LEVELS: usize = 7;

/// A quadrature source: position, unit outward normal, and the density times
/// its arc-length weight.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Source {
    pos: Vec2,
    normal: Vec2,
    coef: Complex64,
}

#[derive(Debug)]
pub(crate) struct FineLevels {
    levels: Vec<OnceLock<Vec<Source>>>,
    max_spacing: f64,
}

impl FineLevels {
    pub(crate) fn new(sys: &BoundarySystem) -> Self {
        FineLevels {
            levels: (0..LEVELS).map(|_| OnceLock::new()).collect(),
            max_spacing: sys.max_spacing(),
        }
    }
}

/// Trigonometric interpolation of samples at `phase + j*step` onto the grid
/// `phase/factor + i*step/factor`.
fn upsample(values: &[Complex64], factor: usize, phase: f64) -> Vec<Complex64> {
    let n = values.len();
    if factor == 1 {
        return values.to_vec();
    }
    let nf = n * factor;
    let mut planner = FftPlanner::<f64>::new();
    let mut spec = values.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);
    let shift = phase / factor as f64 - phase;
    let mut fine = vec![Complex64::new(0.0, 0.0); nf];
    let half = n / 2;
    let scale = 1.0 / n as f64;
    for (m, &c) in spec.iter().enumerate() {
        if n.is_multiple_of(2) && m == half {
            // Nyquist term split between +n/2 and -n/2
            let hm = half as f64;
            fine[half] += c * 0.5 * scale * Complex64::from_polar(1.0, hm * shift);
            fine[nf - half] += c * 0.5 * scale * Complex64::from_polar(1.0, -hm * shift);
        } else if m < half || (n % 2 == 1 && m == half) {
            fine[m] += c * scale * Complex64::from_polar(1.0, m as f64 * shift);
        } else {
            let neg = m as isize - n as isize;
            fine[nf - (n - m)] += c * scale * Complex64::from_polar(1.0, neg as f64 * shift);
        }
    }
    planner.plan_fft_inverse(nf).process(&mut fine);
    fine
}

impl Density {
    fn sources(&self, level: usize) -> &[Source] {
        self.fine.levels[level].get_or_init(|| {
            let sys = &self.system;
            let factor = 1usize << level;
            let mut out = Vec::new();
            for (ci, range) in sys.ranges.iter().enumerate() {
                let contour = &sys.contours[ci];
                if level == 0 {
                    for j in range.clone() {
                        let node = &sys.nodes[j];
                        out.push(Source {
                            pos: node.pos,
                            normal: node.normal * (1.0 / node.speed),
                            coef: self.coeffs[j] * (node.speed * node.weight),
                        });
                    }
                    continue;
                }
                // interpolate psi = phi * |z'|, which stays bounded at corners
                let psi: Vec<Complex64> = range
                    .clone()
                    .map(|j| self.coeffs[j] * sys.nodes[j].speed)
                    .collect();
                let fine = upsample(&psi, factor, contour.phase);
                let step = contour.step() / factor as f64;
                for (i, &p) in fine.iter().enumerate() {
                    let cp = contour.point(contour.param(i, factor));
                    let speed = cp.tangent.norm();
                    if speed == 0.0 {
                        continue;
                    }
                    out.push(Source {
                        pos: sys.anchors[cp.anchor] + cp.offset,
                        normal: Vec2::new(cp.tangent.y, -cp.tangent.x) * (1.0 / speed),
                        coef: p * step,
                    });
                }
            }
            out
        })
    }

    /// Smallest distance to the boundary at which fields are evaluated.
    pub fn guard(&self) -> f64 {
        4.0 * self.fine.max_spacing / (1usize << (LEVELS - 1)) as f64
    }

    fn level_for(&self, distance: f64) -> usize {
        let h = self.fine.max_spacing;
        (0..LEVELS)
            .find(|&l| h / (1usize << l) as f64 <= 0.25 * distance)
            .unwrap_or(LEVELS - 1)
    }

    /// Scattered field and gradient at `x`, without domain checks.
    fn scattered_unchecked(&self, x: Vec2, level: usize) -> (Complex64, [Complex64; 2]) {
        let k = self.system.wave.k;
        let eta_quarter = 0.25 * self.system.eta;
        let ik_quarter = Complex64::new(0.0, 0.25 * k);
        let mut u = Complex64::new(0.0, 0.0);
        let mut gx = Complex64::new(0.0, 0.0);
        let mut gy = Complex64::new(0.0, 0.0);
        for s in self.sources(level) {
            let d = x - s.pos;
            let r = d.norm();
            let b = bessel01(k * r);
            let (h0, h1) = (b.h0(), b.h1());
            let nd = s.normal.dot(d);
            let inv_r = 1.0 / r;
            // double layer
            let dl = ik_quarter * h1 * (nd * inv_r);
            // single layer (times -i eta)
            let sl = h0 * eta_quarter;
            u += s.coef * (dl + sl);
            // gradients
            let radial = (h0 * k * inv_r * inv_r - h1 * (2.0 * inv_r * inv_r * inv_r)) * nd;
            let dl_gx = ik_quarter * (h1 * (s.normal.x * inv_r) + radial * d.x);
            let dl_gy = ik_quarter * (h1 * (s.normal.y * inv_r) + radial * d.y);
            let sl_g = -h1 * (eta_quarter * k * inv_r);
            gx += s.coef * (dl_gx + sl_g * d.x);
            gy += s.coef * (dl_gy + sl_g * d.y);
        }
        (u, [gx, gy])
    }

    fn check_point(&self, x: Vec2) -> Result<f64, FieldError> {
        if self.system.nodes.is_empty() {
            return Ok(f64::INFINITY);
        }
        if self.system.encloses(x) {
            return Err(FieldError::PointInsideScatterer);
        }
        let d = self.system.distance_to_boundary(x);
        let guard = self.guard();
        if d < guard {
            return Err(FieldError::TooCloseToBoundary { distance: d, guard });
        }
        Ok(d)
    }

    /// Scattered field `u^s` and its gradient.
    pub fn scattered_field(&self, x: Vec2) -> Result<(Complex64, [Complex64; 2]), SolverError> {
        let d = self.check_point(x)?;
        if self.system.nodes.is_empty() {
            return Ok((Complex64::new(0.0, 0.0), [Complex64::new(0.0, 0.0); 2]));
        }
        Ok(self.scattered_unchecked(x, self.level_for(d)))
    }

    /// Total field `u = u^s + e^{i k ω·x}` and its gradient.
    pub fn total_field(&self, x: Vec2) -> Result<(Complex64, [Complex64; 2]), SolverError> {
        let (us, gs) = self.scattered_field(x)?;
        let (ui, gi) = incident_field(&self.system.wave, x);
        Ok((us + ui, [gs[0] + gi[0], gs[1] + gi[1]]))
    }

    /// Far-field pattern at `m >= 64` uniformly spaced directions starting at angle 0.
    pub fn far_field(&self, m: usize) -> Result<FarFieldPattern, SolverError> {
        if m < 64 {
            return Err(SolverError::TooFewDirections(m));
        }
        let angles: Vec<f64> = (0..m).map(|i| 2.0 * PI * i as f64 / m as f64).collect();
        let values = angles
            .iter()
            .map(|&a| self.far_field_at(Vec2::from_angle(a)))
            .collect();
        Ok(FarFieldPattern::new(self.system.wave, angles, values))
    }

    /// `u∞(x̂)` normalised so that `u^s(x) = e^{ikr}/sqrt(r) (u∞(x̂) + O(1/r))`.
    pub fn far_field_at(&self, xhat: Vec2) -> Complex64 {
        let sys = &self.system;
        if sys.nodes.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let k = sys.wave.k;
        let mut acc = Complex64::new(0.0, 0.0);
        for (node, &phi) in sys.nodes.iter().zip(&self.coeffs) {
            let factor = k * xhat.dot(node.normal) + sys.eta * node.speed;
            let phase = Complex64::from_polar(1.0, -k * xhat.dot(node.pos));
            acc += phase * phi * (factor * node.weight);
        }
        acc * Complex64::from_polar(1.0 / (8.0 * PI * k).sqrt(), -PI / 4.0)
    }
}

impl Field for Density {
    fn sample(&self, x: Vec2) -> Result<FieldSample, FieldError> {
        let d = self.check_point(x)?;
        let (ui, gi) = incident_field(&self.system.wave, x);
        if self.system.nodes.is_empty() {
            return Ok(FieldSample {
                value: ui,
                gradient: gi,
            });
        }
        let (us, gs) = self.scattered_unchecked(x, self.level_for(d));
        Ok(FieldSample {
            value: us + ui,
            gradient: [gs[0] + gi[0], gs[1] + gi[1]],
        })
    }

    fn wavenumber(&self) -> f64 {
        self.system.wave.k
    }

    fn guard_distance(&self) -> f64 {
        if self.system.nodes.is_empty() {
            0.0
        } else {
            self.guard()
        }
    }
}

/// `e(r) = |sqrt(r) e^{-ikr} u^s(r x̂) - u∞(x̂)|` for each radius.
pub fn radial_limit_check(
    d: &Density,
    xhat: Vec2,
    radii: &[f64],
) -> Result<Vec<f64>, SolverError> {
    let xhat = xhat.normalized();
    let k = d.wave().k;
    let uinf = d.far_field_at(xhat);
    radii
        .iter()
        .map(|&r| {
            let (us, _) = d.scattered_field(xhat * r)?;
            let scaled = us * Complex64::from_polar(r.sqrt(), -k * r);
            Ok((scaled - uinf).norm())
        })
        .collect()
}

/// A probe point offset from a boundary cell interior along its normal.
#[derive(Debug, Clone, Copy)]
pub struct TraceProbe {
    pub boundary_point: Vec2,
    pub normal: Vec2,
    pub point: Vec2,
}

/// Probes at `per_cell` interior points of every boundary cell, offset by
/// `delta` along the exterior normal. Cell parameters avoid the outer tenth
/// of each cell so that probes stay away from corners.
pub fn trace_probes(s: &Scatterer, delta: f64, per_cell: usize) -> Vec<TraceProbe> {
    let mut out = Vec::new();
    for c in s.boundary_cells() {
        for i in 0..per_cell {
            let t = 0.1 + 0.8 * (i as f64 + 0.5) / per_cell as f64;
            let b = c.point_at(t);
            out.push(TraceProbe {
                boundary_point: b,
                normal: c.normal,
                point: b + c.normal * delta,
            });
        }
    }
    out
}

/// Largest `|u|` over the probes; small values certify the Dirichlet condition.
pub fn boundary_trace_check(d: &Density, probes: &[TraceProbe]) -> Result<f64, SolverError> {
    let mut worst: f64 = 0.0;
    for p in probes {
        let (u, _) = d.total_field(p.point)?;
        worst = worst.max(u.norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upsample_reproduces_trig_polynomial() {
        let n = 16;
        let step = 2.0 * PI / n as f64;
        let phase = 0.5 * step;
        let f = |t: f64| Complex64::new((3.0 * t).cos() + 0.5 * (2.0 * t).sin(), (5.0 * t).sin());
        let coarse: Vec<Complex64> = (0..n).map(|j| f(phase + j as f64 * step)).collect();
        for factor in [2usize, 4, 8] {
            let fine = upsample(&coarse, factor, phase);
            for (i, v) in fine.iter().enumerate() {
                let t = phase / factor as f64 + i as f64 * step / factor as f64;
                assert!((v - f(t)).norm() < 1e-13, "factor {factor} i {i}");
            }
        }
    }
}
