use super::{NodalError, Window};
use crate::field::{Field, FieldError, FieldSample};
use crate::geometry::{Scatterer, Vec2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeMask {
    InG,
    InD,
    NearBoundary,
}

/// Samples of `v = Re u`, `∇v` and `Im u` on a grid, together with the
/// evaluator that produced them.
pub struct SampledField<'a> {
    field: &'a dyn Field,
    scatterer: Scatterer,
    window: Window,
    h: f64,
    nx: usize,
    ny: usize,
    pub(crate) values: Vec<f64>,
    pub(crate) gradients: Vec<Vec2>,
    pub(crate) imag: Vec<f64>,
    pub(crate) mask: Vec<NodeMask>,
    complex: bool,
    max_abs_u: f64,
    max_abs_v: f64,
}

impl std::fmt::Debug for SampledField<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledField")
            .field("window", &self.window)
            .field("h", &self.h)
            .field("nx", &self.nx)
            .field("ny", &self.ny)
            .finish_non_exhaustive()
    }
}

/// Samples `field` on the grid of spacing `h` anchored at `window.min`.
pub fn sample_field<'a>(
    field: &'a dyn Field,
    s: &Scatterer,
    window: Window,
    h: f64,
) -> Result<SampledField<'a>, NodalError> {
    let k = field.wavenumber();
    let limit = 2.0 * PI / k / 20.0;
    if !(h > 0.0) || h > limit * (1.0 + 1e-12) {
        return Err(NodalError::ResolutionTooCoarse { h, limit });
    }
    if !(window.width() > 0.0) || !(window.height() > 0.0) {
        return Err(NodalError::EmptyWindow);
    }
    let nx = (window.width() / h + 1e-9).floor() as usize + 1;
    let ny = (window.height() / h + 1e-9).floor() as usize + 1;
    let guard = field.guard_distance();
    let tol = s.default_tolerance();

    let rows: Vec<Vec<(NodeMask, Option<FieldSample>)>> = (0..ny)
        .into_par_iter()
        .map(|j| {
            (0..nx)
                .map(|i| {
                    let x = Vec2::new(window.min.x + i as f64 * h, window.min.y + j as f64 * h);
                    if !s.is_empty() {
                        if s.contains(x) {
                            return (NodeMask::InD, None);
                        }
                        if s.distance_to_boundary(x) <= guard.max(tol) {
                            return (NodeMask::NearBoundary, None);
                        }
                    }
                    match field.sample(x) {
                        Ok(v) if v.value.re.is_finite() && v.value.im.is_finite() => {
                            (NodeMask::InG, Some(v))
                        }
                        Err(FieldError::PointInsideScatterer) => (NodeMask::InD, None),
                        _ => (NodeMask::NearBoundary, None),
                    }
                })
                .collect()
        })
        .collect();

    let n = nx * ny;
    let mut values = vec![0.0; n];
    let mut gradients = vec![Vec2::ZERO; n];
    let mut imag = vec![0.0; n];
    let mut mask = vec![NodeMask::InD; n];
    let mut max_abs_u: f64 = 0.0;
    let mut max_abs_v: f64 = 0.0;
    for (j, row) in rows.into_iter().enumerate() {
        for (i, (m, sample)) in row.into_iter().enumerate() {
            let idx = j * nx + i;
            mask[idx] = m;
            if let Some(sm) = sample {
                values[idx] = sm.value.re;
                imag[idx] = sm.value.im;
                gradients[idx] = sm.real_gradient();
                max_abs_u = max_abs_u.max(sm.value.norm());
                max_abs_v = max_abs_v.max(sm.value.re.abs());
            }
        }
    }
    Ok(SampledField {
        field,
        scatterer: s.clone(),
        window,
        h,
        nx,
        ny,
        values,
        gradients,
        imag,
        mask,
        complex: field.is_complex(),
        max_abs_u,
        max_abs_v,
    })
}

impl<'a> SampledField<'a> {
    pub fn field(&self) -> &'a dyn Field {
        self.field
    }

    pub fn scatterer(&self) -> &Scatterer {
        &self.scatterer
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn wavenumber(&self) -> f64 {
        self.field.wavenumber()
    }

    /// `(nx, ny)` node counts.
    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn is_complex(&self) -> bool {
        self.complex
    }

    pub fn max_abs_u(&self) -> f64 {
        self.max_abs_u
    }

    pub fn max_abs_v(&self) -> f64 {
        self.max_abs_v
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(
            self.window.min.x + i as f64 * self.h,
            self.window.min.y + j as f64 * self.h,
        )
    }

    pub fn node_at(&self, idx: usize) -> Vec2 {
        let (i, j) = self.coords(idx);
        self.node(i, j)
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    pub fn gradient(&self, i: usize, j: usize) -> Vec2 {
        self.gradients[self.index(i, j)]
    }

    pub fn imag(&self, i: usize, j: usize) -> f64 {
        self.imag[self.index(i, j)]
    }

    pub fn mask(&self, i: usize, j: usize) -> NodeMask {
        self.mask[self.index(i, j)]
    }

    pub fn masks(&self) -> &[NodeMask] {
        &self.mask
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Nearest grid node to `x`, if `x` lies within the grid.
    pub fn nearest_node(&self, x: Vec2) -> Option<(usize, usize)> {
        let fi = ((x.x - self.window.min.x) / self.h).round();
        let fj = ((x.y - self.window.min.y) / self.h).round();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    /// Whether `x` lies in a grid cell whose four corners are in `G`.
    pub fn in_sampled_g(&self, x: Vec2) -> bool {
        let fx = (x.x - self.window.min.x) / self.h;
        let fy = (x.y - self.window.min.y) / self.h;
        if fx < 0.0 || fy < 0.0 {
            return false;
        }
        let (i, j) = (fx.floor() as usize, fy.floor() as usize);
        let i = i.min(self.nx.saturating_sub(2));
        let j = j.min(self.ny.saturating_sub(2));
        if fx > (self.nx - 1) as f64 || fy > (self.ny - 1) as f64 {
            return false;
        }
        [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)]
            .iter()
            .all(|&(a, b)| self.mask(a, b) == NodeMask::InG)
    }

    /// Exact evaluation through the underlying field, refusing points in `D`.
    pub fn evaluate(&self, x: Vec2) -> Result<FieldSample, FieldError> {
        if !self.scatterer.is_empty() && self.scatterer.contains(x) {
            return Err(FieldError::PointInsideScatterer);
        }
        self.field.sample(x)
    }
}
