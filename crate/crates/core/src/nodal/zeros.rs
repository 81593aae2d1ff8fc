//! The complex nodal set `𝒩_u = {Re u = 0} ∩ {Im u = 0}` and its extent.

use super::contour::cell_corners;
use super::domains::NodalDecomposition;
use super::grid::{NodeMask, SampledField};
use crate::geometry::Vec2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Newton's method on `(Re u, Im u) = 0` using the exact complex gradient.
fn newton_zero(f: &SampledField<'_>, x0: Vec2, radius: f64) -> Option<Vec2> {
    let k = f.wavenumber();
    let mut x = x0;
    for _ in 0..30 {
        let s = f.evaluate(x).ok()?;
        let (gr, gi) = (s.real_gradient(), s.imag_gradient());
        let det = gr.x * gi.y - gr.y * gi.x;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let (a, b) = (s.value.re, s.value.im);
        let dx = (gi.y * a - gr.y * b) / det;
        let dy = (gr.x * b - gi.x * a) / det;
        x = x - Vec2::new(dx, dy);
        if x.distance(x0) > radius {
            return None;
        }
        if dx.hypot(dy) < 1e-13 / k {
            break;
        }
    }
    Some(x)
}

/// Isolated zeros of the complex field inside the sampled part of `G`.
pub fn complex_zeros(f: &SampledField<'_>) -> Vec<Vec2> {
    if !f.is_complex() {
        return Vec::new();
    }
    let (nx, ny) = f.dims();
    let h = f.h();
    let changes = |vals: [f64; 4]| {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= 0.0 && hi >= 0.0
    };
    let mut candidates = Vec::new();
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let c = cell_corners(f, i, j);
            if c.iter().any(|&x| f.mask[x] != NodeMask::InG) {
                continue;
            }
            if changes(c.map(|x| f.values[x])) && changes(c.map(|x| f.imag[x])) {
                candidates.push(f.node(i, j) + Vec2::new(0.5 * h, 0.5 * h));
            }
        }
    }
    let scale = f.max_abs_u();
    let s = f.scatterer();
    let found: Vec<Vec2> = candidates
        .par_iter()
        .filter_map(|&x0| {
            let x = newton_zero(f, x0, h)?;
            if !s.is_empty() && s.distance_to_boundary(x) < h {
                return None;
            }
            let v = f.evaluate(x).ok()?;
            (v.value.norm() <= 1e-8 * scale).then_some(x)
        })
        .collect();
    let mut out: Vec<Vec2> = Vec::new();
    for p in found {
        if out.iter().all(|q| q.distance(p) > 0.5 * h) {
            out.push(p);
        }
    }
    out.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
    out
}

/// Extent of `𝒩_u` within the window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalBoundedness {
    /// Largest norm of a point of `𝒩_u` found in the window. `u` vanishes on
    /// the boundary, so this is never below the scatterer's bounding radius.
    pub r_nodal: f64,
    /// Isolated zeros of `u`.
    pub zeros: Vec<Vec2>,
    /// Nodal vertices of `v` with `|Im u| <= im_floor`.
    pub flagged_vertices: Vec<Vec2>,
    /// Radius of the largest disk about the origin inside the window.
    pub window_radius: f64,
    /// Whether the annulus `r_nodal < r < 2 r_nodal` lies inside the window.
    pub annulus_covered: bool,
    /// Points of `𝒩_u` in the annulus (zero when bounded).
    pub annulus_points: usize,
    /// Smallest `|u|` over grid nodes of `G` in the annulus, if any.
    pub annulus_min_abs_u: Option<f64>,
}

pub fn nodal_boundedness(f: &SampledField<'_>, d: &NodalDecomposition) -> NodalBoundedness {
    let zeros = complex_zeros(f);
    let flagged_vertices: Vec<Vec2> = d
        .polylines
        .iter()
        .flat_map(|pl| {
            pl.points
                .iter()
                .zip(&pl.imag)
                .filter(|(_, im)| im.abs() <= d.params.im_floor)
                .map(|(p, _)| *p)
        })
        .collect();
    let r_nodal = zeros
        .iter()
        .chain(&flagged_vertices)
        .map(|p| p.norm())
        .fold(if f.scatterer().is_empty() { 0.0 } else { f.scatterer().bounding_radius() }, f64::max);
    let window_radius = f.window().inner_radius();
    let in_annulus = |r: f64| r > r_nodal * (1.0 + 1e-12) && r < 2.0 * r_nodal;
    let annulus_points = zeros
        .iter()
        .chain(&flagged_vertices)
        .filter(|p| in_annulus(p.norm()))
        .count();
    let mut annulus_min_abs_u: Option<f64> = None;
    for (idx, m) in f.mask.iter().enumerate() {
        if *m != NodeMask::InG {
            continue;
        }
        let r = f.node_at(idx).norm();
        if in_annulus(r) {
            let u = f.values[idx].hypot(f.imag[idx]);
            annulus_min_abs_u = Some(annulus_min_abs_u.map_or(u, |m| m.min(u)));
        }
    }
    NodalBoundedness {
        r_nodal,
        zeros,
        flagged_vertices,
        window_radius,
        annulus_covered: 2.0 * r_nodal <= window_radius,
        annulus_points,
        annulus_min_abs_u,
    }
}
