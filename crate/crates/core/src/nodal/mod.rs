//! Nodal sets of real Helmholtz fields sampled on a grid.
//!
//! A field is sampled on an axis-aligned grid over a window of the exterior
//! domain. The zero set of `v = Re u` is traced by marching squares and its
//! vertices are projected back onto the exact zero set with the evaluator.
//! Nodal domains are sign components of the grid, adjacency between domains is
//! certified by runs of nodal vertices with a gradient bounded away from zero,
//! and domains are ordered breadth-first along certified adjacencies.

mod contour;
mod critical;
mod domains;
mod flat;
mod grid;
mod io;
mod zeros;

pub use contour::{extract_nodal_set, Polyline};
pub use critical::find_critical_points;
pub use domains::{
    nodal_domains, nodal_domains_with, order_domains, ordering_violations, Adjacency, Domain,
    NodalDecomposition, Witness,
};
pub use flat::{flat_points, flat_points_with_floor, FlatSegment};
pub use grid::{sample_field, NodeMask, SampledField};
pub use io::{render_svg, SvgCanvas};
pub(crate) use io::base_canvas;
pub use zeros::{complex_zeros, nodal_boundedness, NodalBoundedness};

use crate::geometry::Vec2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NodalError {
    #[error("grid spacing {h} exceeds the resolution floor {limit} (one twentieth of a wavelength)")]
    ResolutionTooCoarse { h: f64, limit: f64 },
    #[error("window is empty or degenerate")]
    EmptyWindow,
    #[error("adjacency graph is disconnected: components {components:?}")]
    DisconnectedAdjacency { components: Vec<Vec<usize>> },
    #[error("domain {0} does not exist")]
    InvalidDomain(usize),
    #[error("malformed nodal document: {0}")]
    Parse(String),
}

/// Axis-aligned rectangle `[min.x, max.x] × [min.y, max.y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub min: Vec2,
    pub max: Vec2,
}

impl Window {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Window { min, max }
    }

    /// Square of half-width `half` about `center`.
    pub fn centered(center: Vec2, half: f64) -> Self {
        Window {
            min: center - Vec2::new(half, half),
            max: center + Vec2::new(half, half),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    /// Radius of the largest disk about the origin inside the window, zero if
    /// the origin lies outside.
    pub fn inner_radius(&self) -> f64 {
        if !self.contains(Vec2::ZERO) {
            return 0.0;
        }
        (-self.min.x).min(self.max.x).min(-self.min.y).min(self.max.y)
    }
}

/// Thresholds for the nodal analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodalParams {
    /// Smallest `|∇v|` on a regular portion.
    pub grad_floor: f64,
    /// Largest `|v|` at an accepted critical point.
    pub v_floor: f64,
    /// Largest `|Im u|` for a vertex to count as a point of the complex nodal set.
    pub im_floor: f64,
    pub min_length: f64,
    pub dev_tol: f64,
    /// Vertices in an adjacency witness.
    pub witness_points: usize,
    /// Witness vertices keep at least this distance from critical points.
    pub critical_clearance: f64,
}

impl NodalParams {
    /// Scale-aware defaults for a sampled field.
    pub fn defaults(f: &SampledField<'_>) -> Self {
        let k = f.wavenumber();
        let lambda = 2.0 * std::f64::consts::PI / k;
        NodalParams {
            grad_floor: 1e-3 * k,
            v_floor: 1e-6,
            im_floor: 1e-6 * f.max_abs_u(),
            min_length: 0.25 * lambda,
            dev_tol: f.h(),
            witness_points: 5,
            critical_clearance: 2.0 * f.h(),
        }
    }
}
