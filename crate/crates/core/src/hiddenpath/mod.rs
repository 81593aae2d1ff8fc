//! Paths from the boundary to infinity that meet the nodal set of `v = Re u`
//! only orthogonally, and the reflection test for flat pieces of `𝒩_u`.
//!
//! A path starts at a boundary point where `∂v/∂ν ≠ 0`, runs inside one nodal
//! domain at a time, crosses from domain to domain along short straight stubs
//! aligned with `∇v` at certified regular points, passes through a designated
//! nodal point, and ends beyond an escape radius. The unbounded tail of the
//! ideal path is truncated there.

mod build;
mod io;
mod reflect;
mod start;
mod verify;
mod walk;

pub use build::build_path;
pub use io::render_path_svg;
pub use reflect::{reflect_check, OddPart, ReflectionFrame};
pub use start::{pick_start, PathStart, StartKind};
pub use verify::{verify_path, CrossingCheck, PathReport};
pub use walk::{flat_point_walk, FlatVisit};

use crate::field::FieldError;
use crate::geometry::{GeometryError, Vec2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest turn between consecutive sample tangents.
pub const MAX_TURN_DEG: f64 = 10.0;
/// Crossings must meet the nodal line within this many degrees of a right angle.
pub const CROSSING_TOL_DEG: f64 = 5.0;
/// Samples used to check that `v` is strictly monotone across a crossing.
pub const MONOTONE_SAMPLES: usize = 9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("no boundary point with |∂v/∂ν| above the gradient floor")]
    NoRegularBoundaryPoint,
    #[error("target point {0:?} is not a regular nodal point")]
    TargetOnCriticalPoint(Vec2),
    #[error("no certified route to the escape radius: {0}")]
    NoRouteToInfinity(String),
    #[error("invalid start: {0}")]
    StartInvalid(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("escape radius {radius} must exceed {required}")]
    EscapeRadiusTooSmall { radius: f64, required: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("malformed path document: {0}")]
    Parse(String),
}

/// One sample of the path: arc-length parameter, position and unit tangent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub point: Vec2,
    pub tangent: Vec2,
}

/// A crossing of the nodal set placed by the builder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub point: Vec2,
    /// Unit tangent of the nodal polyline at the crossing.
    pub nodal_tangent: Vec2,
    pub grad_norm: f64,
    /// Angle between the path and the nodal line, in degrees.
    pub angle_deg: f64,
    /// Half-length of the straight stub through the crossing.
    pub stub_half_length: f64,
    pub from_domain: usize,
    pub to_domain: usize,
}

/// A piecewise-smooth path from `start` through `target` to the escape radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HiddenPath {
    pub samples: Vec<PathSample>,
    pub crossings: Vec<Crossing>,
    pub start: PathStart,
    pub target: Option<Vec2>,
    /// Parameter at which the path passes through `target`.
    pub target_t: Option<f64>,
    pub escape_radius: f64,
    /// Domains visited, in order.
    pub domains: Vec<usize>,
}

impl HiddenPath {
    /// A path through the given points with tangents taken from the chords.
    /// Crossings are left empty; [`verify_path`] detects them independently.
    pub fn from_points(
        points: &[Vec2],
        start: PathStart,
        target: Option<Vec2>,
        escape_radius: f64,
    ) -> HiddenPath {
        let samples = samples_from_points(points);
        let target_t = target.and_then(|y| {
            samples
                .iter()
                .min_by(|a, b| a.point.distance(y).total_cmp(&b.point.distance(y)))
                .map(|s| s.t)
        });
        HiddenPath {
            samples,
            crossings: Vec::new(),
            start,
            target,
            target_t,
            escape_radius,
            domains: Vec::new(),
        }
    }

    pub fn end(&self) -> Vec2 {
        self.samples.last().map(|s| s.point).unwrap_or(self.start.point)
    }

    pub fn length(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(0.0)
    }

    /// Point at arc length `t`, by linear interpolation between samples.
    pub fn point_at(&self, t: f64) -> Vec2 {
        let s = &self.samples;
        if s.is_empty() {
            return self.start.point;
        }
        let i = s.partition_point(|x| x.t <= t);
        if i == 0 {
            return s[0].point;
        }
        if i >= s.len() {
            return s[s.len() - 1].point;
        }
        let (a, b) = (&s[i - 1], &s[i]);
        let w = (t - a.t) / (b.t - a.t);
        a.point + (b.point - a.point) * w
    }

    /// Largest angle between consecutive sample tangents, in degrees.
    pub fn max_turn_deg(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| angle_between(w[0].tangent, w[1].tangent))
            .fold(0.0, f64::max)
    }
}

/// Unsigned angle between two unit vectors in degrees.
pub(crate) fn angle_between(a: Vec2, b: Vec2) -> f64 {
    a.cross(b).atan2(a.dot(b)).abs().to_degrees()
}

/// Samples along a polyline, dropping repeated points. Each tangent is the
/// direction of the following chord; the last one repeats its predecessor.
pub(crate) fn samples_from_points(points: &[Vec2]) -> Vec<PathSample> {
    let mut pts: Vec<Vec2> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.last().is_none_or(|q: &Vec2| q.distance(p) > 1e-12) {
            pts.push(p);
        }
    }
    let mut out = Vec::with_capacity(pts.len());
    let mut t = 0.0;
    for i in 0..pts.len() {
        if i > 0 {
            t += pts[i].distance(pts[i - 1]);
        }
        let tangent = if i + 1 < pts.len() {
            (pts[i + 1] - pts[i]).normalized()
        } else if i > 0 {
            (pts[i] - pts[i - 1]).normalized()
        } else {
            Vec2::new(1.0, 0.0)
        };
        out.push(PathSample {
            t,
            point: pts[i],
            tangent,
        });
    }
    out
}
