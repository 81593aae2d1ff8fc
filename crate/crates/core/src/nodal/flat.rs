use super::domains::NodalDecomposition;
use crate::geometry::{Interval, Line, Vec2};
use serde::{Deserialize, Serialize};

/// A piece of the nodal set that is straight to within `max_deviation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatSegment {
    pub line: Line,
    /// Parameter range of the vertices along `line`.
    pub extent: Interval,
    pub max_deviation: f64,
    /// Vertex nearest the middle of the extent.
    pub witness_point: Vec2,
    pub polyline: usize,
    /// Vertex index range `[first, last]` in the polyline.
    pub first: usize,
    pub last: usize,
}

/// Total-least-squares line through `pts` and the largest distance to it.
fn fit(pts: &[Vec2]) -> (Line, f64) {
    let n = pts.len() as f64;
    let c = pts.iter().fold(Vec2::ZERO, |a, &p| a + p) * (1.0 / n);
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in pts {
        let d = *p - c;
        sxx += d.x * d.x;
        syy += d.y * d.y;
        sxy += d.x * d.y;
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let line = Line {
        point: c,
        direction: Vec2::from_angle(theta),
    };
    let dev = pts
        .iter()
        .map(|p| line.signed_distance(*p).abs())
        .fold(0.0, f64::max);
    (line, dev)
}

fn path_length(pts: &[Vec2]) -> f64 {
    pts.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Flat segments using the decomposition's `im_floor`.
pub fn flat_points(d: &NodalDecomposition, min_length: f64, dev_tol: f64) -> Vec<FlatSegment> {
    flat_points_with_floor(d, min_length, dev_tol, d.params.im_floor)
}

/// Maximal sub-polylines of length at least `min_length` whose best-fit line
/// stays within `dev_tol` of every vertex. For complex fields only vertices
/// with `|Im u| <= im_floor` take part, so the segments lie on `𝒩_u`.
pub fn flat_points_with_floor(
    d: &NodalDecomposition,
    min_length: f64,
    dev_tol: f64,
    im_floor: f64,
) -> Vec<FlatSegment> {
    let mut out = Vec::new();
    for (pi, pl) in d.polylines.iter().enumerate() {
        let n = pl.points.len();
        let eligible = |i: usize| !d.complex || pl.imag[i].abs() <= im_floor;
        let mut i = 0;
        while i < n {
            if !eligible(i) {
                i += 1;
                continue;
            }
            let mut run_end = i;
            while run_end + 1 < n && eligible(run_end + 1) {
                run_end += 1;
            }
            let mut s = i;
            while s < run_end {
                // grow greedily while the fit holds
                let mut e = s + 1;
                while e < run_end && fit(&pl.points[s..=e + 1]).1 <= dev_tol {
                    e += 1;
                }
                let pts = &pl.points[s..=e];
                let (line, dev) = fit(pts);
                if dev <= dev_tol && path_length(pts) >= min_length {
                    let ts: Vec<f64> = pts.iter().map(|p| line.param_of(*p)).collect();
                    let lo = ts.iter().cloned().fold(f64::INFINITY, f64::min);
                    let hi = ts.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let mid = 0.5 * (lo + hi);
                    let witness_point = *pts
                        .iter()
                        .min_by(|a, b| {
                            let da = (line.param_of(**a) - mid).abs();
                            let db = (line.param_of(**b) - mid).abs();
                            da.partial_cmp(&db).unwrap()
                        })
                        .unwrap();
                    out.push(FlatSegment {
                        line,
                        extent: Interval { lo, hi },
                        max_deviation: dev,
                        witness_point,
                        polyline: pi,
                        first: s,
                        last: e,
                    });
                    s = e;
                } else {
                    s += 1;
                }
            }
            i = run_end + 1;
        }
    }
    out
}
