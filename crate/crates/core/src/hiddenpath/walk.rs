use super::reflect::reflect_check;
use super::verify::verify_path;
use super::HiddenPath;
use crate::geometry::Vec2;
use crate::nodal::{flat_points, FlatSegment, NodalDecomposition, SampledField};
use serde::{Deserialize, Serialize};

/// A crossing of the path that lies on a flat piece of the nodal set which
/// the reflection test could not refute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatVisit {
    pub t: f64,
    pub point: Vec2,
    pub segment: FlatSegment,
    pub residual: f64,
    pub threshold: f64,
}

fn on_segment(seg: &FlatSegment, x: Vec2, tol: f64) -> bool {
    let t = seg.line.param_of(x);
    seg.line.signed_distance(x).abs() <= seg.max_deviation + tol
        && t >= seg.extent.lo - tol
        && t <= seg.extent.hi + tol
}

/// Starting after each accepted flat point, looks for the next crossing of
/// the path that sits on a flat candidate surviving the reflection test.
/// Stops when no later crossing qualifies.
pub fn flat_point_walk(
    p: &HiddenPath,
    d: &NodalDecomposition,
    f: &SampledField<'_>,
    min_length: f64,
    dev_tol: f64,
) -> Vec<FlatVisit> {
    let h = f.h();
    let candidates = flat_points(d, min_length, dev_tol);
    if candidates.is_empty() {
        return Vec::new();
    }
    let mut crossings: Vec<(f64, Vec2)> = if p.crossings.is_empty() {
        verify_path(p, f, d).crossings.iter().map(|c| (c.t, c.point)).collect()
    } else {
        p.crossings.iter().map(|c| (c.t, c.point)).collect()
    };
    crossings.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut visits: Vec<FlatVisit> = Vec::new();
    let mut t_prev = f64::NEG_INFINITY;
    loop {
        let next = crossings.iter().filter(|c| c.0 > t_prev).find_map(|&(t, x)| {
            candidates.iter().filter(|seg| on_segment(seg, x, h)).find_map(|seg| {
                let frame = reflect_check(f.field(), f.scatterer(), seg, f.window(), h, dev_tol).ok()?;
                (!frame.refuted).then(|| FlatVisit {
                    t,
                    point: x,
                    segment: seg.clone(),
                    residual: frame.oddness_residual,
                    threshold: frame.threshold,
                })
            })
        });
        match next {
            Some(v) => {
                t_prev = v.t;
                visits.push(v);
            }
            None => return visits,
        }
    }
}
