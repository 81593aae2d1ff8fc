use super::start::near_offset;
use super::{HiddenPath, StartKind, CROSSING_TOL_DEG, MAX_TURN_DEG, MONOTONE_SAMPLES};
use crate::geometry::{point_segment_distance, Vec2};
use crate::nodal::{NodalDecomposition, SampledField};
use serde::{Deserialize, Serialize};

/// A crossing of the nodal set found by walking the path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingCheck {
    pub t: f64,
    pub point: Vec2,
    /// Angle between the path and the nodal line, in degrees within `[0, 90]`.
    pub angle_deg: f64,
    pub grad_norm: f64,
    /// `v` strictly monotone on samples across the crossing.
    pub monotone: bool,
    /// No critical point within one grid step.
    pub clear_of_critical: bool,
    pub ok: bool,
}

/// Mechanical check of the path conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathReport {
    /// The path begins at `x₁`, on `∂G` for boundary starts.
    pub starts_on_boundary: bool,
    /// Every later sample lies in `G`.
    pub stays_in_g: bool,
    /// `v` can be evaluated along the path away from the entry segment.
    pub evaluable: bool,
    /// The path passes within one grid step of the target.
    pub passes_target: bool,
    /// The last sample has norm at least the escape radius.
    pub escapes: bool,
    pub parameters_increasing: bool,
    pub max_turn_deg: f64,
    pub crossings: Vec<CrossingCheck>,
    /// Detected crossings agree with those recorded by the builder.
    pub crossings_match: bool,
    /// No sample or chord midpoint within one grid step of a critical point.
    pub avoids_critical_points: bool,
    pub certified: bool,
    pub failures: Vec<String>,
}

/// Walks the path, detects every sign change of `v` independently of the
/// builder, and checks angle, gradient, monotonicity and clearance at each.
pub fn verify_path(p: &HiddenPath, f: &SampledField<'_>, d: &NodalDecomposition) -> PathReport {
    let s = f.scatterer();
    let h = f.h();
    let lambda = 2.0 * std::f64::consts::PI / f.wavenumber();
    let guard = near_offset(f.field());
    let mut failures = Vec::new();
    let samples = &p.samples;
    let first = samples.first().map(|x| x.point);

    let starts_on_boundary = match p.start.kind {
        StartKind::Boundary { .. } => {
            first == Some(p.start.point) && s.distance_to_boundary(p.start.point) <= 1e-9 * (1.0 + s.bounding_radius())
        }
        StartKind::Anchor => first == Some(p.start.point) && (s.is_empty() || !s.contains(p.start.point)),
    };
    if !starts_on_boundary {
        failures.push("path does not start at x₁ on the boundary".to_string());
    }

    let stays_in_g = s.is_empty()
        || samples.iter().skip(1).all(|x| !s.contains(x.point))
            && samples.windows(2).all(|w| !s.contains((w[0].point + w[1].point) * 0.5));
    if !stays_in_g {
        failures.push("path enters the scatterer".to_string());
    }

    let passes_target = match p.target {
        None => true,
        Some(y) => samples
            .windows(2)
            .map(|w| point_segment_distance(y, w[0].point, w[1].point))
            .fold(f64::INFINITY, f64::min)
            <= h,
    };
    if !passes_target {
        failures.push("path misses the target".to_string());
    }

    let escapes = p.end().norm() >= p.escape_radius;
    if !escapes {
        failures.push(format!("path ends at norm {:.4} below the escape radius", p.end().norm()));
    }

    let parameters_increasing = samples.windows(2).all(|w| w[1].t > w[0].t);
    if !parameters_increasing {
        failures.push("parameters are not strictly increasing".to_string());
    }
    let max_turn_deg = p.max_turn_deg();
    if max_turn_deg > MAX_TURN_DEG {
        failures.push(format!("tangent turns by {max_turn_deg:.2}° between samples"));
    }

    let avoids_critical_points = d.critical_points.iter().all(|c| {
        samples.iter().all(|x| x.point.distance(*c) > h)
            && samples.windows(2).all(|w| point_segment_distance(*c, w[0].point, w[1].point) > h)
    });
    if !avoids_critical_points {
        failures.push("path passes within h of a critical point".to_string());
    }

    // sign changes of v along the path
    let entry_zone = 2.5 * h + 4.0 * guard;
    let v_at = |x: Vec2| -> Option<f64> {
        if !f.window().contains(x) {
            return None;
        }
        f.evaluate(x).ok().map(|smp| smp.value.re)
    };
    let mut evaluable = true;
    let mut last: Option<(f64, f64)> = None;
    let mut raw: Vec<f64> = Vec::new();
    for smp in samples {
        let Some(v) = v_at(smp.point) else {
            if smp.point.distance(p.start.point) > entry_zone {
                evaluable = false;
            }
            continue;
        };
        if v == 0.0 {
            continue;
        }
        if let Some((t0, v0)) = last {
            if v0.signum() != v.signum() {
                // bisection along the path
                let (mut a, mut b) = (t0, smp.t);
                let sa = v0.signum();
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    match v_at(p.point_at(m)) {
                        Some(vm) if vm.signum() == sa => a = m,
                        Some(_) => b = m,
                        None => break,
                    }
                }
                raw.push(0.5 * (a + b));
            }
        }
        last = Some((smp.t, v));
    }
    if !evaluable {
        failures.push("v cannot be evaluated along part of the path".to_string());
    }

    let total = p.length();
    let mut crossings = Vec::with_capacity(raw.len());
    for (i, &tc) in raw.iter().enumerate() {
        let c = p.point_at(tc);
        let eps = 1e-3 * h;
        let tangent = (p.point_at((tc + eps).min(total)) - p.point_at((tc - eps).max(0.0))).normalized();
        let (grad, gnorm) = match f.evaluate(c) {
            Ok(smp) => {
                let g = smp.real_gradient();
                (g, g.norm())
            }
            Err(_) => (Vec2::ZERO, 0.0),
        };
        let angle_deg = if gnorm > 0.0 {
            90.0 - tangent.dot(grad * (1.0 / gnorm)).abs().min(1.0).acos().to_degrees()
        } else {
            0.0
        };
        // half-width of the monotonicity window
        let prev_gap = if i > 0 { tc - raw[i - 1] } else { tc };
        let next_gap = if i + 1 < raw.len() { raw[i + 1] - tc } else { total - tc };
        let recorded = p
            .crossings
            .iter()
            .filter(|x| x.point.distance(c) <= h)
            .map(|x| x.stub_half_length)
            .next();
        let half = recorded
            .unwrap_or(lambda / 16.0)
            .min(0.5 * prev_gap)
            .min(0.5 * next_gap);
        let mut monotone = half > 0.0;
        let mut prev_v = f64::NEG_INFINITY;
        let orient = v_at(p.point_at((tc + half).min(total))).map(|v| v.signum()).unwrap_or(0.0);
        for k in 0..MONOTONE_SAMPLES {
            let t = tc + half * (2.0 * k as f64 / (MONOTONE_SAMPLES - 1) as f64 - 1.0);
            match v_at(p.point_at(t)) {
                Some(v) if v * orient > prev_v => prev_v = v * orient,
                _ => {
                    monotone = false;
                    break;
                }
            }
        }
        let clear_of_critical = d.critical_points.iter().all(|q| q.distance(c) > h);
        let ok = angle_deg >= 90.0 - CROSSING_TOL_DEG
            && gnorm >= d.params.grad_floor
            && monotone
            && clear_of_critical;
        if !ok {
            failures.push(format!(
                "crossing at {c:?}: angle {angle_deg:.2}°, |∇v| {gnorm:.3e}, monotone {monotone}, clear {clear_of_critical}"
            ));
        }
        crossings.push(CrossingCheck {
            t: tc,
            point: c,
            angle_deg,
            grad_norm: gnorm,
            monotone,
            clear_of_critical,
            ok,
        });
    }

    let crossings_match = p.crossings.is_empty() && p.domains.is_empty()
        || p.crossings.len() == crossings.len()
            && p
                .crossings
                .iter()
                .all(|r| crossings.iter().any(|c| c.point.distance(r.point) <= h));
    if !crossings_match {
        failures.push(format!(
            "{} crossings detected, {} recorded by the builder",
            crossings.len(),
            p.crossings.len()
        ));
    }

    let certified = failures.is_empty();
    PathReport {
        starts_on_boundary,
        stays_in_g,
        evaluable,
        passes_target,
        escapes,
        parameters_increasing,
        max_turn_deg,
        crossings,
        crossings_match,
        avoids_critical_points,
        certified,
        failures,
    }
}
