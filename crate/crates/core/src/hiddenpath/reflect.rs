use super::PathError;
use crate::field::{Field, FieldError, FieldSample};
use crate::geometry::{Interval, Line, Scatterer, Vec2};
use crate::nodal::{FlatSegment, Window};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};

/// Reflection data for one candidate flat segment.
///
/// Nodes live on a grid aligned with the line, `x(a, b) = p + a·h·τ + b·h·n`
/// with `τ` the line direction and `n` its normal, so the reflection maps the
/// node `(a, b)` to `(a, −b)` and `E⁻` is the exact image of `E⁺`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionFrame {
    pub line: Line,
    /// Component of the line inside `G` through the segment, clipped to the window.
    pub s_tilde: Vec<Interval>,
    pub h: f64,
    /// Grid indices `(a, b)` with `b > 0`.
    pub e_plus: Vec<(i64, i64)>,
    /// The reflected indices `(a, −b)`.
    pub e_minus: Vec<(i64, i64)>,
    /// `max |u(x) + u(Rx)|` over `E⁺`.
    pub oddness_residual: f64,
    /// `max |∇u|` over `E`.
    pub scale: f64,
    /// `2·dev_tol·scale`: the residual a genuinely flat piece could produce
    /// from the allowed deviation of the fitted line.
    pub threshold: f64,
    pub refuted: bool,
}

impl ReflectionFrame {
    pub fn node(&self, a: i64, b: i64) -> Vec2 {
        grid_node(&self.line, self.h, a, b)
    }
}

fn grid_node(line: &Line, h: f64, a: i64, b: i64) -> Vec2 {
    line.point + line.direction * (a as f64 * h) + line.normal() * (b as f64 * h)
}

fn grad_norm(s: &FieldSample) -> f64 {
    (s.gradient[0].norm_sqr() + s.gradient[1].norm_sqr()).sqrt()
}

/// Builds `E⁺` as the grid component of `G⁺ ∩ R(G⁻)` seeded along `S̃′` and
/// samples the oddness residual of `u` over it.
pub fn reflect_check(
    field: &dyn Field,
    s: &Scatterer,
    seg: &FlatSegment,
    window: Window,
    h: f64,
    dev_tol: f64,
) -> Result<ReflectionFrame, PathError> {
    let line = seg.line;
    let outer = [window.min, window.max, Vec2::new(window.min.x, window.max.y), Vec2::new(window.max.x, window.min.y)]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let s_tilde = if s.is_empty() {
        s.line_components(&line, outer)
    } else {
        s.line_component(&line, seg.witness_point, outer)?
    };
    if s_tilde.is_empty() {
        return Err(PathError::WindowTooSmall("the line misses the window".into()));
    }

    let guard = field.guard_distance() * 1.001;
    let usable = |x: Vec2| -> bool {
        window.contains(x) && (s.is_empty() || !s.contains(x) && s.distance_to_boundary(x) > guard)
    };
    let mut memo: HashMap<(i64, i64), bool> = HashMap::new();
    let mut member = |a: i64, b: i64| -> bool {
        *memo.entry((a, b)).or_insert_with(|| {
            b > 0 && usable(grid_node(&line, h, a, b)) && usable(grid_node(&line, h, a, -b))
        })
    };

    // seeds: first row above the line, over S̃′
    let mut queue = VecDeque::new();
    let mut seen: HashMap<(i64, i64), ()> = HashMap::new();
    let p0 = line.param_of(line.point);
    for iv in &s_tilde {
        let a_lo = ((iv.lo - p0) / h).ceil() as i64;
        let a_hi = ((iv.hi - p0) / h).floor() as i64;
        let span = (window.width() + window.height()) / h + 2.0;
        let (a_lo, a_hi) = (a_lo.max(-span as i64), a_hi.min(span as i64));
        for a in a_lo..=a_hi {
            if iv.contains(p0 + a as f64 * h) && member(a, 1) && seen.insert((a, 1), ()).is_none() {
                queue.push_back((a, 1));
            }
        }
    }
    let mut e_plus = Vec::new();
    while let Some((a, b)) = queue.pop_front() {
        e_plus.push((a, b));
        for (da, db) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let nb = (a + da, b + db);
            if !seen.contains_key(&nb) && member(nb.0, nb.1) {
                seen.insert(nb, ());
                queue.push_back(nb);
            }
        }
    }
    if e_plus.is_empty() {
        return Err(PathError::WindowTooSmall("no grid node of E⁺ inside the window".into()));
    }
    e_plus.sort_unstable();
    let e_minus: Vec<(i64, i64)> = e_plus.iter().map(|&(a, b)| (a, -b)).collect();

    let (residual, scale) = e_plus
        .par_iter()
        .map(|&(a, b)| -> Result<(f64, f64), FieldError> {
            let up = field.sample(grid_node(&line, h, a, b))?;
            let um = field.sample(grid_node(&line, h, a, -b))?;
            Ok(((up.value + um.value).norm(), grad_norm(&up).max(grad_norm(&um))))
        })
        .try_reduce(|| (0.0, 0.0), |x, y| Ok((x.0.max(y.0), x.1.max(y.1))))?;
    let threshold = 2.0 * dev_tol * scale;
    Ok(ReflectionFrame {
        line,
        s_tilde,
        h,
        e_plus,
        e_minus,
        oddness_residual: residual,
        scale,
        threshold,
        refuted: residual > threshold,
    })
}

/// The odd part `(u − Ru)/2` of a field with respect to a line.
pub struct OddPart<F> {
    pub field: F,
    pub line: Line,
}

impl<F: Field> Field for OddPart<F> {
    fn sample(&self, x: Vec2) -> Result<FieldSample, FieldError> {
        let rx = crate::geometry::reflect(&x, &self.line);
        let a = self.field.sample(x)?;
        let b = self.field.sample(rx)?;
        // the gradient of u∘R is R applied to ∇u(Rx)
        let n = self.line.normal();
        let rg = |g: [Complex64; 2]| {
            let dn = g[0] * n.x + g[1] * n.y;
            [g[0] - dn * (2.0 * n.x), g[1] - dn * (2.0 * n.y)]
        };
        let gb = rg(b.gradient);
        Ok(FieldSample {
            value: (a.value - b.value) * 0.5,
            gradient: [(a.gradient[0] - gb[0]) * 0.5, (a.gradient[1] - gb[1]) * 0.5],
        })
    }

    fn wavenumber(&self) -> f64 {
        self.field.wavenumber()
    }

    fn guard_distance(&self) -> f64 {
        self.field.guard_distance()
    }

    fn is_complex(&self) -> bool {
        self.field.is_complex()
    }
}
