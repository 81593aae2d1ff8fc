use super::contour::cell_corners;
use super::grid::{NodeMask, SampledField};
use crate::geometry::Vec2;
use rayon::prelude::*;

/// Hessian of `v` by central differences of the exact gradient.
fn hessian(f: &SampledField<'_>, x: Vec2, step: f64) -> Option<[[f64; 2]; 2]> {
    let g = |p: Vec2| f.evaluate(p).ok().map(|s| s.real_gradient());
    let gxp = g(x + Vec2::new(step, 0.0))?;
    let gxm = g(x - Vec2::new(step, 0.0))?;
    let gyp = g(x + Vec2::new(0.0, step))?;
    let gym = g(x - Vec2::new(0.0, step))?;
    let hxx = (gxp.x - gxm.x) / (2.0 * step);
    let hyy = (gyp.y - gym.y) / (2.0 * step);
    let hxy = 0.5 * ((gxp.y - gxm.y) + (gyp.x - gym.x)) / (2.0 * step);
    Some([[hxx, hxy], [hxy, hyy]])
}

/// Newton iteration for `∇v = 0` started at `x0`, kept within `radius`.
fn newton_critical(f: &SampledField<'_>, x0: Vec2, radius: f64) -> Option<Vec2> {
    let k = f.wavenumber();
    let step = 1e-5 / k;
    let mut x = x0;
    for _ in 0..30 {
        let g = f.evaluate(x).ok()?.real_gradient();
        let h = hessian(f, x, step)?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (h[1][1] * g.x - h[0][1] * g.y) / det;
        let dy = (h[0][0] * g.y - h[1][0] * g.x) / det;
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

/// Nodal critical points (`v = 0` and `∇v = 0`) with the default `v_floor`.
pub fn find_critical_points(f: &SampledField<'_>, grad_floor: f64) -> Vec<Vec2> {
    find_critical_points_with(f, grad_floor, 1e-6)
}

/// Cells where `v` and both gradient components can vanish are refined by
/// Newton's method on `∇v = 0`; converged points with `|v| <= v_floor` and
/// `|∇v| <= grad_floor` are kept, merging duplicates closer than `h`.
pub fn find_critical_points_with(f: &SampledField<'_>, grad_floor: f64, v_floor: f64) -> Vec<Vec2> {
    let (nx, ny) = f.dims();
    let h = f.h();
    if nx < 2 || ny < 2 {
        return Vec::new();
    }
    let straddles = |vals: [f64; 4], tol: f64| {
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        lo <= tol && hi >= -tol
    };
    let mut candidates = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let c = cell_corners(f, i, j);
            if c.iter().any(|&x| f.mask[x] != NodeMask::InG) {
                continue;
            }
            let v = c.map(|x| f.values[x]);
            let gx = c.map(|x| f.gradients[x].x);
            let gy = c.map(|x| f.gradients[x].y);
            let gmax = c.iter().map(|&x| f.gradients[x].norm()).fold(0.0, f64::max);
            if straddles(v, 0.5 * gmax * h + v_floor)
                && straddles(gx, grad_floor)
                && straddles(gy, grad_floor)
            {
                candidates.push(f.node(i, j) + Vec2::new(0.5 * h, 0.5 * h));
            }
        }
    }
    let found: Vec<Vec2> = candidates
        .par_iter()
        .filter_map(|&x0| {
            let x = newton_critical(f, x0, h)?;
            let s = f.evaluate(x).ok()?;
            (s.value.re.abs() <= v_floor && s.real_gradient().norm() <= grad_floor).then_some(x)
        })
        .collect();
    let mut out: Vec<Vec2> = Vec::new();
    for p in found {
        if out.iter().all(|q| q.distance(p) > h) {
            out.push(p);
        }
    }
    out
}
