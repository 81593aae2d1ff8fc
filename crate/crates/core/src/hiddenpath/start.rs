use super::PathError;
use crate::field::Field;
use crate::geometry::{CellOwner, Scatterer, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StartKind {
    /// Interior point of a boundary cell.
    Boundary { owner: CellOwner, cell_param: f64 },
    /// A free point in `G`, used with synthetic fields that have no scatterer.
    Anchor,
}

/// Start point `x₁` with the unit normal `ν` pointing into `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStart {
    pub point: Vec2,
    pub normal: Vec2,
    pub kind: StartKind,
    /// Estimated `∂v/∂ν` at the start (zero when not estimated).
    pub normal_derivative: f64,
}

impl PathStart {
    pub fn anchor(point: Vec2, direction: Vec2) -> Self {
        PathStart {
            point,
            normal: direction.normalized(),
            kind: StartKind::Anchor,
            normal_derivative: 0.0,
        }
    }
}

/// Near-boundary offset unit used when probing the normal derivative.
pub(crate) fn near_offset(field: &dyn Field) -> f64 {
    let g = field.guard_distance();
    if g > 0.0 {
        g
    } else {
        1e-3 * 2.0 * std::f64::consts::PI / field.wavenumber()
    }
}

/// `∂v/∂ν` at `x` from the exact gradient at offsets `{2, 4, 8}·h_near`
/// along `ν`, extrapolated quadratically back to the boundary.
fn normal_derivative(field: &dyn Field, x: Vec2, nu: Vec2, h_near: f64) -> Option<f64> {
    const WEIGHTS: [(f64, f64); 3] = [(2.0, 8.0 / 3.0), (4.0, -2.0), (8.0, 1.0 / 3.0)];
    let mut acc = 0.0;
    for (o, w) in WEIGHTS {
        let s = field.sample(x + nu * (o * h_near)).ok()?;
        acc += w * s.real_gradient().dot(nu);
    }
    Some(acc)
}

/// Chooses `x₁` among `candidates` points per boundary cell: the midpoint
/// plus seeded samples concentrated around it, all at cell parameters in
/// `[0.15, 0.85]` so that corners are never candidates. Returns the candidate
/// with the largest `|∂v/∂ν|`.
pub fn pick_start(
    s: &Scatterer,
    field: &dyn Field,
    candidates: usize,
    seed: u64,
    grad_floor: f64,
) -> Result<PathStart, PathError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h_near = near_offset(field);
    let mut best: Option<PathStart> = None;
    for cell in s.boundary_cells() {
        for c in 0..candidates.max(1) {
            let t = if c == 0 {
                0.5
            } else {
                // triangular density on [0.15, 0.85] peaked at the midpoint
                0.5 + 0.35 * (rng.gen::<f64>() + rng.gen::<f64>() - 1.0)
            };
            let x = cell.point_at(t);
            let Some(dn) = normal_derivative(field, x, cell.normal, h_near) else {
                continue;
            };
            if best.is_none_or(|b| dn.abs() > b.normal_derivative.abs()) {
                best = Some(PathStart {
                    point: x,
                    normal: cell.normal,
                    kind: StartKind::Boundary {
                        owner: cell.owner,
                        cell_param: t,
                    },
                    normal_derivative: dn,
                });
            }
        }
    }
    match best {
        Some(b) if b.normal_derivative.abs() >= grad_floor => Ok(b),
        _ => Err(PathError::NoRegularBoundaryPoint),
    }
}
