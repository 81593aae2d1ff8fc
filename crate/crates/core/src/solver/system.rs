use super::contour::{log_weights, Contour, DEFAULT_GRADING};
use super::eval::FineLevels;
use super::{incident_field, SolverError, WaveParams};
use crate::geometry::{Polygon, Scatterer, Vec2};
use crate::specfun::{bessel01, EULER_GAMMA};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::ops::Range;
use std::sync::Arc;

/// Boundary curves accepted by the solver: disjoint polygons, plus circles
/// (used only to validate the solver against the closed-form disk solution).
#[derive(Debug, Clone)]
pub struct Obstacle {
    pub(crate) polygons: Vec<Polygon>,
    pub(crate) circles: Vec<(Vec2, f64)>,
}

impl Obstacle {
    pub fn from_scatterer(s: &Scatterer) -> Result<Self, SolverError> {
        if !s.free_cells().is_empty() {
            return Err(SolverError::FreeCellsUnsupported);
        }
        Ok(Obstacle {
            polygons: s.polygons().to_vec(),
            circles: Vec::new(),
        })
    }

    pub fn disk(center: Vec2, radius: f64) -> Self {
        Obstacle {
            polygons: Vec::new(),
            circles: vec![(center, radius)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty() && self.circles.is_empty()
    }

    pub fn bounding_radius(&self) -> f64 {
        let p = self
            .polygons
            .iter()
            .flat_map(|p| p.vertices().iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let c = self
            .circles
            .iter()
            .map(|(c, r)| c.norm() + r)
            .fold(0.0, f64::max);
        p.max(c)
    }
}

/// Discretisation controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub nodes_per_wavelength: f64,
    /// Exponent of the corner grading.
    pub grading: u32,
    /// Lower bound on nodes per polygon edge.
    pub min_nodes_per_edge: usize,
    /// Lower bound on nodes per circle.
    pub min_nodes_per_circle: usize,
    /// Coupling parameter; `None` selects `eta = k`.
    pub eta: Option<f64>,
}

impl SolverOptions {
    pub fn with_resolution(nodes_per_wavelength: f64) -> Self {
        SolverOptions {
            nodes_per_wavelength,
            ..SolverOptions::default()
        }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            nodes_per_wavelength: 30.0,
            grading: DEFAULT_GRADING,
            min_nodes_per_edge: 32,
            min_nodes_per_circle: 64,
            eta: None,
        }
    }
}

/// Oversampling of graded edges relative to the nominal nodes per wavelength:
/// grading spends about half the nodes near the corners.
const GRADED_OVERSAMPLE: f64 = 3.0;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Node {
    pub contour: usize,
    /// Index within the contour.
    pub local: usize,
    pub anchor: usize,
    pub offset: Vec2,
    pub pos: Vec2,
    /// Unnormalised outward normal `(z2', -z1')`, of length `|z'|`.
    pub normal: Vec2,
    pub speed: f64,
    pub curvature_term: f64,
    /// Parameter step of the owning contour.
    pub weight: f64,
}

/// Discretised combined-field system for one obstacle and one incident wave.
#[derive(Debug)]
pub struct BoundarySystem {
    pub(crate) wave: WaveParams,
    pub(crate) eta: f64,
    pub(crate) options: SolverOptions,
    pub(crate) contours: Vec<Contour>,
    pub(crate) anchors: Vec<Vec2>,
    pub(crate) nodes: Vec<Node>,
    pub(crate) ranges: Vec<Range<usize>>,
    pub(crate) matrix: DMatrix<Complex64>,
    pub(crate) rhs: DVector<Complex64>,
    pub(crate) bounding_radius: f64,
}

impl BoundarySystem {
    pub fn wave(&self) -> WaveParams {
        self.wave
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dimension(&self) -> usize {
        self.nodes.len()
    }

    pub fn options(&self) -> SolverOptions {
        self.options
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Node counts per contour.
    pub fn contour_sizes(&self) -> Vec<usize> {
        self.contours.iter().map(|c| c.node_count()).collect()
    }

    /// Quadrature node positions.
    pub fn node_positions(&self) -> Vec<Vec2> {
        self.nodes.iter().map(|n| n.pos).collect()
    }

    /// Arc-length spacing between neighbouring nodes, largest over the boundary.
    pub fn max_spacing(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.speed * n.weight)
            .fold(0.0, f64::max)
    }

    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn distance_to_boundary(&self, x: Vec2) -> f64 {
        self.contours
            .iter()
            .map(|c| c.distance(x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn encloses(&self, x: Vec2) -> bool {
        self.contours.iter().any(|c| c.encloses(x))
    }

    fn diff(&self, i: usize, j: usize) -> Vec2 {
        let (a, b) = (&self.nodes[i], &self.nodes[j]);
        if a.anchor == b.anchor {
            a.offset - b.offset
        } else {
            (self.anchors[a.anchor] - self.anchors[b.anchor]) + (a.offset - b.offset)
        }
    }
}

/// Assembles the combined-field system for a polygonal scatterer.
pub fn assemble(
    s: &Scatterer,
    w: &WaveParams,
    nodes_per_wavelength: f64,
) -> Result<BoundarySystem, SolverError> {
    let obstacle = Obstacle::from_scatterer(s)?;
    assemble_obstacle(&obstacle, w, &SolverOptions::with_resolution(nodes_per_wavelength))
}

/// Assembles the combined-field system for an arbitrary [`Obstacle`].
pub fn assemble_obstacle(
    obstacle: &Obstacle,
    w: &WaveParams,
    options: &SolverOptions,
) -> Result<BoundarySystem, SolverError> {
    if !(options.nodes_per_wavelength >= 6.0) {
        return Err(SolverError::ResolutionTooLow(options.nodes_per_wavelength));
    }
    let lambda = w.wavelength();
    let mut contours = Vec::new();
    let mut anchors = Vec::new();
    for poly in &obstacle.polygons {
        let counts: Vec<usize> = poly
            .edges()
            .map(|(a, b)| {
                let n = (options.nodes_per_wavelength * GRADED_OVERSAMPLE * a.distance(b) / lambda).ceil();
                (n as usize).max(options.min_nodes_per_edge).max(16)
            })
            .collect();
        let c = Contour::polygon(poly, &counts, anchors.len(), options.grading);
        anchors.extend(c.anchors());
        contours.push(c);
    }
    for &(center, radius) in &obstacle.circles {
        let n = (options.nodes_per_wavelength * 2.0 * PI * radius / lambda).ceil() as usize;
        let c = Contour::circle(center, radius, n.max(options.min_nodes_per_circle), anchors.len());
        anchors.extend(c.anchors());
        contours.push(c);
    }

    let mut nodes = Vec::new();
    let mut ranges = Vec::new();
    for (ci, c) in contours.iter().enumerate() {
        let start = nodes.len();
        let step = c.step();
        for j in 0..c.node_count() {
            let p = c.point(c.param(j, 1));
            let pos = anchors[p.anchor] + p.offset;
            nodes.push(Node {
                contour: ci,
                local: j,
                anchor: p.anchor,
                offset: p.offset,
                pos,
                normal: Vec2::new(p.tangent.y, -p.tangent.x),
                speed: p.tangent.norm(),
                curvature_term: p.curvature_term,
                weight: step,
            });
        }
        ranges.push(start..nodes.len());
    }

    let eta = options.eta.unwrap_or(w.k);
    let n = nodes.len();
    let mut sys = BoundarySystem {
        wave: *w,
        eta,
        options: *options,
        contours,
        anchors,
        nodes,
        ranges,
        matrix: DMatrix::zeros(n, n),
        rhs: DVector::zeros(n),
        bounding_radius: obstacle.bounding_radius(),
    };
    if n == 0 {
        return Ok(sys);
    }

    let tables: Vec<(Vec<f64>, Vec<f64>)> = sys
        .contours
        .iter()
        .map(|c| {
            let m = c.node_count();
            let r = log_weights(m);
            let step = c.step();
            let ln_s = (0..m)
                .map(|d| {
                    let s = (0.5 * d as f64 * step).sin();
                    (4.0 * s * s).ln()
                })
                .collect();
            (r, ln_s)
        })
        .collect();

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|i| assemble_row(&sys, &tables, i))
        .collect();
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            sys.matrix[(i, j)] = v;
        }
    }
    for i in 0..n {
        sys.rhs[i] = -incident_field(w, sys.nodes[i].pos).0;
    }
    Ok(sys)
}

fn assemble_row(sys: &BoundarySystem, tables: &[(Vec<f64>, Vec<f64>)], i: usize) -> Vec<Complex64> {
    let k = sys.wave.k;
    let eta = sys.eta;
    let i_eta = Complex64::new(0.0, eta);
    let i_quarter = Complex64::new(0.0, 0.25);
    let ik_quarter = Complex64::new(0.0, 0.25 * k);
    let inv_4pi = 1.0 / (4.0 * PI);
    let ni = sys.nodes[i];
    let (rw, ln_s) = &tables[ni.contour];
    let m_c = sys.contours[ni.contour].node_count();

    let mut row = vec![Complex64::new(0.0, 0.0); sys.nodes.len()];
    for (j, nj) in sys.nodes.iter().enumerate() {
        let same = nj.contour == ni.contour;
        if i == j {
            let l2 = inv_4pi * ni.curvature_term;
            let m2 = (i_quarter - (EULER_GAMMA + (0.5 * k * ni.speed).ln()) / (2.0 * PI)) * ni.speed;
            let m1 = -inv_4pi * ni.speed;
            let k1 = -i_eta * m1;
            let k2 = l2 - i_eta * m2;
            row[j] = Complex64::new(0.5, 0.0) + rw[0] * k1 + ni.weight * k2;
            continue;
        }
        let d = sys.diff(i, j);
        let r = d.norm();
        let b = bessel01(k * r);
        let n_dot_d = nj.normal.dot(d);
        let l = ik_quarter * b.h1() * (n_dot_d / r);
        let m = i_quarter * b.h0() * nj.speed;
        let kernel = l - i_eta * m;
        if same {
            let mm = (ni.local + m_c - nj.local) % m_c;
            let l1 = -k * inv_4pi * n_dot_d * b.j1 / r;
            let m1 = -inv_4pi * b.j0 * nj.speed;
            let k1 = Complex64::new(l1, 0.0) - i_eta * m1;
            let k2 = kernel - k1 * ln_s[mm];
            row[j] = rw[mm] * k1 + nj.weight * k2;
        } else {
            row[j] = nj.weight * kernel;
        }
    }
    row
}

/// Solved density together with its system.
#[derive(Debug)]
pub struct Density {
    pub(crate) system: Arc<BoundarySystem>,
    pub(crate) coeffs: Vec<Complex64>,
    residual: f64,
    condition: f64,
    pub(crate) fine: FineLevels,
}

impl Density {
    pub fn system(&self) -> &BoundarySystem {
        &self.system
    }

    pub fn wave(&self) -> WaveParams {
        self.system.wave
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Relative residual `|b - A x| / |b|` of the dense solve.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Lower-bound estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        self.condition
    }

    /// Density of a scatterer-free problem: the scattered field vanishes.
    pub fn empty(w: &WaveParams) -> Density {
        let obstacle = Obstacle {
            polygons: Vec::new(),
            circles: Vec::new(),
        };
        let sys = assemble_obstacle(&obstacle, w, &SolverOptions::default()).expect("valid options");
        let sys = Arc::new(sys);
        Density {
            fine: FineLevels::new(&sys),
            system: sys,
            coeffs: Vec::new(),
            residual: 0.0,
            condition: 1.0,
        }
    }
}

fn norm1_col(m: &DMatrix<Complex64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Dense LU solve with a residual check and a condition estimate.
pub fn solve_density(sys: BoundarySystem) -> Result<Density, SolverError> {
    let n = sys.dimension();
    if n == 0 {
        let sys = Arc::new(sys);
        return Ok(Density {
            fine: FineLevels::new(&sys),
            system: sys,
            coeffs: Vec::new(),
            residual: 0.0,
            condition: 1.0,
        });
    }
    let lu = sys.matrix.clone().lu();
    let x = lu
        .solve(&sys.rhs)
        .ok_or(SolverError::SingularSystem {
            condition: f64::INFINITY,
            residual: f64::INFINITY,
        })?;
    let r = &sys.rhs - &sys.matrix * &x;
    let residual = r.norm() / sys.rhs.norm();

    // Lower bound on ||A^{-1}||_1 from a few fixed pseudo-random probes.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut inv_norm: f64 = 0.0;
    for _ in 0..3 {
        let z = DVector::from_fn(n, |_, _| {
            Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)
        });
        if let Some(y) = lu.solve(&z) {
            inv_norm = inv_norm.max(y.iter().map(|v| v.norm()).sum::<f64>() / n as f64);
        }
    }
    let condition = norm1_col(&sys.matrix) * inv_norm;

    let finite = x.iter().all(|v| v.re.is_finite() && v.im.is_finite());
    if !finite || !(residual <= 1e-10) || !(condition < 1e13) {
        return Err(SolverError::SingularSystem {
            condition,
            residual,
        });
    }
    let sys = Arc::new(sys);
    Ok(Density {
        fine: FineLevels::new(&sys),
        system: sys,
        coeffs: x.iter().copied().collect(),
        residual,
        condition,
    })
}
