//! Closed boundary curves with a 2π-periodic parametrisation.
//!
//! Polygon edges are traversed with a sigmoidal grading that flattens the
//! parametrisation at every corner, so the combined curve is smooth in the
//! parameter even though it has corners in space. Each node keeps its position
//! as `anchor + offset`, where the anchor is the nearest corner; differences
//! between nodes that cluster at the same corner are then formed without
//! cancellation.

use crate::geometry::{Polygon, Vec2};
use std::f64::consts::PI;

/// Default exponent of the corner grading.
pub const DEFAULT_GRADING: u32 = 8;

/// Sigmoidal grading on `[0, 1]`: `w(0) = 0`, `w(1) = 1`, and the first `p - 1`
/// derivatives vanish at both ends. `w(1 - s) = 1 - w(s)`.
#[derive(Debug, Clone, Copy)]
pub struct Grading {
    p: f64,
}

impl Grading {
    pub fn new(p: u32) -> Self {
        assert!(p >= 2, "grading exponent must be at least 2");
        Grading { p: p as f64 }
    }

    fn v(&self, s: f64) -> f64 {
        let p = self.p;
        (1.0 / p - 0.5) * (1.0 - 2.0 * s).powi(3) + (1.0 / p) * (2.0 * s - 1.0) + 0.5
    }

    fn dv(&self, s: f64) -> f64 {
        let p = self.p;
        -6.0 * (1.0 / p - 0.5) * (1.0 - 2.0 * s).powi(2) + 2.0 / p
    }

    /// `(w(s), 1 - w(s), w'(s))`, with `1 - w(s)` formed without cancellation.
    pub fn eval(&self, s: f64) -> (f64, f64, f64) {
        let p = self.p;
        let a = self.v(s);
        let b = self.v(1.0 - s);
        let va = a.powf(p);
        let vb = b.powf(p);
        let den = va + vb;
        let w = va / den;
        let w_c = vb / den;
        let dva = p * a.powf(p - 1.0) * self.dv(s);
        let dvb = -p * b.powf(p - 1.0) * self.dv(1.0 - s);
        let dw = (dva * vb - va * dvb) / (den * den);
        (w, w_c, dw)
    }
}

/// Geometry of one parameter value on a contour.
#[derive(Debug, Clone, Copy)]
pub struct CurvePoint {
    /// Index into the owning system's anchor list.
    pub anchor: usize,
    pub offset: Vec2,
    /// `dz/dt`.
    pub tangent: Vec2,
    /// `(z2' z1'' - z1' z2'') / |z'|^2`, zero on straight pieces.
    pub curvature_term: f64,
}

#[derive(Debug, Clone)]
pub(crate) enum Shape {
    /// Polygon with edge `e` occupying parameters `[edge_start[e], edge_start[e+1])`.
    Polygon {
        vertices: Vec<Vec2>,
        anchor_base: usize,
        edge_start: Vec<f64>,
        grading: Grading,
    },
    Circle {
        center: Vec2,
        radius: f64,
        anchor: usize,
    },
}

/// One closed curve of the obstacle boundary together with its node count.
#[derive(Debug, Clone)]
pub struct Contour {
    pub(crate) shape: Shape,
    /// Number of nodes, always even.
    pub(crate) nodes: usize,
    /// Parameter offset of the first node.
    pub(crate) phase: f64,
}

impl Contour {
    /// Polygon contour with `counts[e]` nodes on edge `e`.
    pub(crate) fn polygon(poly: &Polygon, counts: &[usize], anchor_base: usize, p: u32) -> Self {
        let mut counts = counts.to_vec();
        let total: usize = counts.iter().sum();
        if total % 2 == 1 {
            let longest = (0..counts.len())
                .max_by(|&a, &b| {
                    let la = poly.vertices()[a].distance(poly.vertices()[(a + 1) % counts.len()]);
                    let lb = poly.vertices()[b].distance(poly.vertices()[(b + 1) % counts.len()]);
                    la.partial_cmp(&lb).unwrap()
                })
                .unwrap();
            counts[longest] += 1;
        }
        let total: usize = counts.iter().sum();
        let step = 2.0 * PI / total as f64;
        let mut edge_start = Vec::with_capacity(counts.len() + 1);
        let mut acc = 0usize;
        for c in &counts {
            edge_start.push(acc as f64 * step);
            acc += c;
        }
        edge_start.push(2.0 * PI);
        Contour {
            shape: Shape::Polygon {
                vertices: poly.vertices().to_vec(),
                anchor_base,
                edge_start,
                grading: Grading::new(p),
            },
            nodes: total,
            phase: 0.5 * step,
        }
    }

    pub(crate) fn circle(center: Vec2, radius: f64, nodes: usize, anchor: usize) -> Self {
        Contour {
            shape: Shape::Circle {
                center,
                radius,
                anchor,
            },
            nodes: nodes + nodes % 2,
            phase: 0.0,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    /// Parameter spacing of the node grid.
    pub fn step(&self) -> f64 {
        2.0 * PI / self.nodes as f64
    }

    /// Anchors contributed by this contour, in order.
    pub(crate) fn anchors(&self) -> Vec<Vec2> {
        match &self.shape {
            Shape::Polygon { vertices, .. } => vertices.clone(),
            Shape::Circle { center, .. } => vec![*center],
        }
    }

    /// Parameter of node `j` on a grid refined by `factor`.
    pub(crate) fn param(&self, j: usize, factor: usize) -> f64 {
        let step = self.step() / factor as f64;
        self.phase / factor as f64 + j as f64 * step
    }

    pub fn point(&self, t: f64) -> CurvePoint {
        match &self.shape {
            Shape::Circle {
                center: _,
                radius,
                anchor,
            } => {
                let (s, c) = t.sin_cos();
                CurvePoint {
                    anchor: *anchor,
                    offset: Vec2::new(radius * c, radius * s),
                    tangent: Vec2::new(-radius * s, radius * c),
                    curvature_term: -1.0,
                }
            }
            Shape::Polygon {
                vertices,
                anchor_base,
                edge_start,
                grading,
            } => {
                let m = vertices.len();
                let t = t.rem_euclid(2.0 * PI);
                let e = match edge_start[..m].iter().rposition(|&s| s <= t) {
                    Some(e) => e,
                    None => 0,
                };
                let len = edge_start[e + 1] - edge_start[e];
                let sigma = (t - edge_start[e]) / len;
                let a = vertices[e];
                let b = vertices[(e + 1) % m];
                let ab = b - a;
                let (w, w_c, dw) = grading.eval(sigma);
                let (anchor, offset) = if sigma <= 0.5 {
                    (anchor_base + e, ab * w)
                } else {
                    (anchor_base + (e + 1) % m, ab * (-w_c))
                };
                CurvePoint {
                    anchor,
                    offset,
                    tangent: ab * (dw / len),
                    curvature_term: 0.0,
                }
            }
        }
    }

    /// Arc length of the contour.
    pub fn length(&self) -> f64 {
        match &self.shape {
            Shape::Circle { radius, .. } => 2.0 * PI * radius,
            Shape::Polygon { vertices, .. } => {
                let m = vertices.len();
                (0..m).map(|i| vertices[i].distance(vertices[(i + 1) % m])).sum()
            }
        }
    }

    /// Distance from `x` to the curve.
    pub fn distance(&self, x: Vec2) -> f64 {
        match &self.shape {
            Shape::Circle { center, radius, .. } => ((x - *center).norm() - radius).abs(),
            Shape::Polygon { vertices, .. } => {
                let m = vertices.len();
                (0..m)
                    .map(|i| crate::geometry::point_segment_distance(x, vertices[i], vertices[(i + 1) % m]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Whether `x` lies strictly inside the curve.
    pub fn encloses(&self, x: Vec2) -> bool {
        match &self.shape {
            Shape::Circle { center, radius, .. } => (x - *center).norm() < *radius,
            Shape::Polygon { vertices, .. } => Polygon::new(vertices.clone())
                .map(|p| p.contains(x))
                .unwrap_or(false),
        }
    }
}

/// Kress's weights for the product integration of `ln(4 sin^2((t - s)/2))`
/// against trigonometric interpolants on `2n` equispaced nodes, indexed by the
/// node offset `m = i - j (mod 2n)`.
pub fn log_weights(two_n: usize) -> Vec<f64> {
    assert!(two_n.is_multiple_of(2) && two_n >= 4);
    let n = two_n / 2;
    let nf = n as f64;
    (0..two_n)
        .map(|m| {
            let base = m as f64 * PI / nf;
            let mut acc = 0.0;
            for l in 1..n {
                acc += (l as f64 * base).cos() / l as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * acc - PI / (nf * nf) * sign
        })
        .collect()
}
