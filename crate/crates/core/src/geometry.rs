//! Polygonal scatterers: polygons, boundary cells, point classification,
//! reflections across lines and the components of a line outside the
//! scatterer.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// A point or vector in the plane. Serialised as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2::new(c, s)
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn normalized(self) -> Vec2 {
        self * (1.0 / self.norm())
    }

    /// Counterclockwise rotation by 90 degrees.
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("zero-length edge at vertex {0}")]
    DegenerateEdge(usize),
    #[error("edges {0} and {1} intersect")]
    SelfIntersecting(usize, usize),
    #[error("polygon has zero area")]
    ZeroArea,
    #[error("polygons {0} and {1} overlap or touch")]
    OverlappingPolygons(usize, usize),
    #[error("free cell {0} has coincident endpoints")]
    DegenerateCell(usize),
    #[error("exterior of the scatterer is not connected")]
    DisconnectedExterior,
    #[error("line direction must be a nonzero vector")]
    DegenerateLine,
    #[error("seed point lies inside the scatterer")]
    SeedInsideScatterer,
    #[error("invalid scatterer document: {0}")]
    Parse(String),
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// A simple polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
}

impl Polygon {
    /// Validates and normalises a vertex list. Clockwise input is reversed.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        let n = vertices.len();
        if n < 3 {
            return Err(GeometryError::TooFewVertices(n));
        }
        for i in 0..n {
            if vertices[i] == vertices[(i + 1) % n] {
                return Err(GeometryError::DegenerateEdge(i));
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a1, a2) = (vertices[i], vertices[(i + 1) % n]);
                let (b1, b2) = (vertices[j], vertices[(j + 1) % n]);
                if adjacent {
                    // Adjacent edges share one vertex; anything more is a fold-back.
                    let shared = if j == i + 1 { a2 } else { a1 };
                    let (other_a, other_b) = if j == i + 1 { (a1, b2) } else { (a2, b1) };
                    let (sa, sb) = (other_a - shared, other_b - shared);
                    if sa.cross(sb) == 0.0 && sa.dot(sb) > 0.0 {
                        return Err(GeometryError::SelfIntersecting(i, j));
                    }
                } else if segments_intersect(a1, a2, b1, b2) {
                    return Err(GeometryError::SelfIntersecting(i, j));
                }
            }
        }
        let area = signed_area(&vertices);
        if area == 0.0 {
            return Err(GeometryError::ZeroArea);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Polygon { vertices })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.distance(b)).sum()
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let mut c = Vec2::ZERO;
        let mut a2 = 0.0;
        for i in 0..n {
            let (p, q) = (self.vertices[i], self.vertices[(i + 1) % n]);
            let w = p.cross(q);
            a2 += w;
            c = c + (p + q) * w;
        }
        c * (1.0 / (3.0 * a2))
    }

    /// Edges `(v_i, v_{i+1})` in counterclockwise order.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Interior angle at vertex `i`, in `(0, 2 pi)`.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.vertices.len();
        let prev = self.vertices[(i + n - 1) % n];
        let cur = self.vertices[i];
        let next = self.vertices[(i + 1) % n];
        let a = prev - cur;
        let b = next - cur;
        // counterclockwise orientation: interior is to the left of each edge
        let ang = b.cross(a).atan2(b.dot(a));
        if ang <= 0.0 {
            ang + 2.0 * std::f64::consts::PI
        } else {
            ang
        }
    }

    /// Even-odd containment test (boundary points may go either way).
    pub fn contains(&self, p: Vec2) -> bool {
        let mut inside = false;
        let n = self.vertices.len();
        let mut j = n - 1;
        for i in 0..n {
            let (vi, vj) = (self.vertices[i], self.vertices[j]);
            if (vi.y > p.y) != (vj.y > p.y) {
                let x_cross = vj.x + (p.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
                if p.x < x_cross {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn translated(&self, t: Vec2) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|&v| v + t).collect(),
        }
    }
}

/// Builds a validated counterclockwise polygon.
pub fn make_polygon(vertices: &[Vec2]) -> Result<Polygon, GeometryError> {
    Polygon::new(vertices.to_vec())
}

fn signed_area(v: &[Vec2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellOwner {
    PolygonEdge { polygon: usize, edge: usize },
    FreeSegment { index: usize },
}

/// A boundary cell: a closed segment with a unit normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub start: Vec2,
    pub end: Vec2,
    pub normal: Vec2,
    pub owner: CellOwner,
}

impl Cell {
    pub fn length(&self) -> f64 {
        self.start.distance(self.end)
    }

    pub fn point_at(&self, s: f64) -> Vec2 {
        self.start + (self.end - self.start) * s
    }

    pub fn midpoint(&self) -> Vec2 {
        self.point_at(0.5)
    }

    pub fn tangent(&self) -> Vec2 {
        (self.end - self.start).normalized()
    }
}

/// Oriented line through `point` with unit `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub point: Vec2,
    pub direction: Vec2,
}

impl Line {
    pub fn new(point: Vec2, direction: Vec2) -> Result<Self, GeometryError> {
        let n = direction.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(GeometryError::DegenerateLine);
        }
        Ok(Line {
            point,
            direction: direction * (1.0 / n),
        })
    }

    pub fn through(a: Vec2, b: Vec2) -> Result<Self, GeometryError> {
        Line::new(a, b - a)
    }

    /// Unit normal, the direction rotated counterclockwise.
    pub fn normal(&self) -> Vec2 {
        self.direction.perp()
    }

    pub fn param_of(&self, p: Vec2) -> f64 {
        (p - self.point).dot(self.direction)
    }

    pub fn at(&self, t: f64) -> Vec2 {
        self.point + self.direction * t
    }

    /// Signed distance, positive on the side of [`Line::normal`].
    pub fn signed_distance(&self, p: Vec2) -> f64 {
        (p - self.point).dot(self.normal())
    }
}

/// Euclidean reflection across a line.
pub trait Reflect {
    fn reflect(&self, line: &Line) -> Self;
}

impl Reflect for Vec2 {
    fn reflect(&self, line: &Line) -> Vec2 {
        let d = *self - line.point;
        let n = line.normal();
        *self - n * (2.0 * d.dot(n))
    }
}

impl Reflect for Vec<Vec2> {
    fn reflect(&self, line: &Line) -> Vec<Vec2> {
        self.iter().map(|p| p.reflect(line)).collect()
    }
}

/// Reflects a point or polyline across `line`.
pub fn reflect<T: Reflect>(x: &T, line: &Line) -> T {
    x.reflect(line)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointClass {
    Interior,
    OnBoundary,
    Exterior,
}

/// Open interval `(lo, hi)` of parameters along a [`Line`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, t: f64) -> bool {
        t > self.lo && t < self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A union of disjoint simple polygons plus optional crack-type segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Scatterer {
    polygons: Vec<Polygon>,
    free_cells: Vec<Cell>,
    bounding_radius: f64,
}

#[derive(Serialize, Deserialize)]
struct ScattererDoc {
    polygons: Vec<Vec<Vec2>>,
    #[serde(default)]
    free_cells: Vec<[Vec2; 2]>,
}

impl Scatterer {
    /// Assembles a scatterer, rejecting touching or overlapping polygons and
    /// configurations whose exterior is disconnected on the verification grid.
    pub fn new(
        polygons: Vec<Polygon>,
        free_segments: Vec<(Vec2, Vec2)>,
    ) -> Result<Self, GeometryError> {
        for i in 0..polygons.len() {
            for j in (i + 1)..polygons.len() {
                if polygons_touch(&polygons[i], &polygons[j]) {
                    return Err(GeometryError::OverlappingPolygons(i, j));
                }
            }
        }
        let mut free_cells = Vec::with_capacity(free_segments.len());
        for (index, (a, b)) in free_segments.into_iter().enumerate() {
            if a == b {
                return Err(GeometryError::DegenerateCell(index));
            }
            free_cells.push(Cell {
                start: a,
                end: b,
                normal: (b - a).normalized().perp(),
                owner: CellOwner::FreeSegment { index },
            });
        }
        let bounding_radius = polygons
            .iter()
            .flat_map(|p| p.vertices().iter())
            .chain(free_cells.iter().flat_map(|c| [&c.start, &c.end]))
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let s = Scatterer {
            polygons,
            free_cells,
            bounding_radius,
        };
        if !s.exterior_connected(s.default_grid_spacing()) {
            return Err(GeometryError::DisconnectedExterior);
        }
        Ok(s)
    }

    pub fn empty() -> Self {
        Scatterer {
            polygons: Vec::new(),
            free_cells: Vec::new(),
            bounding_radius: 0.0,
        }
    }

    pub fn from_polygon(p: Polygon) -> Self {
        Scatterer::new(vec![p], Vec::new()).expect("a single simple polygon has a connected exterior")
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn free_cells(&self) -> &[Cell] {
        &self.free_cells
    }

    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty() && self.free_cells.is_empty()
    }

    /// Default on-boundary tolerance, relative to the bounding radius.
    pub fn default_tolerance(&self) -> f64 {
        1e-9 * self.bounding_radius.max(1e-300)
    }

    fn default_grid_spacing(&self) -> f64 {
        let min_edge = self
            .boundary_cells()
            .iter()
            .map(|c| c.length())
            .fold(f64::INFINITY, f64::min);
        (self.bounding_radius / 25.0).min(min_edge / 4.0)
    }

    pub fn translated(&self, t: Vec2) -> Scatterer {
        let polygons = self.polygons.iter().map(|p| p.translated(t)).collect();
        let free = self
            .free_cells
            .iter()
            .map(|c| (c.start + t, c.end + t))
            .collect();
        Scatterer::new(polygons, free).expect("translation preserves validity")
    }

    /// Every polygon edge (outward normals) followed by every free cell.
    pub fn boundary_cells(&self) -> Vec<Cell> {
        let mut cells = Vec::new();
        for (pi, poly) in self.polygons.iter().enumerate() {
            for (ei, (a, b)) in poly.edges().enumerate() {
                // counterclockwise: exterior is to the right of the edge direction
                let t = (b - a).normalized();
                cells.push(Cell {
                    start: a,
                    end: b,
                    normal: Vec2::new(t.y, -t.x),
                    owner: CellOwner::PolygonEdge {
                        polygon: pi,
                        edge: ei,
                    },
                });
            }
        }
        cells.extend(self.free_cells.iter().copied());
        cells
    }

    pub fn distance_to_boundary(&self, x: Vec2) -> f64 {
        let mut d = f64::INFINITY;
        for poly in &self.polygons {
            for (a, b) in poly.edges() {
                d = d.min(point_segment_distance(x, a, b));
            }
        }
        for c in &self.free_cells {
            d = d.min(point_segment_distance(x, c.start, c.end));
        }
        d
    }

    pub fn classify(&self, x: Vec2, tol: f64) -> PointClass {
        if self.distance_to_boundary(x) <= tol {
            return PointClass::OnBoundary;
        }
        if self.polygons.iter().any(|p| p.contains(x)) {
            PointClass::Interior
        } else {
            PointClass::Exterior
        }
    }

    /// True iff `x` lies in the closed scatterer `D`.
    pub fn contains(&self, x: Vec2) -> bool {
        self.classify(x, self.default_tolerance()) != PointClass::Exterior
    }

    /// Grid verification that `R^2 \ D` is connected: nodes of a grid with
    /// spacing `h` over `[-2R, 2R]^2` that keep clear of `D` must form a single
    /// 4-connected component together with the outer frame.
    pub fn exterior_connected(&self, h: f64) -> bool {
        if self.is_empty() {
            return true;
        }
        let r = 2.0 * self.bounding_radius;
        let n = ((2.0 * r / h).ceil() as usize).max(4);
        let step = 2.0 * r / n as f64;
        let idx = |i: usize, j: usize| j * (n + 1) + i;
        let clear_tol = step * std::f64::consts::FRAC_1_SQRT_2;
        let free: Vec<bool> = (0..=n)
            .flat_map(|j| (0..=n).map(move |i| (i, j)))
            .map(|(i, j)| {
                let p = Vec2::new(-r + i as f64 * step, -r + j as f64 * step);
                self.classify(p, clear_tol) == PointClass::Exterior
            })
            .collect();
        let mut seen = vec![false; free.len()];
        let mut stack = vec![idx(0, 0)];
        seen[idx(0, 0)] = true;
        while let Some(k) = stack.pop() {
            let (i, j) = (k % (n + 1), k / (n + 1));
            let mut push = |ii: usize, jj: usize| {
                let kk = idx(ii, jj);
                if free[kk] && !seen[kk] {
                    seen[kk] = true;
                    stack.push(kk);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i < n {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j < n {
                push(i, j + 1);
            }
        }
        free.iter().zip(&seen).all(|(&f, &s)| !f || s)
    }

    /// All maximal open intervals of `line ∩ G` within the disk of radius
    /// `window` about the origin, in increasing parameter order.
    pub fn line_components(&self, line: &Line, window: f64) -> Vec<Interval> {
        // chord of the window disk
        let t0 = -line.point.dot(line.direction);
        let foot = line.at(t0);
        let disc = window * window - foot.norm_sq();
        if disc <= 0.0 {
            return Vec::new();
        }
        let half = disc.sqrt();
        let (lo, hi) = (t0 - half, t0 + half);

        let mut breaks = vec![lo, hi];
        for c in self.boundary_cells() {
            let (a, b) = (c.start, c.end);
            let da = line.signed_distance(a);
            let db = line.signed_distance(b);
            if da == 0.0 && db == 0.0 {
                breaks.push(line.param_of(a));
                breaks.push(line.param_of(b));
            } else if (da <= 0.0 && db >= 0.0) || (da >= 0.0 && db <= 0.0) {
                let s = da / (da - db);
                breaks.push(line.param_of(a + (b - a) * s));
            }
        }
        breaks.retain(|t| *t >= lo && *t <= hi);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let tol = self.default_tolerance();
        let mut out = Vec::new();
        for w in breaks.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            let mid = line.at(0.5 * (w[0] + w[1]));
            if self.classify(mid, tol) == PointClass::Exterior {
                out.push(Interval { lo: w[0], hi: w[1] });
            }
        }
        out
    }

    /// The component of `line ∩ G` containing `seed` (projected onto the line),
    /// clipped to the window disk.
    pub fn line_component(
        &self,
        line: &Line,
        seed: Vec2,
        window: f64,
    ) -> Result<Vec<Interval>, GeometryError> {
        if self.classify(seed, self.default_tolerance()) != PointClass::Exterior {
            return Err(GeometryError::SeedInsideScatterer);
        }
        let ts = line.param_of(seed);
        Ok(self
            .line_components(line, window)
            .into_iter()
            .filter(|iv| iv.contains(ts))
            .collect())
    }

    pub fn to_json(&self) -> String {
        let doc = ScattererDoc {
            polygons: self.polygons.iter().map(|p| p.vertices.clone()).collect(),
            free_cells: self.free_cells.iter().map(|c| [c.start, c.end]).collect(),
        };
        serde_json::to_string(&doc).expect("plain numeric document")
    }

    pub fn from_json(text: &str) -> Result<Self, GeometryError> {
        let doc: ScattererDoc =
            serde_json::from_str(text).map_err(|e| GeometryError::Parse(e.to_string()))?;
        let polygons = doc
            .polygons
            .into_iter()
            .map(Polygon::new)
            .collect::<Result<Vec<_>, _>>()?;
        let free = doc.free_cells.into_iter().map(|[a, b]| (a, b)).collect();
        Scatterer::new(polygons, free)
    }
}

impl Serialize for Scatterer {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScattererDoc {
            polygons: self.polygons.iter().map(|p| p.vertices.clone()).collect(),
            free_cells: self.free_cells.iter().map(|c| [c.start, c.end]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scatterer {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = ScattererDoc::deserialize(d)?;
        let polygons = doc
            .polygons
            .into_iter()
            .map(Polygon::new)
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        let free = doc.free_cells.into_iter().map(|[a, b]| (a, b)).collect();
        Scatterer::new(polygons, free).map_err(serde::de::Error::custom)
    }
}

fn polygons_touch(p: &Polygon, q: &Polygon) -> bool {
    for (a1, a2) in p.edges() {
        for (b1, b2) in q.edges() {
            if segments_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    p.contains(q.vertices()[0]) || q.contains(p.vertices()[0])
}

/// Classification free function mirroring [`Scatterer::classify`].
pub fn classify_point(s: &Scatterer, x: Vec2, tol: f64) -> PointClass {
    s.classify(x, tol)
}

/// Boundary cells of a scatterer.
pub fn boundary_cells(s: &Scatterer) -> Vec<Cell> {
    s.boundary_cells()
}
