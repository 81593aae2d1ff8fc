//! Marching squares for `v = 0` with exact zeros at grid nodes.
//!
//! Nodes with `|v|` below a relative threshold count as zeros, so nodal lines
//! that run along grid lines (including the window edges) are traced through
//! the nodes rather than dropped or doubled. Ambiguous saddle cells are
//! resolved by the sign of the cell average, the same rule the domain
//! labelling uses.

use super::grid::{NodeMask, SampledField};
use crate::geometry::Vec2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// Nodes with `|v| <= ZERO_REL * max|v|` are exact zeros.
pub(crate) const ZERO_REL: f64 = 1e-12;

/// A chain of nodal vertices. Closed chains repeat the first vertex at the end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Vec2>,
    /// `∇v` at each vertex.
    pub gradients: Vec<Vec2>,
    /// `Im u` at each vertex (zero for real fields).
    pub imag: Vec<f64>,
    pub closed: bool,
    /// Per segment, the (positive, negative) domains on either side.
    #[serde(default)]
    pub sides: Vec<Option<[usize; 2]>>,
}

impl Polyline {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn grad_norm(&self, i: usize) -> f64 {
        self.gradients[i].norm()
    }

    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(w[1])).sum()
    }
}

pub(crate) fn signs(f: &SampledField<'_>) -> Vec<i8> {
    let eps = ZERO_REL * f.max_abs_v();
    f.values
        .iter()
        .zip(&f.mask)
        .map(|(&v, &m)| {
            if m != NodeMask::InG || v.abs() <= eps {
                0
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// Sign assigned to the centre of a saddle cell.
pub(crate) fn center_sign(f: &SampledField<'_>, corners: &[usize; 4]) -> i8 {
    let c: f64 = corners.iter().map(|&k| f.values[k]).sum();
    if c >= 0.0 {
        1
    } else {
        -1
    }
}

pub(crate) fn cell_corners(f: &SampledField<'_>, i: usize, j: usize) -> [usize; 4] {
    [f.index(i, j), f.index(i + 1, j), f.index(i + 1, j + 1), f.index(i, j + 1)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Key {
    Node(usize),
    /// Edge from node `idx` to its right neighbour.
    H(usize),
    /// Edge from node `idx` to its upper neighbour.
    V(usize),
}

#[derive(Debug, Clone, Copy)]
struct Vertex {
    pos: Vec2,
    grad: Vec2,
    imag: f64,
}

struct Segment {
    a: Key,
    b: Key,
    sides: Option<[usize; 2]>,
}

enum ZeroPoint {
    Corners(Vec<usize>),
    Cross(usize),
}

fn edge_key(corners: &[usize; 4], q: usize) -> Key {
    match q {
        0 => Key::H(corners[0]),
        1 => Key::V(corners[1]),
        2 => Key::H(corners[3]),
        _ => Key::V(corners[0]),
    }
}

fn key_pos(f: &SampledField<'_>, key: Key) -> Vec2 {
    match key {
        Key::Node(k) => f.node_at(k),
        Key::H(k) | Key::V(k) => {
            let (a, b) = edge_nodes(f, key, k);
            let (va, vb) = (f.values[a], f.values[b]);
            let t = va / (va - vb);
            let (pa, pb) = (f.node_at(a), f.node_at(b));
            pa + (pb - pa) * t
        }
    }
}

fn edge_nodes(f: &SampledField<'_>, key: Key, k: usize) -> (usize, usize) {
    match key {
        Key::H(_) => (k, k + 1),
        Key::V(_) => (k, k + f.dims().0),
        Key::Node(_) => (k, k),
    }
}

fn interpolated_vertex(f: &SampledField<'_>, key: Key) -> Vertex {
    match key {
        Key::Node(k) => Vertex {
            pos: f.node_at(k),
            grad: f.gradients[k],
            imag: f.imag[k],
        },
        Key::H(k) | Key::V(k) => {
            let (a, b) = edge_nodes(f, key, k);
            let (va, vb) = (f.values[a], f.values[b]);
            let t = va / (va - vb);
            let (pa, pb) = (f.node_at(a), f.node_at(b));
            Vertex {
                pos: pa + (pb - pa) * t,
                grad: f.gradients[a] + (f.gradients[b] - f.gradients[a]) * t,
                imag: f.imag[a] + (f.imag[b] - f.imag[a]) * t,
            }
        }
    }
}

/// Projects an interpolated vertex onto `v = 0` with Newton steps along `∇v`.
fn refine_vertex(f: &SampledField<'_>, v0: Vertex) -> Vertex {
    let h = f.h();
    let Ok(s0) = f.evaluate(v0.pos) else {
        return v0;
    };
    let mut best = Vertex {
        pos: v0.pos,
        grad: s0.real_gradient(),
        imag: s0.value.im,
    };
    let mut best_v = s0.value.re.abs();
    let mut x = v0.pos;
    let mut s = s0;
    for _ in 0..3 {
        if best_v == 0.0 {
            break;
        }
        let g = s.real_gradient();
        let gn2 = g.norm_sq();
        if !(gn2 > 0.0) {
            break;
        }
        let step = g * (s.value.re / gn2);
        if step.norm() > 0.5 * h {
            break;
        }
        x = x - step;
        if x.distance(v0.pos) > h {
            break;
        }
        match f.evaluate(x) {
            Ok(sn) => s = sn,
            Err(_) => break,
        }
        if s.value.re.abs() < best_v {
            best_v = s.value.re.abs();
            best = Vertex {
                pos: x,
                grad: s.real_gradient(),
                imag: s.value.im,
            };
        } else {
            break;
        }
    }
    best
}

/// Side domains of a segment between two zero points of one cell.
fn segment_sides(
    f: &SampledField<'_>,
    sign: &[i8],
    labels: &[i32],
    corners: &[usize; 4],
    a: Key,
    b: Key,
) -> Option<[usize; 2]> {
    let from_edge = |key: Key| -> Option<[usize; 2]> {
        match key {
            Key::H(k) | Key::V(k) => {
                let (p, q) = edge_nodes(f, key, k);
                let (pos, neg) = if sign[p] > 0 { (p, q) } else { (q, p) };
                if labels[pos] >= 0 && labels[neg] >= 0 {
                    Some([labels[pos] as usize, labels[neg] as usize])
                } else {
                    None
                }
            }
            Key::Node(_) => None,
        }
    };
    if let Some(s) = from_edge(a).or_else(|| from_edge(b)) {
        return Some(s);
    }
    // both ends at zero nodes: use the nonzero corners on either side
    let (pa, pb) = (key_pos(f, a), key_pos(f, b));
    let dir = pb - pa;
    let mut pos = None;
    let mut neg = None;
    for &c in corners {
        if sign[c] == 0 || labels[c] < 0 {
            continue;
        }
        let side = dir.cross(f.node_at(c) - pa);
        if side == 0.0 {
            continue;
        }
        if sign[c] > 0 {
            pos = Some(labels[c] as usize);
        } else {
            neg = Some(labels[c] as usize);
        }
    }
    match (pos, neg) {
        (Some(p), Some(n)) => Some([p, n]),
        _ => None,
    }
}

fn cell_segments(
    f: &SampledField<'_>,
    sign: &[i8],
    labels: &[i32],
    i: usize,
    j: usize,
    out: &mut Vec<Segment>,
) {
    let corners = cell_corners(f, i, j);
    if corners.iter().any(|&c| f.mask[c] != NodeMask::InG) {
        return;
    }
    let s: [i8; 4] = [sign[corners[0]], sign[corners[1]], sign[corners[2]], sign[corners[3]]];
    let nonzero = s.iter().filter(|&&x| x != 0).count();
    if nonzero < 2 {
        return;
    }
    let crossings: Vec<usize> = (0..4).filter(|&q| s[q] * s[(q + 1) % 4] == -1).collect();
    if crossings.len() == 4 {
        let keys: Vec<Key> = (0..4).map(|q| edge_key(&corners, q)).collect();
        let pairs = if center_sign(f, &corners) == s[0] {
            [(0, 1), (2, 3)]
        } else {
            [(3, 0), (1, 2)]
        };
        for (p, q) in pairs {
            out.push(Segment {
                a: keys[p],
                b: keys[q],
                sides: segment_sides(f, sign, labels, &corners, keys[p], keys[q]),
            });
        }
        return;
    }

    // walk the cell boundary from a nonzero corner, collecting zero points
    // with the signs of the arcs before and after them
    let q0 = (0..4).find(|&q| s[q] != 0).unwrap();
    let mut points: Vec<(ZeroPoint, i8, i8)> = Vec::new();
    let mut pending: Option<(Vec<usize>, i8)> = None;
    let mut last = s[q0];
    for step in 0..4 {
        let q = (q0 + step) % 4;
        if s[q] == 0 {
            match &mut pending {
                Some((c, _)) => c.push(q),
                None => pending = Some((vec![q], last)),
            }
        } else {
            if let Some((c, before)) = pending.take() {
                points.push((ZeroPoint::Corners(c), before, s[q]));
            }
            last = s[q];
        }
        let qn = (q + 1) % 4;
        if s[q] * s[qn] == -1 {
            points.push((ZeroPoint::Cross(q), s[q], s[qn]));
        }
    }
    if let Some((c, before)) = pending.take() {
        points.push((ZeroPoint::Corners(c), before, s[q0]));
    }
    let active: Vec<&ZeroPoint> = points
        .iter()
        .filter(|(_, b, a)| b != a)
        .map(|(z, _, _)| z)
        .collect();
    if active.len() != 2 {
        return;
    }
    let anchor = |z: &ZeroPoint, other: Vec2| -> Key {
        match z {
            ZeroPoint::Cross(q) => edge_key(&corners, *q),
            ZeroPoint::Corners(cs) => {
                let best = cs
                    .iter()
                    .min_by(|&&x, &&y| {
                        let dx = f.node_at(corners[x]).distance(other);
                        let dy = f.node_at(corners[y]).distance(other);
                        dx.partial_cmp(&dy).unwrap()
                    })
                    .unwrap();
                Key::Node(corners[*best])
            }
        }
    };
    let rough = |z: &ZeroPoint| -> Vec2 {
        match z {
            ZeroPoint::Cross(q) => key_pos(f, edge_key(&corners, *q)),
            ZeroPoint::Corners(cs) => {
                let sum = cs.iter().fold(Vec2::ZERO, |acc, &c| acc + f.node_at(corners[c]));
                sum * (1.0 / cs.len() as f64)
            }
        }
    };
    let a = anchor(active[0], rough(active[1]));
    let b = anchor(active[1], rough(active[0]));
    if a != b {
        out.push(Segment {
            a,
            b,
            sides: segment_sides(f, sign, labels, &corners, a, b),
        });
    }
}

/// Segments lying along grid edges whose endpoints are both zeros.
fn zero_edge_segments(f: &SampledField<'_>, sign: &[i8], labels: &[i32], out: &mut Vec<Segment>) {
    let (nx, ny) = f.dims();
    let is_zero = |k: usize| f.mask[k] == NodeMask::InG && sign[k] == 0;
    let label_of = |i: isize, j: isize| -> Option<(i8, usize)> {
        if i < 0 || j < 0 || i >= nx as isize || j >= ny as isize {
            return None;
        }
        let k = f.index(i as usize, j as usize);
        if sign[k] != 0 && labels[k] >= 0 {
            Some((sign[k], labels[k] as usize))
        } else {
            None
        }
    };
    let pick = |cands: [Option<(i8, usize)>; 4]| -> Option<[usize; 2]> {
        let (a, b) = (cands[0].or(cands[1]), cands[2].or(cands[3]));
        match (a, b) {
            (Some((sa, la)), Some((sb, lb))) if sa != sb => {
                if sa > 0 {
                    Some([la, lb])
                } else {
                    Some([lb, la])
                }
            }
            _ => None,
        }
    };
    for j in 0..ny {
        for i in 0..nx {
            let k = f.index(i, j);
            if !is_zero(k) {
                continue;
            }
            let (ii, jj) = (i as isize, j as isize);
            if i + 1 < nx && is_zero(k + 1) {
                let sides = pick([
                    label_of(ii, jj - 1),
                    label_of(ii + 1, jj - 1),
                    label_of(ii, jj + 1),
                    label_of(ii + 1, jj + 1),
                ]);
                out.push(Segment {
                    a: Key::Node(k),
                    b: Key::Node(k + 1),
                    sides,
                });
            }
            if j + 1 < ny && is_zero(k + nx) {
                let sides = pick([
                    label_of(ii - 1, jj),
                    label_of(ii - 1, jj + 1),
                    label_of(ii + 1, jj),
                    label_of(ii + 1, jj + 1),
                ]);
                out.push(Segment {
                    a: Key::Node(k),
                    b: Key::Node(k + nx),
                    sides,
                });
            }
        }
    }
}

/// Traces the nodal set, using `labels` (or none) to tag segment sides.
pub(crate) fn trace(f: &SampledField<'_>, labels: Option<&[i32]>) -> Vec<Polyline> {
    let sign = signs(f);
    let none;
    let labels = match labels {
        Some(l) => l,
        None => {
            none = vec![-1i32; sign.len()];
            &none
        }
    };
    let (nx, ny) = f.dims();
    let mut segs = Vec::new();
    if nx >= 2 && ny >= 2 {
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                cell_segments(f, &sign, labels, i, j, &mut segs);
            }
        }
    }
    zero_edge_segments(f, &sign, labels, &mut segs);

    // unique vertices, refined in parallel
    let mut keys: Vec<Key> = segs.iter().flat_map(|s| [s.a, s.b]).collect();
    keys.sort();
    keys.dedup();
    let index: HashMap<Key, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
    let verts: Vec<Vertex> = keys
        .par_iter()
        .map(|&k| refine_vertex(f, interpolated_vertex(f, k)))
        .collect();

    let mut seen_pairs = std::collections::HashSet::new();
    let mut edges: Vec<(usize, usize, Option<[usize; 2]>)> = Vec::new();
    for s in &segs {
        let (a, b) = (index[&s.a], index[&s.b]);
        if seen_pairs.insert((a.min(b), a.max(b))) {
            edges.push((a, b, s.sides));
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); verts.len()];
    for (e, &(a, b, _)) in edges.iter().enumerate() {
        adj[a].push(e);
        adj[b].push(e);
    }
    let mut used = vec![false; edges.len()];
    let mut out = Vec::new();
    let walk = |start: usize, first: usize, used: &mut Vec<bool>| -> Polyline {
        let mut pts = vec![start];
        let mut sides = Vec::new();
        let mut cur = start;
        let mut e = first;
        loop {
            used[e] = true;
            let (a, b, sd) = edges[e];
            let next = if a == cur { b } else { a };
            sides.push(sd);
            pts.push(next);
            cur = next;
            if adj[cur].len() != 2 || cur == start {
                break;
            }
            match adj[cur].iter().find(|&&x| !used[x]) {
                Some(&n) => e = n,
                None => break,
            }
        }
        let closed = cur == start;
        Polyline {
            points: pts.iter().map(|&v| verts[v].pos).collect(),
            gradients: pts.iter().map(|&v| verts[v].grad).collect(),
            imag: pts.iter().map(|&v| verts[v].imag).collect(),
            closed,
            sides,
        }
    };
    for v in 0..verts.len() {
        if adj[v].len() == 2 {
            continue;
        }
        for &e in &adj[v].clone() {
            if !used[e] {
                out.push(walk(v, e, &mut used));
            }
        }
    }
    for e in 0..edges.len() {
        if !used[e] {
            let start = edges[e].0;
            out.push(walk(start, e, &mut used));
        }
    }
    out
}

/// Marching-squares polylines of `v = 0`, clipped to cells with all corners in `G`.
pub fn extract_nodal_set(f: &SampledField<'_>) -> Vec<Polyline> {
    trace(f, None)
}
