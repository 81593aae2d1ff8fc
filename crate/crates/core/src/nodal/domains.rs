use super::contour::{cell_corners, center_sign, signs, trace, Polyline};
use super::critical::find_critical_points_with;
use super::grid::{NodeMask, SampledField};
use super::{NodalError, NodalParams, Window};
use crate::geometry::Vec2;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

/// One nodal domain: a sign component of the sampled grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub id: usize,
    pub sign: i8,
    /// Grid nodes in the domain.
    pub size: usize,
    /// First node of the domain in row-major order.
    pub seed: Vec2,
}

/// A run of nodal vertices separating two domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub polyline: usize,
    /// Index of the first vertex of the run in the polyline.
    pub start: usize,
    pub points: Vec<Vec2>,
    pub min_grad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adjacency {
    pub a: usize,
    pub b: usize,
    pub witness: Witness,
}

/// Nodal set, critical points, domain labelling and certified adjacency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalDecomposition {
    pub window: Window,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub k: f64,
    pub complex: bool,
    pub params: NodalParams,
    pub polylines: Vec<Polyline>,
    pub critical_points: Vec<Vec2>,
    /// Domain label per grid node, `-1` for nodes outside every domain.
    #[serde(with = "super::io::rle")]
    pub labels: Vec<i32>,
    pub domains: Vec<Domain>,
    pub adjacency: Vec<Adjacency>,
    #[serde(default)]
    pub ordering: Option<Vec<usize>>,
}

impl NodalDecomposition {
    pub fn label_at(&self, x: Vec2) -> Option<usize> {
        let fi = ((x.x - self.window.min.x) / self.h).round();
        let fj = ((x.y - self.window.min.y) / self.h).round();
        if fi < 0.0 || fj < 0.0 || fi >= self.nx as f64 || fj >= self.ny as f64 {
            return None;
        }
        let l = self.labels[fj as usize * self.nx + fi as usize];
        (l >= 0).then_some(l as usize)
    }

    pub fn node(&self, idx: usize) -> Vec2 {
        Vec2::new(
            self.window.min.x + (idx % self.nx) as f64 * self.h,
            self.window.min.y + (idx / self.nx) as f64 * self.h,
        )
    }

    /// Adjacent domains of `d` in increasing order.
    pub fn neighbours(&self, d: usize) -> Vec<usize> {
        let mut n: Vec<usize> = self
            .adjacency
            .iter()
            .filter_map(|e| {
                if e.a == d {
                    Some(e.b)
                } else if e.b == d {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect();
        n.sort_unstable();
        n.dedup();
        n
    }

    pub fn adjacency_between(&self, a: usize, b: usize) -> Option<&Adjacency> {
        let (a, b) = (a.min(b), a.max(b));
        self.adjacency.iter().find(|e| e.a == a && e.b == b)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Sign components of the grid: 4-neighbours of equal sign, plus diagonal
/// neighbours that the marching-squares cell leaves connected.
pub(crate) fn label_domains(f: &SampledField<'_>) -> (Vec<i32>, Vec<Domain>) {
    let sign = signs(f);
    let (nx, ny) = f.dims();
    let mut uf = UnionFind::new(sign.len());
    for j in 0..ny {
        for i in 0..nx {
            let k = f.index(i, j);
            if sign[k] == 0 {
                continue;
            }
            if i + 1 < nx && sign[k + 1] == sign[k] {
                uf.union(k, k + 1);
            }
            if j + 1 < ny && sign[k + nx] == sign[k] {
                uf.union(k, k + nx);
            }
        }
    }
    for j in 0..ny.saturating_sub(1) {
        for i in 0..nx.saturating_sub(1) {
            let c = cell_corners(f, i, j);
            if c.iter().any(|&x| f.mask[x] != NodeMask::InG) {
                continue;
            }
            let s = [sign[c[0]], sign[c[1]], sign[c[2]], sign[c[3]]];
            let saddle = (0..4).all(|q| s[q] != 0 && s[q] == -s[(q + 1) % 4]);
            for (p, q) in [(0, 2), (1, 3)] {
                if s[p] == 0 || s[p] != s[q] {
                    continue;
                }
                // a saddle separates the diagonal unless the centre shares its sign
                let blocked = saddle && center_sign(f, &c) != s[p];
                if !blocked {
                    uf.union(c[p], c[q]);
                }
            }
        }
    }
    let mut labels = vec![-1i32; sign.len()];
    let mut roots: BTreeMap<usize, usize> = BTreeMap::new();
    let mut domains: Vec<Domain> = Vec::new();
    for k in 0..sign.len() {
        if sign[k] == 0 {
            continue;
        }
        let r = uf.find(k);
        let id = *roots.entry(r).or_insert_with(|| {
            domains.push(Domain {
                id: domains.len(),
                sign: sign[k],
                size: 0,
                seed: f.node_at(k),
            });
            domains.len() - 1
        });
        labels[k] = id as i32;
        domains[id].size += 1;
    }
    (labels, domains)
}

fn witnesses(
    polylines: &[Polyline],
    critical: &[Vec2],
    params: &NodalParams,
) -> Vec<Adjacency> {
    let clear = |p: Vec2| critical.iter().all(|c| c.distance(p) > params.critical_clearance);
    let good = |pl: &Polyline, i: usize| pl.grad_norm(i) >= params.grad_floor && clear(pl.points[i]);
    let mut best: BTreeMap<(usize, usize), Adjacency> = BTreeMap::new();
    for (pi, pl) in polylines.iter().enumerate() {
        let nseg = pl.sides.len();
        let mut s = 0;
        while s < nseg {
            let Some(pair) = pl.sides[s] else {
                s += 1;
                continue;
            };
            if !good(pl, s) {
                s += 1;
                continue;
            }
            // extend the run while sides match and vertices stay regular
            let mut e = s;
            while e < nseg && pl.sides[e] == Some(pair) && good(pl, e + 1) {
                e += 1;
            }
            let nverts = e - s + 1;
            if nverts >= params.witness_points && pair[0] != pair[1] {
                let min_grad = (s..=e).map(|i| pl.grad_norm(i)).fold(f64::INFINITY, f64::min);
                let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
                let cand = Adjacency {
                    a,
                    b,
                    witness: Witness {
                        polyline: pi,
                        start: s,
                        points: pl.points[s..=e].to_vec(),
                        min_grad,
                    },
                };
                let replace = match best.get(&(a, b)) {
                    None => true,
                    Some(old) => min_grad > old.witness.min_grad,
                };
                if replace {
                    best.insert((a, b), cand);
                }
            }
            s = e.max(s + 1);
        }
    }
    best.into_values().collect()
}

/// Decomposition with default thresholds.
pub fn nodal_domains(f: &SampledField<'_>) -> NodalDecomposition {
    nodal_domains_with(f, &NodalParams::defaults(f))
}

pub fn nodal_domains_with(f: &SampledField<'_>, params: &NodalParams) -> NodalDecomposition {
    let (labels, domains) = label_domains(f);
    let polylines = trace(f, Some(&labels));
    let critical_points = find_critical_points_with(f, params.grad_floor, params.v_floor);
    let adjacency = witnesses(&polylines, &critical_points, params);
    let (nx, ny) = f.dims();
    NodalDecomposition {
        window: f.window(),
        h: f.h(),
        nx,
        ny,
        k: f.wavenumber(),
        complex: f.is_complex(),
        params: *params,
        polylines,
        critical_points,
        labels,
        domains,
        adjacency,
        ordering: None,
    }
}

/// Breadth-first ordering from `start`, visiting lower indices first, so that
/// every later domain shares a certified witness with an earlier one.
pub fn order_domains(d: &NodalDecomposition, start: usize) -> Result<Vec<usize>, NodalError> {
    let n = d.domains.len();
    if start >= n {
        return Err(NodalError::InvalidDomain(start));
    }
    let adj: Vec<Vec<usize>> = (0..n).map(|i| d.neighbours(i)).collect();
    let bfs = |root: usize, seen: &mut Vec<bool>| -> Vec<usize> {
        let mut order = vec![root];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(x) = q.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                    q.push_back(y);
                }
            }
        }
        order
    };
    let mut seen = vec![false; n];
    let order = bfs(start, &mut seen);
    if order.len() == n {
        return Ok(order);
    }
    let mut components = vec![order];
    for r in 0..n {
        if !seen[r] {
            let mut c = bfs(r, &mut seen);
            c.sort_unstable();
            components.push(c);
        }
    }
    Err(NodalError::DisconnectedAdjacency { components })
}

/// Positions in `ordering` (after the first) whose domain has no certified
/// witness to an earlier domain. Empty for a valid ordering.
pub fn ordering_violations(d: &NodalDecomposition, ordering: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for (pos, &j) in ordering.iter().enumerate().skip(1) {
        let ok = ordering[..pos].iter().any(|&i| {
            d.adjacency_between(i, j)
                .map(|e| {
                    e.witness.min_grad >= d.params.grad_floor
                        && e.witness.points.len() >= d.params.witness_points
                })
                .unwrap_or(false)
        });
        if !ok {
            out.push(pos);
        }
    }
    out
}
