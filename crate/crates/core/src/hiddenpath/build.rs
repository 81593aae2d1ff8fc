use super::start::near_offset;
use super::{samples_from_points, Crossing, HiddenPath, PathError, PathStart, StartKind, MONOTONE_SAMPLES};
use crate::geometry::{point_segment_distance, Vec2};
use crate::nodal::{NodalDecomposition, SampledField};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

/// Turn angle the smoothing aims for, below the certified bound.
const SMOOTH_TURN_DEG: f64 = 8.0;
const MAX_SMOOTHING_ROUNDS: usize = 10;

struct Ctx<'a, 'b> {
    f: &'a SampledField<'b>,
    d: &'a NodalDecomposition,
    h: f64,
    lambda: f64,
    guard: f64,
}

/// Straight crossing segment `center ± half·dir` from domain `from` to `to`.
#[derive(Debug, Clone, Copy)]
struct Stub {
    center: Vec2,
    dir: Vec2,
    half: f64,
    grad: f64,
    nodal_tangent: Vec2,
    from: usize,
    to: usize,
}

impl Stub {
    fn reversed(self) -> Stub {
        Stub {
            dir: -self.dir,
            from: self.to,
            to: self.from,
            ..self
        }
    }

    fn start(&self) -> Vec2 {
        self.center - self.dir * self.half
    }

    fn end(&self) -> Vec2 {
        self.center + self.dir * self.half
    }
}

/// A point where a chain inside a domain begins or ends, with the direction
/// the path has there and the length of the straight lead kept along it.
#[derive(Clone, Copy)]
struct Port {
    point: Vec2,
    dir: Vec2,
    lead: f64,
}

impl<'a, 'b> Ctx<'a, 'b> {
    fn v(&self, x: Vec2) -> Option<f64> {
        if !self.f.window().contains(x) {
            return None;
        }
        self.f.evaluate(x).ok().map(|s| s.value.re)
    }

    /// Distance along `dir` from `w` over which `v` keeps the sign `sign`.
    fn thickness(&self, w: Vec2, dir: Vec2, sign: f64, max: f64) -> f64 {
        let step = 0.25 * self.h;
        let mut good = 0.0;
        let mut t = step;
        while t <= max {
            match self.v(w + dir * t) {
                Some(v) if v * sign > 0.0 => good = t,
                _ => break,
            }
            t += step;
        }
        good
    }

    fn near_critical(&self, x: Vec2, r: f64) -> bool {
        self.d.critical_points.iter().any(|c| c.distance(x) <= r)
    }

    fn nodal_tangent(&self, w: Vec2) -> Vec2 {
        let mut best = (f64::INFINITY, Vec2::new(1.0, 0.0));
        for pl in &self.d.polylines {
            for s in pl.points.windows(2) {
                let dist = point_segment_distance(w, s[0], s[1]);
                if dist < best.0 && s[0].distance(s[1]) > 0.0 {
                    best = (dist, (s[1] - s[0]).normalized());
                }
            }
        }
        best.1
    }

    /// Orthogonal crossing stub through the nodal point `w` between the
    /// domains `from` and `to`, if `w` is regular and both sides are thick
    /// enough for `v` to be strictly monotone along it.
    fn stub(&self, w: Vec2, from: usize, to: usize) -> Option<Stub> {
        let to_sign = self.d.domains.get(to)?.sign as f64;
        let from_sign = self.d.domains.get(from)?.sign as f64;
        if to_sign == from_sign {
            return None;
        }
        let s = self.f.evaluate(w).ok()?;
        let g = s.real_gradient();
        let grad = g.norm();
        if !(grad >= self.d.params.grad_floor) || self.near_critical(w, self.d.params.critical_clearance) {
            return None;
        }
        let dir = g * (to_sign / grad);
        let reach = 0.5 * self.lambda;
        let tp = self.thickness(w, dir, to_sign, reach);
        let tm = self.thickness(w, -dir, from_sign, reach);
        let half = (self.lambda / 8.0).min(tp / 3.0).min(tm / 3.0);
        if half < 0.5 * self.h {
            return None;
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..MONOTONE_SAMPLES {
            let x = w + dir * (half * (2.0 * i as f64 / (MONOTONE_SAMPLES - 1) as f64 - 1.0));
            let v = self.v(x)? * to_sign;
            if v <= prev {
                return None;
            }
            prev = v;
        }
        if self.d.label_at(w + dir * (2.0 * half)) != Some(to)
            || self.d.label_at(w - dir * (2.0 * half)) != Some(from)
        {
            return None;
        }
        Some(Stub {
            center: w,
            dir,
            half,
            grad,
            nodal_tangent: self.nodal_tangent(w),
            from,
            to,
        })
    }

    /// First usable stub along the witness of the adjacency `a`–`b`, trying
    /// witness points from the middle outwards.
    fn edge_stub(&self, a: usize, b: usize) -> Option<Stub> {
        let e = self.d.adjacency_between(a, b)?;
        let pts = &e.witness.points;
        let mid = pts.len() / 2;
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by_key(|&i| (i as isize - mid as isize).abs());
        order.into_iter().find_map(|i| self.stub(pts[i], a, b))
    }

    fn clearance(&self, idx: usize) -> f64 {
        let (nx, _) = self.f.dims();
        let (i, j) = (idx % nx, idx / nx);
        let g = self.f.gradient(i, j).norm();
        if g > 0.0 {
            self.f.value(i, j).abs() / g
        } else {
            f64::INFINITY
        }
    }

    /// Node of `domain` nearest to `x` within a few grid steps.
    fn node_near(&self, x: Vec2, domain: usize) -> Option<usize> {
        let d = self.d;
        let fi = ((x.x - d.window.min.x) / d.h).round() as isize;
        let fj = ((x.y - d.window.min.y) / d.h).round() as isize;
        let mut best: Option<(f64, usize)> = None;
        for dj in -3..=3isize {
            for di in -3..=3isize {
                let (i, j) = (fi + di, fj + dj);
                if i < 0 || j < 0 || i >= d.nx as isize || j >= d.ny as isize {
                    continue;
                }
                let idx = j as usize * d.nx + i as usize;
                if d.labels[idx] != domain as i32 {
                    continue;
                }
                let dist = d.node(idx).distance(x);
                if best.is_none_or(|(b, _)| dist < b) {
                    best = Some((dist, idx));
                }
            }
        }
        best.map(|b| b.1)
    }

    /// Shortest grid route inside `domain`, penalising nodes close to the
    /// nodal set and excluding those within `min_clear` of it.
    fn grid_route(&self, domain: usize, from: usize, goal: &Goal, min_clear: f64) -> Option<Vec<Vec2>> {
        let d = self.d;
        let n = d.nx * d.ny;
        let is_goal = |idx: usize| match goal {
            Goal::Node(g) => idx == *g,
            Goal::Escape(r) => d.node(idx).norm() >= *r,
        };
        let allowed = |idx: usize| {
            d.labels[idx] == domain as i32 && (idx == from || is_goal(idx) || self.clearance(idx) >= min_clear)
        };
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[from] = 0.0;
        heap.push(State { cost: 0.0, idx: from });
        let mut reached = None;
        while let Some(State { cost, idx }) = heap.pop() {
            if cost > dist[idx] {
                continue;
            }
            if is_goal(idx) {
                reached = Some(idx);
                break;
            }
            let (i, j) = ((idx % d.nx) as isize, (idx / d.nx) as isize);
            for dj in -1..=1isize {
                for di in -1..=1isize {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (a, b) = (i + di, j + dj);
                    if a < 0 || b < 0 || a >= d.nx as isize || b >= d.ny as isize {
                        continue;
                    }
                    let nb = b as usize * d.nx + a as usize;
                    if !allowed(nb) {
                        continue;
                    }
                    let len = d.h * ((di * di + dj * dj) as f64).sqrt();
                    let penalty = (1.0 - self.clearance(nb) / (3.0 * self.h)).max(0.0);
                    let c = cost + len * (1.0 + 4.0 * penalty);
                    if c < dist[nb] {
                        dist[nb] = c;
                        prev[nb] = idx;
                        heap.push(State { cost: c, idx: nb });
                    }
                }
            }
        }
        let mut idx = reached?;
        let mut out = vec![d.node(idx)];
        while idx != from {
            idx = prev[idx];
            out.push(d.node(idx));
        }
        out.reverse();
        Some(out)
    }

    /// Every point and chord midpoint of `pts` lies in `G`, inside the
    /// window, away from critical points, and where `v` can be evaluated it
    /// has the sign of the domain. Points within the guard distance of the
    /// boundary on the entry segment are exempt from evaluation.
    fn chain_is_valid(&self, pts: &[Vec2], sign: f64, entry: Option<(Vec2, f64)>) -> bool {
        let s = self.f.scatterer();
        let tol = s.default_tolerance();
        let check = |x: Vec2| {
            if self.near_critical(x, self.h) {
                return false;
            }
            if let Some((x1, len)) = entry {
                let db = s.distance_to_boundary(x);
                if x.distance(x1) <= len && db <= 2.0 * self.guard {
                    return !s.contains(x) || db <= tol;
                }
            }
            if !s.is_empty() && s.contains(x) {
                return false;
            }
            matches!(self.v(x), Some(v) if v * sign > 0.0)
        };
        pts.iter().all(|&x| check(x)) && pts.windows(2).all(|w| check((w[0] + w[1]) * 0.5))
    }

    /// Chain inside `domain` from `a` to `b` (or to the escape radius),
    /// smoothed with tangents matching the ports and validated.
    fn chain(
        &self,
        domain: usize,
        a: Port,
        b: Option<Port>,
        escape: f64,
        entry: Option<(Vec2, f64)>,
    ) -> Result<Vec<Vec2>, PathError> {
        let sign = self.d.domains[domain].sign as f64;
        let lead_a = a.point + a.dir * a.lead;
        let from = self
            .node_near(lead_a, domain)
            .ok_or_else(|| PathError::NoRouteToInfinity(format!("no grid node of domain {domain} near {lead_a:?}")))?;
        let (goal, lead_b) = match b {
            Some(p) => {
                let lead_b = p.point - p.dir * p.lead;
                let g = self.node_near(lead_b, domain).ok_or_else(|| {
                    PathError::NoRouteToInfinity(format!("no grid node of domain {domain} near {lead_b:?}"))
                })?;
                (Goal::Node(g), Some(lead_b))
            }
            None => (Goal::Escape(escape), None),
        };
        for min_clear in [0.5 * self.h, self.h, 2.0 * self.h] {
            let Some(route) = self.grid_route(domain, from, &goal, min_clear) else {
                continue;
            };
            let mut ctrl = vec![a.point, lead_a];
            ctrl.extend(route);
            let fixed_tail = if let (Some(p), Some(lb)) = (b, lead_b) {
                ctrl.push(lb);
                ctrl.push(p.point);
                2
            } else {
                0
            };
            for drop_leads in [false, true] {
                let pts = smooth(&prune_cusps(dedupe(&ctrl), fixed_tail, drop_leads));
                if self.chain_is_valid(&pts, sign, entry) && ports_match(&pts, a.dir, b.map(|p| p.dir)) {
                    return Ok(pts);
                }
            }
        }
        Err(PathError::NoRouteToInfinity(format!(
            "could not route inside domain {domain}"
        )))
    }
}

enum Goal {
    Node(usize),
    Escape(f64),
}

#[derive(PartialEq)]
struct State {
    cost: f64,
    idx: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, o: &Self) -> Ordering {
        o.cost.total_cmp(&self.cost).then_with(|| o.idx.cmp(&self.idx))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn dedupe(pts: &[Vec2]) -> Vec<Vec2> {
    let mut out: Vec<Vec2> = Vec::with_capacity(pts.len());
    for &p in pts {
        if out.last().is_none_or(|q| q.distance(p) > 1e-12) {
            out.push(p);
        }
    }
    out
}

/// Drops route points where the control polygon doubles back, which
/// happens when the nearest grid node lies behind a lead point or when the
/// leads of both ports overlap. Route points go first; the first two and the
/// last `fixed_tail` points are kept unless `drop_leads` is set.
fn prune_cusps(mut pts: Vec<Vec2>, fixed_tail: usize, drop_leads: bool) -> Vec<Vec2> {
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let cusp = (1..n - 1).find(|&i| {
            let (u, w) = (pts[i] - pts[i - 1], pts[i + 1] - pts[i]);
            u.dot(w) < 0.0
        });
        let Some(i) = cusp else { return pts };
        // remove a free point at or next to the cusp; lead points go only
        // when nothing else can, end points never
        let free = |j: usize| j >= 2 && j + fixed_tail < n;
        let lead = |j: usize| j >= 1 && j + 1 < n;
        let cands = [i, i + 1, i - 1];
        let j = cands
            .into_iter()
            .find(|&j| free(j))
            .or_else(|| cands.into_iter().find(|&j| drop_leads && lead(j)));
        match j {
            Some(j) => {
                pts.remove(j);
                pts = dedupe(&pts);
            }
            None => return pts,
        }
    }
}

/// The chain turns by at most the certified bound, including at the ports
/// where it meets the incoming and outgoing directions.
fn ports_match(pts: &[Vec2], a_dir: Vec2, b_dir: Option<Vec2>) -> bool {
    if pts.len() < 2 {
        return false;
    }
    let first = (pts[1] - pts[0]).normalized();
    let last = (pts[pts.len() - 1] - pts[pts.len() - 2]).normalized();
    max_turn(pts) <= super::MAX_TURN_DEG
        && super::angle_between(a_dir, first) <= super::MAX_TURN_DEG
        && b_dir.is_none_or(|d| super::angle_between(last, d) <= super::MAX_TURN_DEG)
}

fn max_turn(pts: &[Vec2]) -> f64 {
    pts.windows(3)
        .map(|w| super::angle_between((w[1] - w[0]).normalized(), (w[2] - w[1]).normalized()))
        .fold(0.0, f64::max)
}

/// One round of Chaikin corner cutting that keeps both end points, so the
/// end tangents are those of the first and last chords.
fn chaikin(pts: &[Vec2]) -> Vec<Vec2> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let mut out = Vec::with_capacity(2 * pts.len());
    out.push(pts[0]);
    for w in pts.windows(2) {
        out.push(w[0] * 0.75 + w[1] * 0.25);
        out.push(w[0] * 0.25 + w[1] * 0.75);
    }
    out.push(pts[pts.len() - 1]);
    dedupe(&out)
}

fn smooth(ctrl: &[Vec2]) -> Vec<Vec2> {
    let mut pts = ctrl.to_vec();
    for _ in 0..MAX_SMOOTHING_ROUNDS {
        if max_turn(&pts) <= SMOOTH_TURN_DEG {
            break;
        }
        pts = chaikin(&pts);
    }
    pts
}

/// Shortest domain sequence from `from` to any domain accepted by `goal`,
/// using only edges with a usable stub. Lower indices are explored first.
fn domain_route(
    n: usize,
    edges: &[Vec<(usize, Stub)>],
    from: usize,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<Stub>> {
    let mut prev: Vec<Option<Stub>> = vec![None; n];
    let mut seen = vec![false; n];
    seen[from] = true;
    let mut q = VecDeque::from([from]);
    while let Some(x) = q.pop_front() {
        if goal(x) {
            let mut out = Vec::new();
            let mut cur = x;
            while cur != from {
                let s = prev[cur].expect("visited domains have a predecessor");
                out.push(s);
                cur = s.from;
            }
            out.reverse();
            return Some(out);
        }
        for &(y, s) in &edges[x] {
            if !seen[y] {
                seen[y] = true;
                prev[y] = Some(s);
                q.push_back(y);
            }
        }
    }
    None
}

/// Builds a path from `start` through the nodal point `target` (if any) to a
/// point of norm at least `escape_radius`, aiming for `2·escape_radius` when
/// the window allows it.
pub fn build_path(
    f: &SampledField<'_>,
    d: &NodalDecomposition,
    start: &PathStart,
    target: Option<Vec2>,
    escape_radius: f64,
) -> Result<HiddenPath, PathError> {
    let s = f.scatterer();
    let required = s.bounding_radius();
    if !(escape_radius > required) {
        return Err(PathError::EscapeRadiusTooSmall {
            radius: escape_radius,
            required,
        });
    }
    let h = f.h();
    let ctx = Ctx {
        f,
        d,
        h,
        lambda: 2.0 * std::f64::consts::PI / f.wavenumber(),
        guard: near_offset(f.field()),
    };

    // entry segment from x₁ along ν
    let nu = start.normal.normalized();
    let x1 = start.point;
    let entry_len = match start.kind {
        StartKind::Boundary { .. } => {
            let tol = 1e-9 * (1.0 + s.bounding_radius());
            if s.distance_to_boundary(x1) > tol {
                return Err(PathError::StartInvalid("start is not on the boundary".into()));
            }
            2.5 * h + ctx.guard
        }
        StartKind::Anchor => {
            if !s.is_empty() && s.contains(x1) {
                return Err(PathError::StartInvalid("anchor lies in the scatterer".into()));
            }
            h
        }
    };
    let entry_end = x1 + nu * entry_len;
    if !s.is_empty() && s.contains(x1 + nu * (0.5 * entry_len)) {
        return Err(PathError::StartInvalid("normal does not point into G".into()));
    }
    let v_end = ctx
        .v(entry_end)
        .ok_or_else(|| PathError::StartInvalid("entry segment leaves the sampled region".into()))?;
    let sign0 = v_end.signum();
    let steps = 16;
    for i in 1..=steps {
        let x = x1 + nu * (entry_len * i as f64 / steps as f64);
        if s.distance_to_boundary(x) <= 2.0 * ctx.guard && !s.is_empty() {
            continue;
        }
        match ctx.v(x) {
            Some(v) if v * sign0 > 0.0 => {}
            _ => return Err(PathError::StartInvalid("entry segment crosses the nodal set".into())),
        }
    }
    let start_domain = (0..d.domains.len())
        .filter(|&k| d.domains[k].sign as f64 == sign0)
        .filter_map(|k| ctx.node_near(entry_end, k).map(|idx| (d.node(idx).distance(entry_end), k)))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|x| x.1)
        .ok_or_else(|| PathError::StartInvalid("entry segment does not reach a nodal domain".into()))?;
    let entry = Some((x1, entry_len));

    // escape target: nodes of norm 2R if the window reaches them, else R
    let max_norm = (0..d.nx * d.ny)
        .filter(|&i| d.labels[i] >= 0)
        .map(|i| d.node(i).norm())
        .fold(0.0, f64::max);
    if max_norm < escape_radius {
        return Err(PathError::NoRouteToInfinity(format!(
            "window reaches norm {max_norm:.3}, below the escape radius {escape_radius:.3}"
        )));
    }
    let r_esc = (2.0 * escape_radius).min(max_norm);
    let escape_domains: Vec<bool> = {
        let mut e = vec![false; d.domains.len()];
        for i in 0..d.nx * d.ny {
            if d.labels[i] >= 0 && d.node(i).norm() >= r_esc {
                e[d.labels[i] as usize] = true;
            }
        }
        e
    };

    // straight ray when nothing is in the way
    if target.is_none() {
        if let Some(path) = straight_ray(&ctx, start, entry_len, sign0, r_esc, escape_radius, start_domain) {
            return Ok(path);
        }
    }

    // stubs for every certified adjacency
    let n = d.domains.len();
    let mut edges: Vec<Vec<(usize, Stub)>> = vec![Vec::new(); n];
    for e in &d.adjacency {
        if let Some(st) = ctx.edge_stub(e.a, e.b) {
            edges[e.a].push((e.b, st));
            edges[e.b].push((e.a, st.reversed()));
        }
    }
    for list in &mut edges {
        list.sort_by_key(|x| x.0);
    }

    let mut stubs: Vec<(Stub, bool)> = Vec::new();
    let mut current = start_domain;
    if let Some(y) = target {
        let smp = f.evaluate(y)?;
        let g = smp.real_gradient();
        let gn = g.norm();
        if !(gn >= d.params.grad_floor) || ctx.near_critical(y, d.params.critical_clearance) {
            return Err(PathError::TargetOnCriticalPoint(y));
        }
        if smp.value.re.abs() > gn * h {
            return Err(PathError::StartInvalid(format!("target {y:?} is not on the nodal set")));
        }
        let ghat = g * (1.0 / gn);
        let side = |sgn: f64| {
            (1..=6).find_map(|m| d.label_at(y + ghat * (sgn * 0.5 * h * m as f64)).filter(|&l| d.domains[l].sign as f64 == sgn))
        };
        let (neg, pos) = match (side(-1.0), side(1.0)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(PathError::TargetOnCriticalPoint(y)),
        };
        let to_neg = domain_route(n, &edges, current, |k| k == neg);
        let to_pos = domain_route(n, &edges, current, |k| k == pos);
        let (route, from, to) = match (to_neg, to_pos) {
            (Some(a), Some(b)) if b.len() < a.len() => (b, pos, neg),
            (Some(a), _) => (a, neg, pos),
            (None, Some(b)) => (b, pos, neg),
            (None, None) => {
                return Err(PathError::NoRouteToInfinity(format!(
                    "no certified route from domain {current} to the target"
                )))
            }
        };
        let target_stub = ctx.stub(y, from, to).ok_or(PathError::TargetOnCriticalPoint(y))?;
        stubs.extend(route.into_iter().map(|s| (s, false)));
        stubs.push((target_stub, true));
        current = to;
    }
    let tail = domain_route(n, &edges, current, |k| escape_domains[k]).ok_or_else(|| {
        PathError::NoRouteToInfinity(format!("no certified route from domain {current} to the escape radius"))
    })?;
    stubs.extend(tail.into_iter().map(|s| (s, false)));

    // chains between stubs
    let mut points = Vec::new();
    let mut domains = vec![start_domain];
    let mut port = Port {
        point: x1,
        dir: nu,
        lead: entry_len,
    };
    let mut domain = start_domain;
    let mut placed: Vec<(Stub, bool)> = Vec::new();
    for (st, is_target) in &stubs {
        let b = Port {
            point: st.start(),
            dir: st.dir,
            lead: st.half,
        };
        let chain = ctx.chain(domain, port, Some(b), r_esc, if placed.is_empty() { entry } else { None })?;
        append(&mut points, &chain);
        for i in 0..MONOTONE_SAMPLES {
            let x = st.start() + st.dir * (2.0 * st.half * i as f64 / (MONOTONE_SAMPLES - 1) as f64);
            append(&mut points, &[x]);
        }
        placed.push((*st, *is_target));
        domain = st.to;
        domains.push(domain);
        port = Port {
            point: st.end(),
            dir: st.dir,
            lead: st.half,
        };
    }
    let chain = ctx.chain(domain, port, None, r_esc, if placed.is_empty() { entry } else { None })?;
    append(&mut points, &chain);

    let samples = samples_from_points(&points);
    let t_of = |p: Vec2| {
        samples
            .iter()
            .min_by(|a, b| a.point.distance(p).total_cmp(&b.point.distance(p)))
            .map(|s| s.t)
            .unwrap_or(0.0)
    };
    let crossings = placed
        .iter()
        .map(|(st, _)| Crossing {
            t: t_of(st.center),
            point: st.center,
            nodal_tangent: st.nodal_tangent,
            grad_norm: st.grad,
            angle_deg: st.dir.cross(st.nodal_tangent).abs().atan2(st.dir.dot(st.nodal_tangent).abs()).to_degrees(),
            stub_half_length: st.half,
            from_domain: st.from,
            to_domain: st.to,
        })
        .collect();
    let target_t = target.map(t_of);
    Ok(HiddenPath {
        samples,
        crossings,
        start: *start,
        target,
        target_t,
        escape_radius,
        domains,
    })
}

fn append(points: &mut Vec<Vec2>, more: &[Vec2]) {
    for &p in more {
        if points.last().is_none_or(|q: &Vec2| q.distance(p) > 1e-12) {
            points.push(p);
        }
    }
}

/// The ray `x₁ + tν` up to norm `r_esc`, if `v` keeps one sign along it.
fn straight_ray(
    ctx: &Ctx<'_, '_>,
    start: &PathStart,
    entry_len: f64,
    sign0: f64,
    r_esc: f64,
    escape_radius: f64,
    domain: usize,
) -> Option<HiddenPath> {
    let (x, nu) = (start.point, start.normal.normalized());
    // |x + tν| = r_esc
    let b = x.dot(nu);
    let c = x.norm_sq() - r_esc * r_esc;
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t_end = -b + disc.sqrt();
    if !(t_end > entry_len) {
        return None;
    }
    let step = 0.25 * ctx.h;
    let n = (t_end / step).ceil() as usize;
    for i in 1..=n {
        let p = x + nu * (t_end * i as f64 / n as f64);
        if p.distance(x) <= entry_len {
            continue;
        }
        if ctx.near_critical(p, ctx.h) {
            return None;
        }
        match ctx.v(p) {
            Some(v) if v * sign0 > 0.0 => {}
            _ => return None,
        }
    }
    Some(HiddenPath {
        samples: samples_from_points(&[x, x + nu * t_end]),
        crossings: Vec::new(),
        start: *start,
        target: None,
        target_t: None,
        escape_radius,
        domains: vec![domain],
    })
}
