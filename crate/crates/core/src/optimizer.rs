//! Numerical approximation of maximal-distance minimizers: penalized length
//! descent on the vertex coordinates of a polyline tree, with discrete
//! topology moves between descent phases and a final feasibility projection.
//!
//! The state is always a tree — cycles are prevented rather than penalized.
//! The penalized objective is `length + w · max(0, F̃ − r)²` where `F̃` is a
//! log-sum-exp smoothing of the maximal distance; its gradient is analytic.
//! Runs are deterministic for a fixed `(m, cfg, seed)`: every loop is
//! sequential with ordered reductions.

use serde::{Deserialize, Serialize};

use crate::energy::{PointCloud, SigmaDistanceField};
use crate::error::{Error, Result};
use crate::geometry::{Point, Segment};
use crate::minlab::trimmed_tree;
use crate::sigma::{GraphEdge, GraphVertex, SigmaGraph};
use crate::steiner::fermat_junction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InitStrategy {
    /// Trimmed Steiner tree of the cloud (finite clouds of 2..=6 points).
    TrimmedSteiner,
    /// Seeded random star over the cloud with subdivided spokes.
    RandomTree,
    /// Caller-provided tree graph; polylines are flattened into tree edges.
    UserGraph { graph: SigmaGraph },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub r: f64,
    pub init: InitStrategy,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_penalty_schedule")]
    pub penalty_schedule: Vec<f64>,
    #[serde(default = "default_step_size")]
    pub step_size: f64,
    #[serde(default = "default_true")]
    pub topology_moves_enabled: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_max_iters() -> usize {
    600
}

fn default_penalty_schedule() -> Vec<f64> {
    vec![1e3, 1e4, 1e5, 1e6]
}

fn default_step_size() -> f64 {
    0.05
}

fn default_true() -> bool {
    true
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(Error::InvalidConfig(format!("r must be positive, got {}", self.r)));
        }
        if !(self.step_size > 0.0) {
            return Err(Error::InvalidConfig("step_size must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if self.penalty_schedule.is_empty() {
            return Err(Error::InvalidConfig("penalty schedule must be nonempty".into()));
        }
        if self.penalty_schedule.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig("penalty schedule must be nondecreasing".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub length: f64,
    pub energy: f64,
    pub violation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub iterations: Vec<IterationRecord>,
    pub final_sigma: SigmaGraph,
    pub converged: bool,
    pub final_violation: f64,
    /// Geometry of every k-th iterate (k = max_iters/8), for film strips.
    pub snapshots: Vec<SigmaGraph>,
}

/// Mutable tree over explicit vertex positions; edges are straight.
#[derive(Debug, Clone)]
struct TreeState {
    pos: Vec<Point>,
    edges: Vec<(usize, usize)>,
}

impl TreeState {
    fn length(&self) -> f64 {
        self.edges
            .iter()
            .map(|(u, v)| self.pos[*u].dist(self.pos[*v]))
            .sum()
    }

    fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .map(|(a, b)| (*a == v) as usize + (*b == v) as usize)
            .sum()
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (a, b) in &self.edges {
            if *a == v {
                out.push(*b);
            } else if *b == v {
                out.push(*a);
            }
        }
        out.sort_unstable();
        out
    }

    fn segments(&self) -> Vec<Segment> {
        self.edges
            .iter()
            .filter_map(|(u, v)| Segment::new(self.pos[*u], self.pos[*v]).ok())
            .collect()
    }

    fn to_sigma(&self, provenance: &str) -> Result<SigmaGraph> {
        let vertices: Vec<GraphVertex> = self
            .pos
            .iter()
            .enumerate()
            .map(|(i, p)| GraphVertex { id: i as u64, x: p.x, y: p.y })
            .collect();
        let edges: Vec<GraphEdge> = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, (u, v))| GraphEdge {
                id: k as u64,
                u: *u as u64,
                v: *v as u64,
                polyline: vec![
                    [self.pos[*u].x, self.pos[*u].y],
                    [self.pos[*v].x, self.pos[*v].y],
                ],
            })
            .collect();
        SigmaGraph::new(vertices, edges, provenance)
    }

    /// Contracts edge `k`, merging its higher-index endpoint into the lower.
    fn contract_edge(&mut self, k: usize) {
        let (u, v) = self.edges[k];
        let (keep, gone) = if u < v { (u, v) } else { (v, u) };
        self.edges.remove(k);
        for e in self.edges.iter_mut() {
            if e.0 == gone {
                e.0 = keep;
            }
            if e.1 == gone {
                e.1 = keep;
            }
        }
        self.remove_vertex(gone);
    }

    fn remove_vertex(&mut self, gone: usize) {
        self.pos.remove(gone);
        for e in self.edges.iter_mut() {
            if e.0 > gone {
                e.0 -= 1;
            }
            if e.1 > gone {
                e.1 -= 1;
            }
        }
    }

    /// Maximal chains of degree-2 vertices, as vertex sequences between
    /// non-degree-2 endpoints.
    fn chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut visited_edges = vec![false; self.edges.len()];
        let anchors: Vec<usize> = (0..self.pos.len()).filter(|&v| self.degree(v) != 2).collect();
        for &start in &anchors {
            for (k, &(a, b)) in self.edges.iter().enumerate() {
                if visited_edges[k] || (a != start && b != start) {
                    continue;
                }
                let mut chain = vec![start];
                let mut prev = start;
                let mut cur = if a == start { b } else { a };
                visited_edges[k] = true;
                while self.degree(cur) == 2 {
                    chain.push(cur);
                    let nb = self.neighbors(cur);
                    let next = if nb[0] == prev { nb[1] } else { nb[0] };
                    let ek = self
                        .edges
                        .iter()
                        .position(|&(x, y)| (x == cur && y == next) || (x == next && y == cur))
                        .unwrap();
                    if visited_edges[ek] {
                        break;
                    }
                    visited_edges[ek] = true;
                    prev = cur;
                    cur = next;
                }
                chain.push(cur);
                if chain.len() > 2 {
                    out.push(chain);
                }
            }
        }
        out
    }

    /// Repositions the interior vertices of each degree-2 chain at uniform
    /// arclength along the chain polyline. On a bent chain this cuts corners
    /// (never lengthening); on a straight chain it only re-spaces vertices,
    /// which keeps the tip edges from collapsing while the ends retract.
    fn redistribute_chains(&mut self) {
        for chain in self.chains() {
            let pts: Vec<Point> = chain.iter().map(|&v| self.pos[v]).collect();
            let mut cum = vec![0.0];
            for w in pts.windows(2) {
                cum.push(cum.last().unwrap() + w[0].dist(w[1]));
            }
            let total = *cum.last().unwrap();
            if total <= 0.0 {
                continue;
            }
            let interior = chain.len() - 2;
            for (j, &v) in chain[1..chain.len() - 1].iter().enumerate() {
                let target = total * (j + 1) as f64 / (interior + 1) as f64;
                // Locate the polyline segment containing the target length.
                let mut seg = 0;
                while seg + 2 < cum.len() && cum[seg + 1] < target {
                    seg += 1;
                }
                let span = cum[seg + 1] - cum[seg];
                let t = if span > 0.0 { (target - cum[seg]) / span } else { 0.0 };
                self.pos[v] = pts[seg].add(pts[seg + 1].sub(pts[seg]).scale(t));
            }
        }
    }
}

/// The penalized objective over a fixed tree topology; exposed for the
/// finite-difference gradient checks.
pub struct PenalizedObjective<'a> {
    pub m: &'a PointCloud,
    pub r: f64,
    pub weight: f64,
    pub beta: f64,
}

impl<'a> PenalizedObjective<'a> {
    /// Objective value plus the true (unsmoothed) maximal distance.
    pub fn value(&self, pos: &[Point], edges: &[(usize, usize)]) -> (f64, f64) {
        let (obj, _, fmax) = self.eval(pos, edges, false);
        (obj, fmax)
    }

    pub fn gradient(&self, pos: &[Point], edges: &[(usize, usize)]) -> Vec<Point> {
        self.eval(pos, edges, true).1
    }

    fn eval(
        &self,
        pos: &[Point],
        edges: &[(usize, usize)],
        want_grad: bool,
    ) -> (f64, Vec<Point>, f64) {
        let segs: Vec<Segment> = edges
            .iter()
            .filter_map(|(u, v)| Segment::new(pos[*u], pos[*v]).ok())
            .collect();
        // Degenerate edges vanish from the distance field; map field indices
        // back to edge indices.
        let seg_edge: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter(|(_, (u, v))| pos[*u].dist(pos[*v]) > 0.0)
            .map(|(k, _)| k)
            .collect();
        let field = SigmaDistanceField::from_segments(&segs).expect("nonempty tree");

        let mut length = 0.0;
        for (u, v) in edges {
            length += pos[*u].dist(pos[*v]);
        }

        let n = self.m.len();
        let mut dist = vec![0.0f64; n];
        let mut which = vec![(0usize, 0.0f64); n];
        let mut fmax = f64::NEG_INFINITY;
        for i in 0..n {
            let (d, si, t) = field.nearest_detail(self.m.point(i));
            dist[i] = d;
            which[i] = (si, t);
            if d > fmax {
                fmax = d;
            }
        }
        // Stable log-sum-exp smoothing of the max.
        let mut z = 0.0f64;
        for &d in &dist {
            z += (self.beta * (d - fmax)).exp();
        }
        let fsoft = fmax + z.ln() / self.beta;
        let violation = (fsoft - self.r).max(0.0);
        let obj = length + self.weight * violation * violation;

        if !want_grad {
            return (obj, Vec::new(), fmax);
        }

        let mut grad = vec![Point::new(0.0, 0.0); pos.len()];
        for (u, v) in edges {
            if let Some(dir) = pos[*u].sub(pos[*v]).unit() {
                grad[*u] = grad[*u].add(dir);
                grad[*v] = grad[*v].sub(dir);
            }
        }
        if violation > 0.0 {
            let coef = 2.0 * self.weight * violation;
            for i in 0..n {
                let lambda = (self.beta * (dist[i] - fmax)).exp() / z;
                if lambda == 0.0 || dist[i] == 0.0 {
                    continue;
                }
                let (si, t) = which[i];
                let k = seg_edge[si];
                let (u, v) = edges[k];
                let y = self.m.point(i);
                let foot = pos[u].add(pos[v].sub(pos[u]).scale(t));
                let w_hat = y.sub(foot).scale(1.0 / dist[i]);
                // d(dist)/d(endpoint) via the envelope at the foot parameter.
                grad[u] = grad[u].sub(w_hat.scale(coef * lambda * (1.0 - t)));
                grad[v] = grad[v].sub(w_hat.scale(coef * lambda * t));
            }
        }
        (obj, grad, fmax)
    }
}

/// Moves each degree-3 vertex of a straight-edge tree graph to the Fermat
/// junction of its three neighbors; never increases the total length. When
/// the junction is degenerate (some angle ≥ 2π/3) the vertex merges onto the
/// wide-angle neighbor's position.
pub fn local_angle_repair(g: &SigmaGraph) -> Result<SigmaGraph> {
    let mut state = state_from_graph(g)?;
    let before = state.length();
    repair_sweep(&mut state);
    let after = state.length();
    if after > before + 1e-12 {
        return Err(Error::InvalidGraph(
            "angle repair unexpectedly increased length".into(),
        ));
    }
    // A degenerate junction lands exactly on its wide-angle neighbor; the
    // zero edge contracts away.
    loop {
        let zero = state
            .edges
            .iter()
            .position(|&(u, v)| state.pos[u].dist(state.pos[v]) == 0.0);
        match zero {
            Some(k) => state.contract_edge(k),
            None => break,
        }
    }
    state.to_sigma(&g.provenance)
}

fn repair_sweep(state: &mut TreeState) {
    for v in 0..state.pos.len() {
        if state.degree(v) != 3 {
            continue;
        }
        let nb = state.neighbors(v);
        let f = fermat_junction(state.pos[nb[0]], state.pos[nb[1]], state.pos[nb[2]]);
        let old = state.pos[v];
        let local = |p: Point, s: &TreeState| -> f64 { nb.iter().map(|&x| p.dist(s.pos[x])).sum() };
        if local(f, state) <= local(old, state) {
            state.pos[v] = f;
        }
    }
}

fn state_from_graph(g: &SigmaGraph) -> Result<TreeState> {
    // Flatten polylines: interior polyline points become degree-2 vertices.
    let mut pos: Vec<Point> = Vec::new();
    let mut idx_of_vertex = std::collections::BTreeMap::new();
    for v in &g.vertices {
        idx_of_vertex.insert(v.id, pos.len());
        pos.push(v.point());
    }
    let mut edges = Vec::new();
    for e in &g.edges {
        let pts = e.points();
        let mut prev = idx_of_vertex[&e.u];
        for p in &pts[1..pts.len() - 1] {
            let idx = pos.len();
            pos.push(*p);
            edges.push((prev, idx));
            prev = idx;
        }
        edges.push((prev, idx_of_vertex[&e.v]));
    }
    let state = TreeState { pos, edges };
    if state.edges.len() + 1 != state.pos.len() {
        return Err(Error::InvalidGraph(
            "optimizer state must be a tree (acyclic and connected)".into(),
        ));
    }
    Ok(state)
}

fn init_state(m: &PointCloud, cfg: &OptimizerConfig) -> Result<TreeState> {
    match &cfg.init {
        InitStrategy::TrimmedSteiner => {
            let g = trimmed_tree(m, cfg.r)?;
            state_from_graph(&g)
        }
        InitStrategy::UserGraph { graph } => state_from_graph(graph),
        InitStrategy::RandomTree => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let n = m.len();
            let centroid = (0..n)
                .fold(Point::new(0.0, 0.0), |acc, i| acc.add(m.point(i)))
                .scale(1.0 / n as f64);
            let spread = m.spread().max(1e-9);
            let mut jitter = |rng: &mut ChaCha8Rng| {
                Point::new(
                    rng.gen_range(-0.05..0.05) * spread,
                    rng.gen_range(-0.05..0.05) * spread,
                )
            };
            let center = centroid.add(jitter(&mut rng));
            let mut pos = vec![center];
            let mut edges = Vec::new();
            let sub = 4usize; // spoke subdivisions give the descent room to bend
            for i in 0..n {
                let tip_target = m.point(i);
                let dir = tip_target.sub(center);
                let shrink = 1.0 - (cfg.r * 0.5 / dir.norm().max(1e-12)).min(0.9);
                let tip = center
                    .add(dir.scale(shrink))
                    .add(jitter(&mut rng).scale(0.2));
                let mut prev = 0usize;
                for k in 1..=sub {
                    let t = k as f64 / sub as f64;
                    let mut p = center.add(tip.sub(center).scale(t));
                    if k < sub {
                        p = p.add(jitter(&mut rng).scale(0.05));
                    }
                    let idx = pos.len();
                    pos.push(p);
                    edges.push((prev, idx));
                    prev = idx;
                }
            }
            Ok(TreeState { pos, edges })
        }
    }
}

/// Applies at most one topology move, scanning deterministically:
/// zero-length edge deletion, then merge of near-coincident degree-3 pairs,
/// then split of a degree-4-or-more vertex into two junctions.
fn topology_move(state: &mut TreeState, scale: f64) -> bool {
    for k in 0..state.edges.len() {
        let (u, v) = state.edges[k];
        if state.pos[u].dist(state.pos[v]) <= 1e-9 * scale {
            state.contract_edge(k);
            return true;
        }
    }
    for k in 0..state.edges.len() {
        let (u, v) = state.edges[k];
        if state.degree(u) == 3
            && state.degree(v) == 3
            && state.pos[u].dist(state.pos[v]) <= 1e-6 * scale
        {
            state.contract_edge(k);
            return true;
        }
    }
    // Degree >= 4 splits: the two closest-in-angle neighbors move to a new
    // junction placed on top of the old one, so the objective is unchanged
    // until descent separates the pair into 2π/3 tripods.
    for v in 0..state.pos.len() {
        if state.degree(v) < 4 {
            continue;
        }
        let nb = state.neighbors(v);
        let mut best = (nb[0], nb[1]);
        let mut best_angle = f64::INFINITY;
        for i in 0..nb.len() {
            for j in (i + 1)..nb.len() {
                let a = state.pos[nb[i]].sub(state.pos[v]);
                let b = state.pos[nb[j]].sub(state.pos[v]);
                let th = a.cross(b).abs().atan2(a.dot(b));
                if th < best_angle {
                    best_angle = th;
                    best = (nb[i], nb[j]);
                }
            }
        }
        let new_idx = state.pos.len();
        state.pos.push(state.pos[v]);
        let mut moved = 0;
        for e in state.edges.iter_mut() {
            if moved == 2 {
                break;
            }
            if e.0 == v && (e.1 == best.0 || e.1 == best.1) {
                e.0 = new_idx;
                moved += 1;
            } else if e.1 == v && (e.0 == best.0 || e.0 == best.1) {
                e.1 = new_idx;
                moved += 1;
            }
        }
        state.edges.push((v, new_idx));
        return true;
    }
    false
}

/// Pushes the nearest Σ point toward every still-violated cloud sample until
/// the worst violation is non-positive; splits an edge when the nearest point
/// falls in its interior. One distance-field snapshot per sweep; residual
/// misplacements from pushes within a sweep wash out over later sweeps.
fn feasibility_projection(state: &mut TreeState, m: &PointCloud, r: f64) {
    for _sweep in 0..50 {
        let segs = state.segments();
        if segs.is_empty() {
            return;
        }
        let field = SigmaDistanceField::from_segments(&segs).expect("segments");
        let alive: Vec<usize> = state
            .edges
            .iter()
            .enumerate()
            .filter(|(_, (u, v))| state.pos[*u].dist(state.pos[*v]) > 0.0)
            .map(|(k, _)| k)
            .collect();
        // Collect violations against the snapshot, then apply; at most one
        // split per edge per sweep keeps the snapshot indices valid.
        let mut pending: Vec<(usize, usize, f64, Point)> = Vec::new();
        for i in 0..m.len() {
            let y = m.point(i);
            let (d, si, t) = field.nearest_detail(y);
            if d > r {
                pending.push((i, alive[si], t, y));
            }
        }
        if pending.is_empty() {
            break;
        }
        let mut touched_edges = std::collections::BTreeSet::new();
        for (_, k, t, y) in pending {
            if touched_edges.contains(&k) {
                continue;
            }
            touched_edges.insert(k);
            let (u, v) = state.edges[k];
            let target = if t <= 0.01 {
                u
            } else if t >= 0.99 {
                v
            } else {
                let foot = state.pos[u].add(state.pos[v].sub(state.pos[u]).scale(t));
                let idx = state.pos.len();
                state.pos.push(foot);
                state.edges[k] = (u, idx);
                state.edges.push((idx, v));
                idx
            };
            let w = state.pos[target];
            let pull = y.sub(w);
            let dw = pull.norm();
            if dw > 0.0 {
                let deficit = dw - r * (1.0 - 1e-9);
                if deficit > 0.0 {
                    state.pos[target] = w.add(pull.scale(deficit / dw));
                }
            }
        }
    }
}

/// Projected/penalized descent of length under the coverage constraint.
pub fn optimize(m: &PointCloud, cfg: &OptimizerConfig) -> Result<OptimizerTrace> {
    cfg.validate()?;
    if m.is_empty() {
        return Err(Error::EmptyPointCloud);
    }
    let mut state = init_state(m, cfg)?;
    let scale = m.spread().max(1e-9);
    let beta = 2.0e4 / cfg.r;
    let tol_feas = 1e-6 * cfg.r;

    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut snapshots: Vec<SigmaGraph> = Vec::new();
    let snapshot_every = (cfg.max_iters / 8).max(1);
    let phases = cfg.penalty_schedule.len();
    let per_phase = (cfg.max_iters / phases).max(1);
    let mut iter_count = 0usize;

    for &weight in &cfg.penalty_schedule {
        let objective = PenalizedObjective {
            m,
            r: cfg.r,
            weight,
            beta,
        };
        let mut alpha = cfg.step_size;
        let mut stall = 0usize;
        for _ in 0..per_phase {
            iter_count += 1;
            let (obj, fmax) = objective.value(&state.pos, &state.edges);
            iterations.push(IterationRecord {
                length: state.length(),
                energy: fmax,
                violation: (fmax - cfg.r).max(0.0),
            });

            let grad = objective.gradient(&state.pos, &state.edges);
            let gnorm2: f64 = grad.iter().map(|g| g.dot(*g)).sum();
            if gnorm2 <= 1e-24 {
                break;
            }
            // Clip the direction so no vertex moves farther than the step;
            // this keeps penalty-weight jumps from scrambling the geometry.
            let gmax = grad.iter().map(|g| g.norm()).fold(0.0f64, f64::max);
            let clip = gmax.max(1.0);
            let slope = gnorm2 / clip;
            let mut step = (2.0 * alpha).min(cfg.step_size);
            let mut accepted = false;
            let mut cur_obj = obj;
            for _ in 0..40 {
                let trial: Vec<Point> = state
                    .pos
                    .iter()
                    .zip(grad.iter())
                    .map(|(p, g)| p.sub(g.scale(step / clip)))
                    .collect();
                let (trial_obj, _) = objective.value(&trial, &state.edges);
                if trial_obj <= obj - 1e-4 * step * slope {
                    state.pos = trial;
                    cur_obj = trial_obj;
                    alpha = step;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                stall += 1;
                if stall >= 3 {
                    break;
                }
            } else {
                stall = 0;
            }

            // Re-space chain vertices so retracting ends keep edge length to
            // consume; accepted only when the objective does not increase.
            let mut trial_state = state.clone();
            trial_state.redistribute_chains();
            let (redis_obj, _) = objective.value(&trial_state.pos, &trial_state.edges);
            if redis_obj <= cur_obj + 1e-12 * (1.0 + cur_obj.abs()) {
                state = trial_state;
            }

            if cfg.topology_moves_enabled && iter_count % 50 == 0 {
                topology_move(&mut state, scale);
            }
            if iter_count % snapshot_every == 0 {
                snapshots.push(state.to_sigma(&format!("iterate {iter_count}"))?);
            }
        }
        repair_sweep(&mut state);
    }

    feasibility_projection(&mut state, m, cfg.r);

    // Final record after projection.
    let final_field = SigmaDistanceField::from_segments(&state.segments())?;
    let mut fmax = f64::NEG_INFINITY;
    for i in 0..m.len() {
        fmax = fmax.max(final_field.nearest(m.point(i)).0);
    }
    let final_violation = (fmax - cfg.r).max(0.0);
    iterations.push(IterationRecord {
        length: state.length(),
        energy: fmax,
        violation: final_violation,
    });

    let final_sigma = state.to_sigma("optimizer output")?;
    snapshots.push(final_sigma.clone());
    Ok(OptimizerTrace {
        iterations,
        final_sigma,
        converged: final_violation <= tol_feas,
        final_violation,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sigma::graph_from_segments;
    use approx::assert_abs_diff_eq;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn two_point_cloud() -> PointCloud {
        PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap()
    }

    fn equilateral_cloud() -> PointCloud {
        PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0), p(0.5, 3.0f64.sqrt() / 2.0)]).unwrap()
    }

    fn config(r: f64, seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            r,
            init: InitStrategy::RandomTree,
            max_iters: 600,
            penalty_schedule: vec![1e3, 1e4, 1e5, 1e6],
            step_size: 0.05,
            topology_moves_enabled: true,
            seed,
        }
    }

    #[test]
    fn two_point_instance_reaches_bound() {
        let m = two_point_cloud();
        let trace = optimize(&m, &config(0.2, 1)).unwrap();
        let bound = 1.0 - 2.0 * 0.2;
        let last = trace.iterations.last().unwrap();
        assert!(trace.converged, "violation {}", trace.final_violation);
        assert!(
            last.length <= bound * 1.02,
            "length {} vs bound {bound}",
            last.length
        );
        assert!(last.violation <= 1e-6);
    }

    #[test]
    fn equilateral_instance_reaches_bound() {
        let m = equilateral_cloud();
        let trace = optimize(&m, &config(0.1, 2)).unwrap();
        let bound = 3.0f64.sqrt() - 0.3;
        let last = trace.iterations.last().unwrap();
        assert!(trace.converged);
        assert!(
            last.length <= bound * 1.02,
            "length {} vs bound {bound}",
            last.length
        );
    }

    #[test]
    fn trace_is_deterministic() {
        let m = equilateral_cloud();
        let t1 = optimize(&m, &config(0.1, 42)).unwrap();
        let t2 = optimize(&m, &config(0.1, 42)).unwrap();
        assert_eq!(t1.iterations.len(), t2.iterations.len());
        for (a, b) in t1.iterations.iter().zip(t2.iterations.iter()) {
            assert_eq!(a, b);
        }
        assert_eq!(
            serde_json::to_string(&t1.final_sigma).unwrap(),
            serde_json::to_string(&t2.final_sigma).unwrap()
        );
    }

    #[test]
    fn accepted_steps_never_increase_penalized_objective() {
        // Direct check of the step-acceptance invariant on the smoothed
        // objective, which is the quantity the line search controls.
        let m = equilateral_cloud();
        let objective = PenalizedObjective {
            m: &m,
            r: 0.1,
            weight: 1e4,
            beta: 2e4 / 0.1,
        };
        let mut state = init_state(&m, &config(0.1, 4)).unwrap();
        let mut last_obj = f64::INFINITY;
        for _ in 0..120 {
            let (obj, _) = objective.value(&state.pos, &state.edges);
            assert!(obj <= last_obj + 1e-12 * (1.0 + last_obj.abs().min(1e12)));
            let grad = objective.gradient(&state.pos, &state.edges);
            let gnorm2: f64 = grad.iter().map(|g| g.dot(*g)).sum();
            if gnorm2 <= 1e-24 {
                break;
            }
            let mut step = 0.05;
            let mut new_obj = obj;
            for _ in 0..40 {
                let trial: Vec<Point> = state
                    .pos
                    .iter()
                    .zip(grad.iter())
                    .map(|(p, g)| p.sub(g.scale(step)))
                    .collect();
                let (trial_obj, _) = objective.value(&trial, &state.edges);
                if trial_obj <= obj - 1e-4 * step * gnorm2 {
                    state.pos = trial;
                    new_obj = trial_obj;
                    break;
                }
                step *= 0.5;
            }
            assert!(new_obj <= obj);
            last_obj = new_obj;
        }
    }

    #[test]
    fn local_angle_repair_moves_center_to_fermat() {
        let segs = [
            (p(0.3, 0.2), p(0.0, 1.0)),
            (p(0.3, 0.2), p(-0.8, -0.6)),
            (p(0.3, 0.2), p(0.9, -0.5)),
        ];
        let g = graph_from_segments(&segs, "displaced tripod").unwrap();
        let before = g.total_length();
        let repaired = local_angle_repair(&g).unwrap();
        let after = repaired.total_length();
        assert!(after < before);
        let f = fermat_junction(p(0.0, 1.0), p(-0.8, -0.6), p(0.9, -0.5));
        let center = repaired
            .vertices
            .iter()
            .map(|v| v.point())
            .min_by(|a, b| a.dist(f).partial_cmp(&b.dist(f)).unwrap())
            .unwrap();
        assert!(center.dist(f) <= 1e-12);
    }

    #[test]
    fn local_angle_repair_fixed_point() {
        let f = fermat_junction(p(0.0, 1.0), p(-0.8, -0.6), p(0.9, -0.5));
        let segs = [(f, p(0.0, 1.0)), (f, p(-0.8, -0.6)), (f, p(0.9, -0.5))];
        let g = graph_from_segments(&segs, "optimal tripod").unwrap();
        let repaired = local_angle_repair(&g).unwrap();
        assert_abs_diff_eq!(repaired.total_length(), g.total_length(), epsilon = 1e-12);
    }

    #[test]
    fn local_angle_repair_degenerate_merges_onto_wide_vertex() {
        // The wide-angle (>= 2π/3) configuration collapses the junction onto
        // the middle anchor.
        let a = p(-1.0, 0.0);
        let b = p(0.0, 0.0);
        let c = p((30.0f64).to_radians().cos(), (30.0f64).to_radians().sin());
        let center = p(0.1, -0.3);
        let g = graph_from_segments(&[(center, a), (center, b), (center, c)], "").unwrap();
        let repaired = local_angle_repair(&g).unwrap();
        let moved = repaired
            .vertices
            .iter()
            .map(|v| v.point())
            .min_by(|x, y| x.dist(b).partial_cmp(&y.dist(b)).unwrap())
            .unwrap();
        assert!(moved.dist(b) <= 1e-12);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 100 {
            let n_m = rng.gen_range(3..8);
            let pts: Vec<Point> = (0..n_m)
                .map(|_| p(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let m = PointCloud::finite(&pts).unwrap();
            let mut pos: Vec<Point> = (0..6)
                .map(|_| p(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let edges = vec![(0usize, 1usize), (1, 2), (2, 3), (2, 4), (4, 5)];
            // Keep vertices apart so nearest-site assignments stay stable
            // under the finite-difference bumps.
            let mut ok = true;
            for i in 0..pos.len() {
                for j in (i + 1)..pos.len() {
                    if pos[i].dist(pos[j]) < 1e-2 {
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            let objective = PenalizedObjective {
                m: &m,
                r: 0.15,
                weight: 1e3,
                beta: 80.0,
            };
            let grad = objective.gradient(&pos, &edges);
            let h = 1e-6;
            let mut max_rel: f64 = 0.0;
            for vi in 0..pos.len() {
                for axis in 0..2 {
                    let orig = pos[vi];
                    let bump = if axis == 0 { p(h, 0.0) } else { p(0.0, h) };
                    pos[vi] = orig.add(bump);
                    let (fp, _) = objective.value(&pos, &edges);
                    pos[vi] = orig.sub(bump);
                    let (fm, _) = objective.value(&pos, &edges);
                    pos[vi] = orig;
                    let fd = (fp - fm) / (2.0 * h);
                    let an = if axis == 0 { grad[vi].x } else { grad[vi].y };
                    let rel = (fd - an).abs() / (1.0 + fd.abs().max(an.abs()));
                    max_rel = max_rel.max(rel);
                }
            }
            assert!(max_rel <= 1e-5, "relative gradient error {max_rel}");
            checked += 1;
        }
    }

    #[test]
    fn topology_split_caps_degree_at_three() {
        let mut state = TreeState {
            pos: vec![
                p(0.0, 0.0),
                p(1.0, 0.0),
                p(0.0, 1.0),
                p(-1.0, 0.0),
                p(0.0, -1.0),
            ],
            edges: vec![(0, 1), (0, 2), (0, 3), (0, 4)],
        };
        assert!(topology_move(&mut state, 1.0));
        assert_eq!(state.edges.len() + 1, state.pos.len());
        let max_degree = (0..state.pos.len()).map(|v| state.degree(v)).max().unwrap();
        assert_eq!(max_degree, 3);
    }

    #[test]
    fn config_validation() {
        let mut cfg = config(0.2, 0);
        cfg.penalty_schedule = vec![1e4, 1e2];
        assert!(cfg.validate().is_err());
        let mut cfg = config(0.2, 0);
        cfg.step_size = 0.0;
        assert!(cfg.validate().is_err());
    }
}
