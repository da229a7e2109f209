//! Exact solver for 2..=6 terminals.
//!
//! Every Steiner minimal tree decomposes into full components glued at
//! terminals. The solver enumerates all such decompositions; each component
//! of size ≥ 3 is minimized over its full topologies by Melzak merging —
//! replace a terminal pair sharing a Steiner point by its equilateral third
//! point, solve the reduced problem, then walk back re-intersecting
//! circumcircles. Both equilateral sides are enumerated; a branch is valid
//! only when every reconstructed junction lands strictly between its
//! equilateral point and its anchor, on the far circumcircle arc. Topologies
//! with no valid branch fall back to coordinate descent (a Fermat-junction
//! sweep per Steiner point), whose possibly degenerate optimum is covered by
//! a different decomposition anyway.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{angle_between_rays, circumcenter, Point};

use super::topology::{enumerate_decompositions, enumerate_full_topologies, FullTopology};
use super::{fermat_junction, NodeRef, SteinerTree};

const TWO_PI_3: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Apex of the equilateral triangle erected on `[a, b]`; `sign` selects the
/// side (positive = counterclockwise from `b − a`).
fn equilateral_point(a: Point, b: Point, sign: f64) -> Point {
    a.add(b.sub(a).rotate(sign * std::f64::consts::FRAC_PI_3))
}

#[derive(Debug, Clone)]
struct MergeOp {
    s: usize,
    x: usize,
    a_pos: Point,
    b_pos: Point,
    e_pos: Point,
}

/// Melzak solve of one full topology; returns total length and the Steiner
/// positions (indexed by internal node − k), or `None` when no sign branch
/// reconstructs validly.
fn melzak_solve(points: &[Point], topo: &FullTopology) -> Option<(f64, Vec<Point>)> {
    let k = topo.k;
    let merges = k - 2;
    let scale = spread(points).max(1e-300);
    let mut best: Option<(f64, Vec<Point>)> = None;
    for signs in 0..(1u32 << merges) {
        if let Some((len, pos)) = melzak_branch(points, topo, signs, scale) {
            if best.as_ref().map_or(true, |(bl, _)| len < *bl) {
                best = Some((len, pos));
            }
        }
    }
    best
}

fn melzak_branch(
    points: &[Point],
    topo: &FullTopology,
    signs: u32,
    scale: f64,
) -> Option<(f64, Vec<Point>)> {
    let k = topo.k;
    // Mutable adjacency + known positions.
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for node in 0..(2 * k - 2) {
        adj.insert(node, topo.neighbors(node));
    }
    let mut pos: BTreeMap<usize, Point> = (0..k).map(|i| (i, points[i])).collect();
    let mut ops: Vec<MergeOp> = Vec::with_capacity(k - 2);

    for step in 0..(k - 2) {
        // Deterministic cherry: the smallest unknown internal node with at
        // least two known neighbours.
        let mut cherry = None;
        'outer: for (&s, nb) in adj.range(k..) {
            if pos.contains_key(&s) {
                continue;
            }
            let known: Vec<usize> = nb.iter().cloned().filter(|n| pos.contains_key(n)).collect();
            if known.len() >= 2 {
                let a = known[0];
                let b = known[1];
                let x = *nb.iter().find(|n| **n != a && **n != b)?;
                cherry = Some((s, a, b, x));
                break 'outer;
            }
        }
        let (s, a, b, x) = cherry?;
        let sign = if signs & (1 << step) != 0 { 1.0 } else { -1.0 };
        let e = equilateral_point(pos[&a], pos[&b], sign);
        ops.push(MergeOp {
            s,
            x,
            a_pos: pos[&a],
            b_pos: pos[&b],
            e_pos: e,
        });
        pos.insert(s, e);
        // Remove a and b; s keeps only x.
        adj.remove(&a);
        adj.remove(&b);
        adj.insert(s, vec![x]);
        for (_, nb) in adj.iter_mut() {
            nb.retain(|n| *n != a && *n != b);
        }
    }

    let remaining: Vec<usize> = adj.keys().cloned().collect();
    debug_assert_eq!(remaining.len(), 2);
    let baseline = pos[&remaining[0]].dist(pos[&remaining[1]]);

    // Walk the merges back, replacing every equilateral point by the true
    // junction on its circumcircle.
    let mut resolved = pos.clone();
    for op in ops.iter().rev() {
        let anchor = resolved[&op.x];
        let center = circumcenter(op.a_pos, op.b_pos, op.e_pos)?;
        let dir = anchor.sub(op.e_pos);
        let denom = dir.dot(dir);
        if denom == 0.0 {
            return None;
        }
        let t = -2.0 * dir.dot(op.e_pos.sub(center)) / denom;
        if !(1e-12..=1.0 - 1e-12).contains(&t) {
            return None;
        }
        let s_pos = op.e_pos.add(dir.scale(t));
        // Far arc test: from the junction the merged pair subtends 2π/3.
        let th = angle_between_rays(s_pos, op.a_pos, op.b_pos).ok()?;
        if (th - TWO_PI_3).abs() > 1e-6 {
            return None;
        }
        resolved.insert(op.s, s_pos);
    }

    let total: f64 = topo
        .edges
        .iter()
        .map(|(u, v)| resolved[u].dist(resolved[v]))
        .sum();
    if (total - baseline).abs() > 1e-9 * (1.0 + scale) {
        return None;
    }
    let steiner: Vec<Point> = (k..(2 * k - 2)).map(|s| resolved[&s]).collect();
    Some((baseline, steiner))
}

/// Coordinate descent fallback: sweeps of Fermat-junction updates, one per
/// Steiner point, until the length settles or 200 sweeps elapse.
fn coordinate_descent(points: &[Point], topo: &FullTopology) -> (f64, Vec<Point>) {
    let k = topo.k;
    let scale = spread(points).max(1e-300);
    let centroid = points
        .iter()
        .fold(Point::new(0.0, 0.0), |acc, p| acc.add(*p))
        .scale(1.0 / k as f64);
    let mut pos: BTreeMap<usize, Point> = (0..k).map(|i| (i, points[i])).collect();
    for (j, s) in (k..(2 * k - 2)).enumerate() {
        // Deterministic symmetry-breaking spread around the centroid.
        let jitter = Point::new(
            1e-3 * scale * ((j + 1) as f64).cos(),
            1e-3 * scale * ((j + 1) as f64).sin(),
        );
        pos.insert(s, centroid.add(jitter));
    }
    let total = |pos: &BTreeMap<usize, Point>| -> f64 {
        topo.edges.iter().map(|(u, v)| pos[u].dist(pos[v])).sum()
    };
    let mut last = total(&pos);
    for _ in 0..200 {
        for s in k..(2 * k - 2) {
            let nb = topo.neighbors(s);
            let f = fermat_junction(pos[&nb[0]], pos[&nb[1]], pos[&nb[2]]);
            pos.insert(s, f);
        }
        let now = total(&pos);
        if (last - now).abs() <= 1e-12 * (1.0 + now) {
            last = now;
            break;
        }
        last = now;
    }
    let steiner: Vec<Point> = (k..(2 * k - 2)).map(|s| pos[&s]).collect();
    (last, steiner)
}

fn spread(points: &[Point]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            best = best.max(points[i].dist(points[j]));
        }
    }
    best
}

/// Best full tree on one component (local terminal indices 0..k).
#[derive(Debug, Clone)]
struct ComponentSolution {
    length: f64,
    steiner: Vec<Point>,
    edges: Vec<(NodeRef, NodeRef)>,
    canon: String,
}

fn solve_full_component(points: &[Point], tie_eps: f64) -> ComponentSolution {
    let k = points.len();
    if k == 2 {
        return ComponentSolution {
            length: points[0].dist(points[1]),
            steiner: vec![],
            edges: vec![(NodeRef::Terminal(0), NodeRef::Terminal(1))],
            canon: "P".into(),
        };
    }
    let mut best: Option<ComponentSolution> = None;
    for topo in enumerate_full_topologies(k) {
        let canon = topo.canonical_id();
        let (length, steiner) = match melzak_solve(points, &topo) {
            Some(sol) => sol,
            None => coordinate_descent(points, &topo),
        };
        let edges: Vec<(NodeRef, NodeRef)> = topo
            .edges
            .iter()
            .map(|(u, v)| (local_ref(*u, k), local_ref(*v, k)))
            .collect();
        let cand = ComponentSolution {
            length,
            steiner,
            edges,
            canon,
        };
        best = Some(match best {
            None => cand,
            Some(b) => {
                if cand.length < b.length - tie_eps
                    || ((cand.length - b.length).abs() <= tie_eps && cand.canon < b.canon)
                {
                    cand
                } else {
                    b
                }
            }
        });
    }
    best.expect("k >= 3 has topologies")
}

fn local_ref(node: usize, k: usize) -> NodeRef {
    if node < k {
        NodeRef::Terminal(node)
    } else {
        NodeRef::Steiner(node - k)
    }
}

/// Exact Steiner minimal tree over 2..=6 distinct terminals.
///
/// Optimality is with respect to the enumerated family of full-component
/// decompositions, which covers every Steiner topology on the terminal set.
/// Ties between equal-length structures are broken by the lowest canonical
/// `topology_id`.
pub fn steiner_exact(terminals: &[Point]) -> Result<SteinerTree> {
    let n = terminals.len();
    if !(2..=6).contains(&n) {
        return Err(Error::TerminalCountOutOfRange(n));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if terminals[i] == terminals[j] {
                return Err(Error::DuplicateTerminals(terminals[i].x, terminals[i].y));
            }
        }
    }
    let scale = spread(terminals);
    let tie_eps = 1e-12 * (1.0 + scale);

    let mut memo: BTreeMap<u32, ComponentSolution> = BTreeMap::new();
    let solve_subset = |mask: u32, memo: &mut BTreeMap<u32, ComponentSolution>| {
        if !memo.contains_key(&mask) {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let pts: Vec<Point> = members.iter().map(|&i| terminals[i]).collect();
            memo.insert(mask, solve_full_component(&pts, tie_eps));
        }
        memo.get(&mask).unwrap().clone()
    };

    #[derive(Clone)]
    struct Candidate {
        length: f64,
        id: String,
        parts: Vec<(u32, ComponentSolution)>,
    }

    let mut best: Option<Candidate> = None;
    for decomposition in enumerate_decompositions(n) {
        let mut length = 0.0;
        let mut id_parts: Vec<String> = Vec::new();
        let mut parts = Vec::new();
        for &mask in &decomposition {
            let sol = solve_subset(mask, &mut memo);
            length += sol.length;
            let members: Vec<String> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| i.to_string())
                .collect();
            id_parts.push(format!("C({})[{}]", members.join(","), sol.canon));
            parts.push((mask, sol));
        }
        id_parts.sort();
        let cand = Candidate {
            length,
            id: id_parts.join("|"),
            parts,
        };
        best = Some(match best {
            None => cand,
            Some(b) => {
                if cand.length < b.length - tie_eps
                    || ((cand.length - b.length).abs() <= tie_eps && cand.id < b.id)
                {
                    cand
                } else {
                    b
                }
            }
        });
    }
    let winner = best.expect("decompositions are nonempty");

    // Assemble the composite tree with global indices.
    let mut steiner_points: Vec<Point> = Vec::new();
    let mut edges: Vec<(NodeRef, NodeRef)> = Vec::new();
    for (mask, sol) in &winner.parts {
        let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let offset = steiner_points.len();
        steiner_points.extend(sol.steiner.iter().cloned());
        for (u, v) in &sol.edges {
            let map = |r: &NodeRef| match r {
                NodeRef::Terminal(i) => NodeRef::Terminal(members[*i]),
                NodeRef::Steiner(j) => NodeRef::Steiner(offset + j),
            };
            edges.push((map(u), map(v)));
        }
    }
    let mut tree = SteinerTree {
        terminals: terminals.to_vec(),
        steiner_points,
        edges,
        length: 0.0,
        topology_id: winner.id,
    };
    collapse_degenerate(&mut tree, 1e-9 * (1.0 + scale));
    tree.length = tree.measured_length();
    Ok(tree)
}

/// Contracts near-zero edges incident to Steiner points (a collapsed junction
/// merges onto its neighbour) and splices out Steiner points left with
/// degree 2. The spliced structure equals a smaller topology of the same
/// length.
fn collapse_degenerate(tree: &mut SteinerTree, tol: f64) {
    loop {
        let mut contracted = false;
        'search: for idx in 0..tree.edges.len() {
            let (u, v) = tree.edges[idx];
            let keep_steiner_edge = matches!(u, NodeRef::Steiner(_)) || matches!(v, NodeRef::Steiner(_));
            if !keep_steiner_edge {
                continue;
            }
            if tree.node_point(u).dist(tree.node_point(v)) > tol {
                continue;
            }
            // Merge the Steiner end into the other node.
            let (gone, kept) = if matches!(u, NodeRef::Steiner(_)) {
                (u, v)
            } else {
                (v, u)
            };
            tree.edges.remove(idx);
            for e in tree.edges.iter_mut() {
                if e.0 == gone {
                    e.0 = kept;
                }
                if e.1 == gone {
                    e.1 = kept;
                }
            }
            remove_steiner(tree, gone);
            contracted = true;
            break 'search;
        }
        if !contracted {
            break;
        }
    }
    // Splice out degree-2 Steiner points.
    loop {
        let mut spliced = false;
        for j in 0..tree.steiner_points.len() {
            let s = NodeRef::Steiner(j);
            if tree.degree_of(s) == 2 {
                let nb = tree.neighbors(s);
                tree.edges.retain(|(a, b)| *a != s && *b != s);
                tree.edges.push((nb[0], nb[1]));
                remove_steiner(tree, s);
                spliced = true;
                break;
            }
        }
        if !spliced {
            break;
        }
    }
}

fn remove_steiner(tree: &mut SteinerTree, node: NodeRef) {
    let NodeRef::Steiner(j) = node else { return };
    tree.steiner_points.remove(j);
    for e in tree.edges.iter_mut() {
        for r in [&mut e.0, &mut e.1] {
            if let NodeRef::Steiner(m) = r {
                if *m > j {
                    *r = NodeRef::Steiner(*m - 1);
                }
            }
        }
    }
}
