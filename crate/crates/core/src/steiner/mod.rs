//! Exact small-instance Euclidean Steiner trees and related certificates.
//!
//! * [`steiner_3`] — closed-form three-point tree: either two segments through
//!   the vertex with angle ≥ 2π/3, or the Fermat junction with three 2π/3
//!   angles, located via the equilateral-point / circumcircle construction.
//! * [`steiner_exact`] — exhaustive solve for 2..=6 terminals: enumeration of
//!   full-component decompositions, each full component solved by Melzak
//!   merging with a coordinate-descent fallback.
//! * [`angles4_d`] — the shape constant `d` with `2ε − H(St(A,B,C)) = d·ε`
//!   for isoceles triangles with legs `ε`.
//! * [`RoseOfWinds`] / [`assign_rose_weights`] — six weighted rays at π/3
//!   spacing where each weight is the sum of its neighbours'; summing ray
//!   weights over the endpoints of a full tree yields zero.
//! * [`check_forest_line_inequality`] — `♯(∂S ∩ l) ≤ 2·♯(∂S \ l)` for full
//!   Steiner forests and lines `l` containing no component.

mod melzak;
mod topology;

pub use melzak::steiner_exact;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_between_rays, circumcenter, Point};
use crate::sigma::{GraphEdge, GraphVertex, SigmaGraph};

/// Angle tolerance for the structural invariants of returned trees.
pub const TOL_ANGLE_STEINER: f64 = 1e-8;

const TWO_PI_3: f64 = 2.0 * std::f64::consts::PI / 3.0;

/// Reference to a node of a [`SteinerTree`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "lowercase")]
pub enum NodeRef {
    Terminal(usize),
    Steiner(usize),
}

/// A Steiner tree over a finite terminal set: topology plus coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteinerTree {
    pub terminals: Vec<Point>,
    pub steiner_points: Vec<Point>,
    pub edges: Vec<(NodeRef, NodeRef)>,
    pub length: f64,
    /// Canonical encoding of the combinatorial structure; lowest id wins ties
    /// between equal-length topologies.
    pub topology_id: String,
}

impl SteinerTree {
    pub fn node_point(&self, node: NodeRef) -> Point {
        match node {
            NodeRef::Terminal(i) => self.terminals[i],
            NodeRef::Steiner(i) => self.steiner_points[i],
        }
    }

    pub fn degree_of(&self, node: NodeRef) -> usize {
        self.edges
            .iter()
            .map(|(u, v)| (*u == node) as usize + (*v == node) as usize)
            .sum()
    }

    pub fn neighbors(&self, node: NodeRef) -> Vec<NodeRef> {
        let mut out = Vec::new();
        for (u, v) in &self.edges {
            if *u == node {
                out.push(*v);
            } else if *v == node {
                out.push(*u);
            }
        }
        out.sort();
        out
    }

    /// A full tree has every terminal of degree exactly 1.
    pub fn is_full(&self) -> bool {
        (0..self.terminals.len()).all(|i| self.degree_of(NodeRef::Terminal(i)) == 1)
    }

    pub fn measured_length(&self) -> f64 {
        self.edges
            .iter()
            .map(|(u, v)| self.node_point(*u).dist(self.node_point(*v)))
            .sum()
    }

    /// Checks the structural invariants: tree shape, degrees ≤ 3, Steiner
    /// points of degree exactly 3 with pairwise 2π/3 angles within
    /// `tol_angle`, and the `#steiner ≤ #terminals − 2` count bound.
    pub fn validate(&self, tol_angle: f64) -> Result<()> {
        let n = self.terminals.len();
        if self.steiner_points.len() > n.saturating_sub(2) {
            return Err(Error::InvalidGraph(format!(
                "{} Steiner points exceed n-2 = {}",
                self.steiner_points.len(),
                n.saturating_sub(2)
            )));
        }
        let nodes = n + self.steiner_points.len();
        if self.edges.len() + 1 != nodes {
            return Err(Error::InvalidGraph(format!(
                "not a tree: {} edges over {} nodes",
                self.edges.len(),
                nodes
            )));
        }
        let mut dsu: Vec<usize> = (0..nodes).collect();
        fn find(dsu: &mut Vec<usize>, x: usize) -> usize {
            if dsu[x] != x {
                let r = find(dsu, dsu[x]);
                dsu[x] = r;
            }
            dsu[x]
        }
        let idx = |node: NodeRef| match node {
            NodeRef::Terminal(i) => i,
            NodeRef::Steiner(i) => n + i,
        };
        for (u, v) in &self.edges {
            let (ru, rv) = (find(&mut dsu, idx(*u)), find(&mut dsu, idx(*v)));
            if ru == rv {
                return Err(Error::InvalidGraph("cycle in Steiner tree".into()));
            }
            dsu[ru] = rv;
        }
        for i in 0..n {
            let d = self.degree_of(NodeRef::Terminal(i));
            if nodes > 1 && (d == 0 || d > 3) {
                return Err(Error::InvalidGraph(format!("terminal {i} has degree {d}")));
            }
        }
        for j in 0..self.steiner_points.len() {
            let s = NodeRef::Steiner(j);
            if self.degree_of(s) != 3 {
                return Err(Error::InvalidGraph(format!(
                    "Steiner point {j} has degree {}",
                    self.degree_of(s)
                )));
            }
            let c = self.node_point(s);
            let nb = self.neighbors(s);
            for a in 0..3 {
                for b in (a + 1)..3 {
                    let th =
                        angle_between_rays(c, self.node_point(nb[a]), self.node_point(nb[b]))?;
                    if (th - TWO_PI_3).abs() > tol_angle {
                        return Err(Error::InvalidGraph(format!(
                            "Steiner point {j} angle {th} deviates from 2π/3"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Converts the tree to an embedded graph; terminals get vertex ids
    /// `0..n`, Steiner points follow.
    pub fn to_sigma_graph(&self, provenance: &str) -> Result<SigmaGraph> {
        let n = self.terminals.len();
        let mut vertices: Vec<GraphVertex> = self
            .terminals
            .iter()
            .enumerate()
            .map(|(i, p)| GraphVertex { id: i as u64, x: p.x, y: p.y })
            .collect();
        for (j, p) in self.steiner_points.iter().enumerate() {
            vertices.push(GraphVertex {
                id: (n + j) as u64,
                x: p.x,
                y: p.y,
            });
        }
        let idx = |node: NodeRef| match node {
            NodeRef::Terminal(i) => i as u64,
            NodeRef::Steiner(j) => (n + j) as u64,
        };
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, (u, v))| {
                let pu = self.node_point(*u);
                let pv = self.node_point(*v);
                GraphEdge {
                    id: k as u64,
                    u: idx(*u),
                    v: idx(*v),
                    polyline: vec![[pu.x, pu.y], [pv.x, pv.y]],
                }
            })
            .collect();
        SigmaGraph::new(vertices, edges, provenance)
    }

    /// Splits the tree into its full components: maximal subtrees in which
    /// every terminal is a leaf. Terminals of degree ≥ 2 become shared
    /// boundary terminals of several components.
    pub fn full_components(&self) -> Vec<SteinerTree> {
        let mut assigned = vec![false; self.edges.len()];
        let mut out = Vec::new();
        for start in 0..self.edges.len() {
            if assigned[start] {
                continue;
            }
            // Grow by crossing only Steiner nodes.
            let mut comp_edges = vec![start];
            assigned[start] = true;
            let mut queue = vec![start];
            while let Some(e) = queue.pop() {
                let (u, v) = self.edges[e];
                for node in [u, v] {
                    if matches!(node, NodeRef::Steiner(_)) {
                        for (k, (a, b)) in self.edges.iter().enumerate() {
                            if !assigned[k] && (*a == node || *b == node) {
                                assigned[k] = true;
                                comp_edges.push(k);
                                queue.push(k);
                            }
                        }
                    }
                }
            }
            // Relabel into a standalone tree.
            let mut term_map: Vec<usize> = Vec::new();
            let mut steiner_map: Vec<usize> = Vec::new();
            for &k in &comp_edges {
                let (u, v) = self.edges[k];
                for node in [u, v] {
                    match node {
                        NodeRef::Terminal(i) => {
                            if !term_map.contains(&i) {
                                term_map.push(i);
                            }
                        }
                        NodeRef::Steiner(j) => {
                            if !steiner_map.contains(&j) {
                                steiner_map.push(j);
                            }
                        }
                    }
                }
            }
            term_map.sort_unstable();
            steiner_map.sort_unstable();
            let remap = |node: NodeRef| match node {
                NodeRef::Terminal(i) => {
                    NodeRef::Terminal(term_map.iter().position(|&t| t == i).unwrap())
                }
                NodeRef::Steiner(j) => {
                    NodeRef::Steiner(steiner_map.iter().position(|&s| s == j).unwrap())
                }
            };
            let edges: Vec<(NodeRef, NodeRef)> = comp_edges
                .iter()
                .map(|&k| (remap(self.edges[k].0), remap(self.edges[k].1)))
                .collect();
            let terminals: Vec<Point> = term_map.iter().map(|&i| self.terminals[i]).collect();
            let steiner_points: Vec<Point> =
                steiner_map.iter().map(|&j| self.steiner_points[j]).collect();
            let length = edges
                .iter()
                .map(|(u, v)| {
                    let p = |n: &NodeRef| match n {
                        NodeRef::Terminal(i) => terminals[*i],
                        NodeRef::Steiner(j) => steiner_points[*j],
                    };
                    p(u).dist(p(v))
                })
                .sum();
            out.push(SteinerTree {
                terminals,
                steiner_points,
                edges,
                length,
                topology_id: format!("component-of:{}", self.topology_id),
            });
        }
        out
    }
}

/// Fermat junction of three points: the point minimizing the summed distance.
/// When some triangle angle is ≥ 2π/3 (or points are collinear/coincident)
/// this is the corresponding vertex itself.
pub fn fermat_junction(a: Point, b: Point, c: Point) -> Point {
    let scale = a.dist(b).max(b.dist(c)).max(a.dist(c));
    if scale == 0.0 {
        return a;
    }
    let tol = 1e-14 * scale;
    if a.dist(b) <= tol {
        return a;
    }
    if b.dist(c) <= tol || a.dist(c) <= tol {
        return c;
    }
    let angles = [
        angle_between_rays(a, b, c),
        angle_between_rays(b, a, c),
        angle_between_rays(c, a, b),
    ];
    let pts = [a, b, c];
    for (i, th) in angles.iter().enumerate() {
        match th {
            Ok(t) if *t >= TWO_PI_3 => return pts[i],
            Err(_) => return pts[i],
            _ => {}
        }
    }
    // Equilateral point on [b, c], on the side away from a; the junction is
    // the second intersection of segment [a, e] with the circumcircle of
    // (b, c, e).
    let side = b.sub(a).cross(c.sub(a)).signum();
    let e = b.add(c.sub(b).rotate(-side * std::f64::consts::FRAC_PI_3));
    let center = match circumcenter(b, c, e) {
        Some(o) => o,
        None => return b,
    };
    let dir = a.sub(e);
    let denom = dir.dot(dir);
    if denom == 0.0 {
        return b;
    }
    let t = -2.0 * dir.dot(e.sub(center)) / denom;
    e.add(dir.scale(t))
}

/// Exact three-point Steiner tree.
pub fn steiner_3(a: Point, b: Point, c: Point) -> Result<SteinerTree> {
    if a == b || b == c || a == c {
        return Err(Error::DuplicateTerminals(a.x, a.y));
    }
    let angles = [
        angle_between_rays(a, b, c)?,
        angle_between_rays(b, a, c)?,
        angle_between_rays(c, a, b)?,
    ];
    let (imax, &amax) = angles
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
        .unwrap();
    if amax >= TWO_PI_3 {
        // Two segments through the wide-angle vertex.
        let (mid, others) = match imax {
            0 => (0, [1usize, 2usize]),
            1 => (1, [0, 2]),
            _ => (2, [0, 1]),
        };
        let pts = [a, b, c];
        let length = pts[mid].dist(pts[others[0]]) + pts[mid].dist(pts[others[1]]);
        return Ok(SteinerTree {
            terminals: vec![a, b, c],
            steiner_points: vec![],
            edges: vec![
                (NodeRef::Terminal(others[0]), NodeRef::Terminal(mid)),
                (NodeRef::Terminal(mid), NodeRef::Terminal(others[1])),
            ],
            length,
            topology_id: format!("path({mid})"),
        });
    }
    let f = fermat_junction(a, b, c);
    let length = f.dist(a) + f.dist(b) + f.dist(c);
    let tree = SteinerTree {
        terminals: vec![a, b, c],
        steiner_points: vec![f],
        edges: vec![
            (NodeRef::Terminal(0), NodeRef::Steiner(0)),
            (NodeRef::Terminal(1), NodeRef::Steiner(0)),
            (NodeRef::Terminal(2), NodeRef::Steiner(0)),
        ],
        length,
        topology_id: "fermat".into(),
    };
    debug_assert!(tree.validate(TOL_ANGLE_STEINER).is_ok());
    Ok(tree)
}

/// The constant `d` of the isoceles length-gain relation: for a triangle with
/// `|AB| = |BC| = ε` and all angles below 2π/3, `2ε − H(St(A,B,C)) = d·ε`
/// with `d` depending only on the angles. Computed at ε = 1; the two base
/// angles must be equal.
pub fn angles4_d(alpha: f64, beta: f64) -> Result<f64> {
    if (alpha - beta).abs() > 1e-12 {
        return Err(Error::HypothesisViolated(format!(
            "isoceles parametrization requires alpha = beta, got {alpha} vs {beta}"
        )));
    }
    let apex = std::f64::consts::PI - alpha - beta;
    if !(apex > 0.0) {
        return Err(Error::HypothesisViolated(format!(
            "degenerate apex angle {apex}"
        )));
    }
    // The hypothesis requires strictly acute-of-2π/3 angles; treat the
    // boundary as excluded up to rounding of π − 2·alpha.
    if apex >= TWO_PI_3 - 1e-12 || alpha >= TWO_PI_3 - 1e-12 {
        return Err(Error::HypothesisViolated(format!(
            "all angles must be strictly below 2π/3 (apex = {apex})"
        )));
    }
    let b = Point::new(0.0, 0.0);
    let a = Point::new(1.0, 0.0);
    let c = Point::new(apex.cos(), apex.sin());
    let tree = steiner_3(a, b, c)?;
    Ok(2.0 - tree.length)
}

/// Six rays at π/3 spacing with weights in which every weight equals the sum
/// of its two neighbours', exactly as stored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoseOfWinds {
    pub base_angle: f64,
    pub weights: [f64; 6],
}

impl RoseOfWinds {
    pub fn new(base_angle: f64, weights: [f64; 6]) -> Result<Self> {
        for k in 0..6 {
            let left = weights[(k + 5) % 6];
            let right = weights[(k + 1) % 6];
            if weights[k] != left + right {
                return Err(Error::InvalidRose(format!(
                    "weight {k} = {} is not the sum of its neighbours {left} + {right}",
                    weights[k]
                )));
            }
        }
        // Consequence of the neighbour-sum property, asserted independently.
        for k in 0..3 {
            if weights[k] + weights[k + 3] != 0.0 {
                return Err(Error::InvalidRose(format!(
                    "opposite rays {k} and {} do not sum to zero",
                    k + 3
                )));
            }
        }
        Ok(RoseOfWinds { base_angle, weights })
    }

    pub fn ray_angle(&self, k: usize) -> f64 {
        self.base_angle + (k as f64) * std::f64::consts::FRAC_PI_3
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    let m = theta.rem_euclid(tau);
    if m > std::f64::consts::PI {
        m - tau
    } else {
        m
    }
}

/// Assigns each endpoint of a full tree the weight of the rose ray co-directed
/// with the edge entering it, and returns the total. For any rose aligned with
/// the tree's three edge directions the total is zero.
pub fn assign_rose_weights(tree: &SteinerTree, rose: &RoseOfWinds, tol_angle: f64) -> Result<f64> {
    if !tree.is_full() {
        return Err(Error::HypothesisViolated(
            "rose weights are defined for full Steiner trees only".into(),
        ));
    }
    // Every edge must be parallel to one of the rose's three lines.
    for (u, v) in &tree.edges {
        let d = tree.node_point(*v).sub(tree.node_point(*u));
        let dev = (0..6)
            .map(|k| wrap_angle(d.angle() - rose.ray_angle(k)).abs())
            .fold(f64::INFINITY, f64::min);
        if dev > tol_angle {
            return Err(Error::EdgeNotAligned {
                terminal: usize::MAX,
                deviation: dev,
            });
        }
    }
    let mut sum = 0.0;
    for i in 0..tree.terminals.len() {
        let t = NodeRef::Terminal(i);
        let nb = tree.neighbors(t);
        let dir = tree.node_point(t).sub(tree.node_point(nb[0]));
        let (k, dev) = (0..6)
            .map(|k| (k, wrap_angle(dir.angle() - rose.ray_angle(k)).abs()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if dev > tol_angle {
            return Err(Error::EdgeNotAligned {
                terminal: i,
                deviation: dev,
            });
        }
        sum += rose.weights[k];
    }
    Ok(sum)
}

/// Result of the forest/line endpoint count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LineInequalityReport {
    pub on_line: usize,
    pub off_line: usize,
    pub holds: bool,
}

/// Counts endpoint (degree-1) vertices of a full Steiner forest on and off a
/// line and checks `♯(∂S ∩ l) ≤ 2·♯(∂S \ l)`. Errors when a component lies
/// entirely in the line.
pub fn check_forest_line_inequality(
    forest: &[SteinerTree],
    line: (Point, Point),
    tol: f64,
) -> Result<LineInequalityReport> {
    let dir = line
        .1
        .sub(line.0)
        .unit()
        .ok_or_else(|| Error::CoincidentPoints("line through coincident points".into()))?;
    let dist_to_line = |p: Point| dir.cross(p.sub(line.0)).abs();

    let mut endpoints: Vec<Point> = Vec::new();
    for (ci, tree) in forest.iter().enumerate() {
        let mut all_nodes: Vec<Point> = tree.terminals.clone();
        all_nodes.extend(tree.steiner_points.iter().cloned());
        if all_nodes.iter().all(|p| dist_to_line(*p) <= tol) {
            return Err(Error::ComponentOnLine(ci));
        }
        for i in 0..tree.terminals.len() {
            if tree.degree_of(NodeRef::Terminal(i)) == 1 {
                let p = tree.terminals[i];
                if !endpoints.contains(&p) {
                    endpoints.push(p);
                }
            }
        }
    }
    let on_line = endpoints.iter().filter(|p| dist_to_line(**p) <= tol).count();
    let off_line = endpoints.len() - on_line;
    Ok(LineInequalityReport {
        on_line,
        off_line,
        holds: on_line <= 2 * off_line,
    })
}
