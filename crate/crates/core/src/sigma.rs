//! Candidate sets Σ as embedded planar graphs with polyline edges.
//!
//! A [`SigmaGraph`] is immutable after construction; every query is read-only.
//! Mutation happens only by building a new graph. Circular pieces (e.g. the
//! horseshoe arc) are represented as fine polylines produced by
//! [`crate::geometry::sample_arc`].

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_point_segment, Point, Segment};

/// Default embedding tolerance as a fraction of the graph diameter.
pub const TAU_EMBED_REL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphVertex {
    pub id: u64,
    pub x: f64,
    pub y: f64,
}

impl GraphVertex {
    pub fn point(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphEdge {
    pub id: u64,
    pub u: u64,
    pub v: u64,
    /// Chain of points from the `u` vertex to the `v` vertex.
    pub polyline: Vec<[f64; 2]>,
}

impl GraphEdge {
    pub fn points(&self) -> Vec<Point> {
        self.polyline.iter().map(|p| Point::new(p[0], p[1])).collect()
    }

    pub fn length(&self) -> f64 {
        self.polyline
            .windows(2)
            .map(|w| Point::new(w[0][0], w[0][1]).dist(Point::new(w[1][0], w[1][1])))
            .sum()
    }
}

/// An embedded planar graph modelling a candidate set Σ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SigmaGraph {
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    /// Free-form provenance note; runtime-only, not part of the JSON schema.
    #[serde(skip)]
    pub provenance: String,
}

/// Discrete order of a vertex: combinatorial degree plus the stabilized count
/// of circle/graph intersections over a shrinking radius ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderReport {
    pub vertex: u64,
    pub ord: usize,
    pub ordball: usize,
    pub radius_used: f64,
    /// True when every tested radius produced the same count.
    pub stabilized: bool,
    pub counts: Vec<usize>,
}

impl SigmaGraph {
    /// Builds a graph, checking structural invariants that are cheap to verify:
    /// finite coordinates, unique ids, known endpoints, and polylines whose
    /// first/last points equal their endpoint vertices' coordinates exactly.
    ///
    /// Embedding (pairwise interior disjointness) is checked on demand by
    /// [`SigmaGraph::check_embedding`] because optimizer iterates may violate
    /// it transiently.
    pub fn new(vertices: Vec<GraphVertex>, edges: Vec<GraphEdge>, provenance: &str) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("graph must have at least one vertex".into()));
        }
        let mut coord_of = BTreeMap::new();
        for v in &vertices {
            if !v.point().is_finite() {
                return Err(Error::NonFiniteCoordinate(v.x, v.y));
            }
            if coord_of.insert(v.id, v.point()).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate vertex id {}", v.id)));
            }
        }
        let mut edge_ids = BTreeSet::new();
        for e in &edges {
            if !edge_ids.insert(e.id) {
                return Err(Error::InvalidGraph(format!("duplicate edge id {}", e.id)));
            }
            let pu = *coord_of.get(&e.u).ok_or(Error::UnknownVertex(e.u))?;
            let pv = *coord_of.get(&e.v).ok_or(Error::UnknownVertex(e.v))?;
            if e.polyline.len() < 2 {
                return Err(Error::InvalidGraph(format!(
                    "edge {} polyline must have at least two points",
                    e.id
                )));
            }
            for p in &e.polyline {
                if !p[0].is_finite() || !p[1].is_finite() {
                    return Err(Error::NonFiniteCoordinate(p[0], p[1]));
                }
            }
            let first = Point::new(e.polyline[0][0], e.polyline[0][1]);
            let last = Point::new(
                e.polyline[e.polyline.len() - 1][0],
                e.polyline[e.polyline.len() - 1][1],
            );
            if first != pu || last != pv {
                return Err(Error::InvalidGraph(format!(
                    "edge {} polyline does not start/end at its endpoint vertices",
                    e.id
                )));
            }
            for w in e.polyline.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::InvalidGraph(format!(
                        "edge {} polyline contains a zero-length chord",
                        e.id
                    )));
                }
            }
        }
        Ok(SigmaGraph {
            vertices,
            edges,
            provenance: provenance.to_string(),
        })
    }

    /// Single-point graph.
    pub fn single_point(p: Point) -> Self {
        SigmaGraph {
            vertices: vec![GraphVertex { id: 0, x: p.x, y: p.y }],
            edges: Vec::new(),
            provenance: "single point".into(),
        }
    }

    pub fn vertex_point(&self, id: u64) -> Result<Point> {
        self.vertices
            .iter()
            .find(|v| v.id == id)
            .map(|v| v.point())
            .ok_or(Error::UnknownVertex(id))
    }

    pub fn degree(&self, id: u64) -> usize {
        self.edges
            .iter()
            .map(|e| (e.u == id) as usize + (e.v == id) as usize)
            .sum()
    }

    /// All polyline chords as segments, skipping exact duplicates of points.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::new();
        for e in &self.edges {
            let pts = e.points();
            for w in pts.windows(2) {
                if let Ok(s) = Segment::new(w[0], w[1]) {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Vertices that belong to no edge; they still contribute to distance
    /// queries as point sites.
    pub fn isolated_vertices(&self) -> Vec<Point> {
        self.vertices
            .iter()
            .filter(|v| self.degree(v.id) == 0)
            .map(|v| v.point())
            .collect()
    }

    /// Sum of polyline chord lengths over all edges.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length()).sum()
    }

    /// Bounding-box diagonal; 0 for a single point.
    pub fn diameter(&self) -> f64 {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut feed = |p: Point| {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        };
        for v in &self.vertices {
            feed(v.point());
        }
        for e in &self.edges {
            for p in &e.polyline {
                feed(Point::new(p[0], p[1]));
            }
        }
        if min.x > max.x {
            return 0.0;
        }
        min.dist(max)
    }

    /// True iff the vertex/edge graph forms a single component.
    pub fn is_connected(&self) -> bool {
        if self.vertices.is_empty() {
            return false;
        }
        let mut dsu = Dsu::new(&self.vertices);
        for e in &self.edges {
            dsu.union(e.u, e.v);
        }
        let root = dsu.find(self.vertices[0].id);
        self.vertices.iter().all(|v| dsu.find(v.id) == root)
    }

    /// True iff the graph contains a cycle, counting self-loops and parallel
    /// edges (geometric closure of polylines).
    pub fn has_cycle(&self) -> bool {
        let mut dsu = Dsu::new(&self.vertices);
        for e in &self.edges {
            if e.u == e.v || !dsu.union(e.u, e.v) {
                return true;
            }
        }
        false
    }

    /// Embedding tolerance: `TAU_EMBED_REL` × diameter.
    pub fn tau_embed(&self) -> f64 {
        TAU_EMBED_REL * self.diameter()
    }

    /// Checks that chords from different polylines (and non-adjacent chords of
    /// the same polyline) stay at least `tau` apart; pairs sharing an endpoint
    /// are exempt since legitimate tangency at vertices is allowed.
    pub fn check_embedding(&self, tau: Option<f64>) -> Result<()> {
        let tau = tau.unwrap_or_else(|| self.tau_embed());
        let mut chords: Vec<(u64, usize, Segment)> = Vec::new();
        for e in &self.edges {
            let pts = e.points();
            for (i, w) in pts.windows(2).enumerate() {
                chords.push((e.id, i, Segment::new(w[0], w[1])?));
            }
        }
        for i in 0..chords.len() {
            for j in (i + 1)..chords.len() {
                let (ei, ii, si) = &chords[i];
                let (ej, ij, sj) = &chords[j];
                if ei == ej && ii.abs_diff(*ij) <= 1 {
                    continue; // consecutive chords of one polyline share a joint
                }
                if shares_endpoint(si, sj) {
                    continue;
                }
                if segment_gap(si, sj) < tau {
                    return Err(Error::InvalidGraph(format!(
                        "edges {ei}/{ej} approach within embedding tolerance {tau}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Returns a copy with every chord longer than `max_step` subdivided into
    /// equal pieces of length at most `max_step`.
    pub fn densified(&self, max_step: f64) -> SigmaGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let pts = e.points();
                let mut out = vec![pts[0]];
                for w in pts.windows(2) {
                    let len = w[0].dist(w[1]);
                    let parts = (len / max_step).ceil().max(1.0) as usize;
                    for k in 1..=parts {
                        let t = k as f64 / parts as f64;
                        let p = w[0].add(w[1].sub(w[0]).scale(t));
                        out.push(if k == parts { w[1] } else { p });
                    }
                }
                GraphEdge {
                    id: e.id,
                    u: e.u,
                    v: e.v,
                    polyline: out.iter().map(|p| [p.x, p.y]).collect(),
                }
            })
            .collect();
        SigmaGraph {
            vertices: self.vertices.clone(),
            edges,
            provenance: self.provenance.clone(),
        }
    }

    /// Discrete order of vertex `v`: `ord` is the combinatorial degree and
    /// `ordball` the modal count of intersections of `∂B_ρ(v)` with the graph
    /// over the given radius ladder.
    pub fn ordball_at(&self, v: u64, radii: &[f64]) -> Result<OrderReport> {
        let center = self.vertex_point(v)?;
        let limit = self.ordball_radius_limit(v)?;
        for &r in radii {
            if !(r > 0.0) {
                return Err(Error::RadiusTooLarge {
                    vertex: v,
                    radius: r,
                    limit,
                });
            }
            if r >= limit {
                return Err(Error::RadiusTooLarge {
                    vertex: v,
                    radius: r,
                    limit,
                });
            }
        }
        let mut counts = Vec::with_capacity(radii.len());
        for &r in radii {
            counts.push(self.circle_crossings(center, r));
        }
        let mut freq: BTreeMap<usize, usize> = BTreeMap::new();
        for &c in &counts {
            *freq.entry(c).or_insert(0) += 1;
        }
        let ordball = freq
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(k, _)| *k)
            .unwrap_or(0);
        let stabilized = counts.windows(2).all(|w| w[0] == w[1]);
        Ok(OrderReport {
            vertex: v,
            ord: self.degree(v),
            ordball,
            radius_used: radii.iter().cloned().fold(0.0f64, f64::max),
            stabilized,
            counts,
        })
    }

    /// Largest admissible ordball radius at `v`: half the distance to the
    /// nearest non-incident chord, capped by the shortest incident polyline.
    pub fn ordball_radius_limit(&self, v: u64) -> Result<f64> {
        let center = self.vertex_point(v)?;
        let mut limit = f64::INFINITY;
        for e in &self.edges {
            let pts = e.points();
            if e.u == v || e.v == v {
                limit = limit.min(e.length());
            } else {
                for w in pts.windows(2) {
                    if let Ok(s) = Segment::new(w[0], w[1]) {
                        limit = limit.min(0.5 * dist_point_segment(center, &s));
                    }
                }
            }
        }
        Ok(limit)
    }

    /// Number of intersection points of the circle `∂B_r(center)` with the
    /// union of all chords, deduplicated at shared joints.
    fn circle_crossings(&self, center: Point, r: f64) -> usize {
        let mut hits: Vec<Point> = Vec::new();
        let tol = 1e-9 * r;
        for e in &self.edges {
            let pts = e.points();
            for w in pts.windows(2) {
                for p in circle_segment_intersections(center, r, w[0], w[1]) {
                    if !hits.iter().any(|q| q.dist(p) <= tol) {
                        hits.push(p);
                    }
                }
            }
        }
        hits.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("SigmaGraph serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: SigmaGraph = serde_json::from_str(text)?;
        SigmaGraph::new(g.vertices, g.edges, "")
    }
}

fn shares_endpoint(a: &Segment, b: &Segment) -> bool {
    a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b
}

/// Minimal distance between two segments.
pub fn segment_gap(a: &Segment, b: &Segment) -> f64 {
    if segments_properly_intersect(a, b) {
        return 0.0;
    }
    dist_point_segment(a.a, b)
        .min(dist_point_segment(a.b, b))
        .min(dist_point_segment(b.a, a))
        .min(dist_point_segment(b.b, a))
}

fn segments_properly_intersect(a: &Segment, b: &Segment) -> bool {
    let d1 = b.b.sub(b.a).cross(a.a.sub(b.a));
    let d2 = b.b.sub(b.a).cross(a.b.sub(b.a));
    let d3 = a.b.sub(a.a).cross(b.a.sub(a.a));
    let d4 = a.b.sub(a.a).cross(b.b.sub(a.a));
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Intersection points of a circle with a closed segment, with parameters
/// clamped to `[0, 1]` inclusive.
fn circle_segment_intersections(center: Point, r: f64, a: Point, b: Point) -> Vec<Point> {
    let e = b.sub(a);
    let f = a.sub(center);
    let qa = e.dot(e);
    let qb = 2.0 * f.dot(e);
    let qc = f.dot(f) - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 || qa == 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let mut out = Vec::new();
    for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
        if (-1e-12..=1.0 + 1e-12).contains(&t) {
            let p = a.add(e.scale(t.clamp(0.0, 1.0)));
            if !out.iter().any(|q: &Point| q.dist(p) <= 1e-12 * r) {
                out.push(p);
            }
        }
    }
    out
}

struct Dsu {
    parent: BTreeMap<u64, u64>,
}

impl Dsu {
    fn new(vertices: &[GraphVertex]) -> Self {
        Dsu {
            parent: vertices.iter().map(|v| (v.id, v.id)).collect(),
        }
    }

    fn find(&mut self, x: u64) -> u64 {
        let p = self.parent[&x];
        if p == x {
            return x;
        }
        let root = self.find(p);
        self.parent.insert(x, root);
        root
    }

    /// Returns false when `a` and `b` were already connected.
    fn union(&mut self, a: u64, b: u64) -> bool {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return false;
        }
        self.parent.insert(ra, rb);
        true
    }
}

/// Builds a graph from straight segments given as vertex coordinates; vertex
/// identity is by exact coordinate equality, ids assigned in first-seen order.
pub fn graph_from_segments(segments: &[(Point, Point)], provenance: &str) -> Result<SigmaGraph> {
    let mut ids: Vec<(Point, u64)> = Vec::new();
    let id_of = |p: Point, ids: &mut Vec<(Point, u64)>| -> u64 {
        if let Some((_, id)) = ids.iter().find(|(q, _)| *q == p) {
            return *id;
        }
        let id = ids.len() as u64;
        ids.push((p, id));
        id
    };
    let mut edges = Vec::new();
    for (k, (a, b)) in segments.iter().enumerate() {
        let u = id_of(*a, &mut ids);
        let v = id_of(*b, &mut ids);
        edges.push(GraphEdge {
            id: k as u64,
            u,
            v,
            polyline: vec![[a.x, a.y], [b.x, b.y]],
        });
    }
    let vertices = ids
        .into_iter()
        .map(|(p, id)| GraphVertex { id, x: p.x, y: p.y })
        .collect();
    SigmaGraph::new(vertices, edges, provenance)
}

/// Builds a single-edge graph from one polyline.
pub fn graph_from_polyline(points: &[Point], provenance: &str) -> Result<SigmaGraph> {
    if points.len() < 2 {
        return Err(Error::InvalidGraph("polyline needs at least two points".into()));
    }
    let first = points[0];
    let last = points[points.len() - 1];
    let vertices = vec![
        GraphVertex { id: 0, x: first.x, y: first.y },
        GraphVertex { id: 1, x: last.x, y: last.y },
    ];
    let edges = vec![GraphEdge {
        id: 0,
        u: 0,
        v: 1,
        polyline: points.iter().map(|p| [p.x, p.y]).collect(),
    }];
    SigmaGraph::new(vertices, edges, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn unit_segment() -> SigmaGraph {
        graph_from_segments(&[(p(0.0, 0.0), p(1.0, 0.0))], "unit segment").unwrap()
    }

    fn tripod() -> SigmaGraph {
        let c = p(0.0, 0.0);
        let arm = |t: f64| p(t.cos(), t.sin());
        graph_from_segments(
            &[
                (c, arm(PI / 2.0)),
                (c, arm(PI / 2.0 + 2.0 * PI / 3.0)),
                (c, arm(PI / 2.0 - 2.0 * PI / 3.0)),
            ],
            "tripod",
        )
        .unwrap()
    }

    #[test]
    fn single_edge_length() {
        assert_abs_diff_eq!(unit_segment().total_length(), 1.0);
    }

    #[test]
    fn tripod_length() {
        assert_abs_diff_eq!(tripod().total_length(), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn polygon_circle_length() {
        let n = 1000;
        let pts: Vec<Point> = (0..=n)
            .map(|k| {
                let t = 2.0 * PI * (k % n) as f64 / n as f64;
                p(t.cos(), t.sin())
            })
            .collect();
        let g = graph_from_polyline(&pts, "unit circle 1000-gon").unwrap();
        let expected = 2.0 * n as f64 * (PI / n as f64).sin();
        assert_abs_diff_eq!(g.total_length(), expected, epsilon = 1e-12);
    }

    #[test]
    fn disjoint_segments_not_connected() {
        let g = graph_from_segments(
            &[(p(0.0, 0.0), p(1.0, 0.0)), (p(0.0, 1.0), p(1.0, 1.0))],
            "",
        )
        .unwrap();
        assert!(!g.is_connected());
        assert!(!g.has_cycle());
    }

    #[test]
    fn tripod_connected_acyclic() {
        let g = tripod();
        assert!(g.is_connected());
        assert!(!g.has_cycle());
    }

    #[test]
    fn square_loop_has_cycle() {
        let g = graph_from_segments(
            &[
                (p(0.0, 0.0), p(1.0, 0.0)),
                (p(1.0, 0.0), p(1.0, 1.0)),
                (p(1.0, 1.0), p(0.0, 1.0)),
                (p(0.0, 1.0), p(0.0, 0.0)),
            ],
            "square",
        )
        .unwrap();
        assert!(g.has_cycle());
        assert!(g.is_connected());
    }

    #[test]
    fn random_spanning_tree_connected_union_find_oracle() {
        // Build a random 50-vertex spanning tree; verify with an independent
        // union-find oracle over the emitted segments.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<Point> = (0..50)
            .map(|_| p(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)))
            .collect();
        let mut segs = Vec::new();
        for i in 1..pts.len() {
            let j = rng.gen_range(0..i);
            segs.push((pts[i], pts[j]));
        }
        let g = graph_from_segments(&segs, "random tree").unwrap();
        assert!(g.is_connected());
        assert!(!g.has_cycle());

        // oracle
        let mut parent: Vec<usize> = (0..pts.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for (a, b) in &segs {
            let ia = pts.iter().position(|q| q == a).unwrap();
            let ib = pts.iter().position(|q| q == b).unwrap();
            let (ra, rb) = (find(&mut parent, ia), find(&mut parent, ib));
            parent[ra] = rb;
        }
        let r0 = find(&mut parent, 0);
        assert!((0..pts.len()).all(|i| find(&mut parent, i) == r0));
    }

    #[test]
    fn tree_plus_chord_has_cycle() {
        // Oracle: for a connected graph, #edges >= #vertices implies a cycle.
        let g = graph_from_segments(
            &[
                (p(0.0, 0.0), p(1.0, 0.0)),
                (p(1.0, 0.0), p(2.0, 0.5)),
                (p(1.0, 0.0), p(1.0, 1.0)),
                (p(0.0, 0.0), p(1.0, 1.0)),
            ],
            "tree plus chord",
        )
        .unwrap();
        assert!(g.edges.len() >= g.vertices.len());
        assert!(g.has_cycle());
    }

    #[test]
    fn ordball_midpoint_of_segment() {
        let g = graph_from_segments(&[(p(0.0, 0.0), p(0.5, 0.0)), (p(0.5, 0.0), p(1.0, 0.0))], "")
            .unwrap();
        let mid = g.vertices.iter().find(|v| v.x == 0.5).unwrap().id;
        let rep = g.ordball_at(mid, &[0.2, 0.1, 0.05, 0.025]).unwrap();
        assert_eq!(rep.ord, 2);
        assert_eq!(rep.ordball, 2);
        assert!(rep.stabilized);
    }

    #[test]
    fn ordball_endpoint_of_segment() {
        let g = unit_segment();
        let rep = g.ordball_at(0, &[0.4, 0.2, 0.1, 0.05]).unwrap();
        assert_eq!(rep.ord, 1);
        assert_eq!(rep.ordball, 1);
    }

    #[test]
    fn ordball_tripod_center() {
        let g = tripod();
        let center = g
            .vertices
            .iter()
            .find(|v| v.point().norm() < 1e-12)
            .unwrap()
            .id;
        let rep = g.ordball_at(center, &[0.8, 0.4, 0.2, 0.1]).unwrap();
        assert_eq!(rep.ord, 3);
        assert_eq!(rep.ordball, 3);
        assert!(rep.ordball >= rep.ord - 0); // ordball >= ord
    }

    #[test]
    fn ordball_radius_too_large() {
        let g = tripod();
        let center = g
            .vertices
            .iter()
            .find(|v| v.point().norm() < 1e-12)
            .unwrap()
            .id;
        assert!(matches!(
            g.ordball_at(center, &[1.5]),
            Err(Error::RadiusTooLarge { .. })
        ));
    }

    #[test]
    fn json_schema_shape() {
        let g = unit_segment();
        let text = g.to_json();
        assert!(text.contains("\"vertices\""));
        assert!(text.contains("\"polyline\""));
        let back = SigmaGraph::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn json_rejects_mismatched_polyline() {
        let text = r#"{"vertices":[{"id":0,"x":0.0,"y":0.0},{"id":1,"x":1.0,"y":0.0}],
                       "edges":[{"id":0,"u":0,"v":1,"polyline":[[0.0,0.0],[0.5,0.5]]}]}"#;
        assert!(SigmaGraph::from_json(text).is_err());
    }

    #[test]
    fn embedding_detects_crossing() {
        let g = graph_from_segments(
            &[(p(0.0, 0.0), p(1.0, 1.0)), (p(0.0, 1.0), p(1.0, 0.0))],
            "cross",
        )
        .unwrap();
        assert!(g.check_embedding(None).is_err());
        assert!(tripod().check_embedding(None).is_ok());
    }

    #[test]
    fn densified_preserves_length_and_endpoints() {
        let g = unit_segment();
        let d = g.densified(0.07);
        assert_abs_diff_eq!(d.total_length(), 1.0, epsilon = 1e-12);
        assert!(d.edges[0].polyline.len() >= 15);
        assert_eq!(d.edges[0].polyline[0], [0.0, 0.0]);
        assert_eq!(*d.edges[0].polyline.last().unwrap(), [1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn length_rigid_motion_invariant(
            theta in 0.0..(2.0 * PI),
            tx in -3.0..3.0f64,
            ty in -3.0..3.0f64,
            seed in 0u64..500,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Point> = (0..8)
                .map(|_| p(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let mut segs = Vec::new();
            for i in 1..pts.len() {
                let j = rng.gen_range(0..i);
                if pts[i].dist(pts[j]) > 1e-9 {
                    segs.push((pts[i], pts[j]));
                }
            }
            prop_assume!(!segs.is_empty());
            let g = graph_from_segments(&segs, "").unwrap();
            let mv = |q: Point| q.rotate(theta).add(p(tx, ty));
            let moved: Vec<(Point, Point)> = segs.iter().map(|(a, b)| (mv(*a), mv(*b))).collect();
            let g2 = graph_from_segments(&moved, "").unwrap();
            let l1 = g.total_length();
            let l2 = g2.total_length();
            prop_assert!((l1 - l2).abs() <= 1e-12 * (1.0 + l1));
        }

        #[test]
        fn length_additive_over_edge_disjoint_subgraphs(seed in 0u64..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pts: Vec<Point> = (0..10)
                .map(|_| p(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let mut segs = Vec::new();
            for i in 1..pts.len() {
                let j = rng.gen_range(0..i);
                if pts[i].dist(pts[j]) > 1e-9 {
                    segs.push((pts[i], pts[j]));
                }
            }
            prop_assume!(segs.len() >= 2);
            let split = segs.len() / 2;
            let g = graph_from_segments(&segs, "").unwrap();
            let g1 = graph_from_segments(&segs[..split], "").unwrap();
            let g2 = graph_from_segments(&segs[split..], "").unwrap();
            let total = g.total_length();
            prop_assert!((total - g1.total_length() - g2.total_length()).abs() <= 1e-12 * (1.0 + total));
        }
    }
}
