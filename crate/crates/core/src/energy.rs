//! The maximal-distance functional `F_M(Σ) = max_{y∈M} dist(y, Σ)`, coverage
//! checking, and detection of energetic points with their witnesses.
//!
//! An energetic point `x ∈ Σ` carries a witness `y ∈ M` with `|x−y| = r` whose
//! open `r`-ball misses Σ; both conditions are tested up to the tolerance
//! `eta` and the attained values are stored in the witness.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist_point_segment, Point, Segment};
use crate::sigma::SigmaGraph;

/// Default witness tolerance as a fraction of `r`.
pub const ETA_REL: f64 = 1e-6;

/// A finite sample of the compact set `M`, with sampling density `delta`:
/// every point of the intended compact is within `delta` of some sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointCloud {
    pub delta: f64,
    pub points: Vec<[f64; 2]>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>, delta: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPointCloud);
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidGraph(format!("delta must be >= 0, got {delta}")));
        }
        for p in &points {
            if !p.is_finite() {
                return Err(Error::NonFiniteCoordinate(p.x, p.y));
            }
        }
        Ok(PointCloud {
            delta,
            points: points.iter().map(|p| [p.x, p.y]).collect(),
        })
    }

    /// Exact finite set (`delta = 0`).
    pub fn finite(points: &[Point]) -> Result<Self> {
        Self::new(points.to_vec(), 0.0)
    }

    /// Uniform sample of a circle; `delta` is the worst-case chordal distance
    /// from the continuum circle to the sample.
    pub fn circle(center: Point, radius: f64, n: usize, phase: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPointCloud);
        }
        let pts: Vec<Point> = (0..n)
            .map(|k| {
                let t = phase + 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                Point::new(center.x + radius * t.cos(), center.y + radius * t.sin())
            })
            .collect();
        let delta = 2.0 * radius * (std::f64::consts::PI / (2.0 * n as f64)).sin();
        Self::new(pts, delta)
    }

    /// Uniform sample of a segment, endpoints included.
    pub fn segment(a: Point, b: Point, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewSamples { need: 2, got: n });
        }
        let pts: Vec<Point> = (0..n)
            .map(|k| {
                let t = k as f64 / (n - 1) as f64;
                a.add(b.sub(a).scale(t))
            })
            .collect();
        let delta = 0.5 * a.dist(b) / (n - 1) as f64;
        Self::new(pts, delta)
    }

    pub fn point(&self, i: usize) -> Point {
        Point::new(self.points[i][0], self.points[i][1])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Maximal pairwise distance (spread) of the samples.
    pub fn spread(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                best = best.max(self.point(i).dist(self.point(j)));
            }
        }
        best
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("PointCloud serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: PointCloud = serde_json::from_str(text)?;
        let pts: Vec<Point> = c.points.iter().map(|p| Point::new(p[0], p[1])).collect();
        Self::new(pts, c.delta)
    }
}

/// Value and attaining sample of `F_M(Σ)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyResult {
    pub value: f64,
    pub argmax: Point,
    pub argmax_index: usize,
    pub per_point: Option<Vec<f64>>,
}

/// An energetic-point witness: `x ∈ Σ`, `y ∈ M` with `|x−y| ≈ r` and the open
/// `r`-ball around `y` missing Σ. Both margins are stored as attained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergeticWitness {
    pub x: Point,
    pub y: Point,
    /// `| r − |x−y| |`.
    pub slack: f64,
    /// `dist(y, Σ) − r`; witnesses require `ball_clearance ≥ −eta`.
    pub ball_clearance: f64,
    /// Index of the Σ-sample `x` in enumeration order.
    pub sample_index: usize,
    /// Index of `y` in the point cloud.
    pub point_index: usize,
}

/// One geometric site of a graph: a chord or an isolated vertex.
#[derive(Debug, Clone)]
enum Site {
    Chord(Segment),
    Vertex(Point),
}

impl Site {
    fn dist(&self, p: Point) -> f64 {
        match self {
            Site::Chord(s) => dist_point_segment(p, s),
            Site::Vertex(q) => p.dist(*q),
        }
    }
}

/// Uniform grid over the sites of a Σ-graph for nearest-distance queries.
///
/// Queries are deterministic regardless of internal hash order: candidates are
/// reduced with a (distance, site index) minimum.
pub struct SigmaDistanceField {
    sites: Vec<Site>,
    cell: f64,
    cells: HashMap<(i64, i64), Vec<u32>>,
}

impl SigmaDistanceField {
    pub fn build(g: &SigmaGraph) -> Result<Self> {
        let mut sites: Vec<Site> = g.segments().into_iter().map(Site::Chord).collect();
        for p in g.isolated_vertices() {
            sites.push(Site::Vertex(p));
        }
        Self::from_sites(sites)
    }

    /// Field over bare segments; site indices equal segment indices.
    pub fn from_segments(segments: &[Segment]) -> Result<Self> {
        Self::from_sites(segments.iter().map(|s| Site::Chord(*s)).collect())
    }

    fn from_sites(sites: Vec<Site>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut lens: Vec<f64> = sites
            .iter()
            .filter_map(|s| match s {
                Site::Chord(seg) => Some(seg.length()),
                Site::Vertex(_) => None,
            })
            .collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for s in &sites {
            let (a, b) = match s {
                Site::Chord(seg) => (seg.a, seg.b),
                Site::Vertex(p) => (*p, *p),
            };
            for p in [a, b] {
                min.x = min.x.min(p.x);
                min.y = min.y.min(p.y);
                max.x = max.x.max(p.x);
                max.y = max.y.max(p.y);
            }
        }
        let diam = min.dist(max);
        let median = if lens.is_empty() { diam } else { lens[lens.len() / 2] };
        // Cell size near the median chord length. The lower clamp keeps ring
        // searches short when queries sit far from finely sampled chords; the
        // coordinate-magnitude floor keeps cell indices inside i64 range.
        let max_abs = sites
            .iter()
            .map(|s| match s {
                Site::Chord(seg) => seg.a.norm().max(seg.b.norm()),
                Site::Vertex(p) => p.norm(),
            })
            .fold(0.0f64, f64::max);
        let cell = median
            .clamp(diam / 128.0, diam)
            .max(max_abs * 1e-12)
            .max(1e-12);
        let mut cells: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (i, site) in sites.iter().enumerate() {
            let (a, b) = match site {
                Site::Chord(s) => (s.a, s.b),
                Site::Vertex(p) => (*p, *p),
            };
            for key in cells_on_segment(a, b, cell) {
                cells.entry(key).or_default().push(i as u32);
            }
        }
        Ok(SigmaDistanceField { sites, cell, cells })
    }

    /// Distance, nearest site index, and the segment parameter of the foot
    /// (0 for vertex sites). Used by gradient evaluation.
    pub fn nearest_detail(&self, p: Point) -> (f64, usize, f64) {
        let (d, idx) = self.nearest(p);
        let t = match &self.sites[idx] {
            Site::Chord(s) => s.closest_point(p).0,
            Site::Vertex(_) => 0.0,
        };
        (d, idx, t)
    }

    /// Distance from `p` to the union of sites and the index of the nearest
    /// site (lowest index wins ties).
    pub fn nearest(&self, p: Point) -> (f64, usize) {
        let cx = (p.x / self.cell).floor() as i64;
        let cy = (p.y / self.cell).floor() as i64;
        let mut best = f64::INFINITY;
        let mut best_idx = usize::MAX;
        let mut ring: i64 = 0;
        // A conservative cap: every site lies within some ring of the grid.
        let max_ring = self.max_ring(p);
        loop {
            let mut any = false;
            for key in ring_cells(cx, cy, ring) {
                if let Some(list) = self.cells.get(&key) {
                    any = true;
                    for &i in list {
                        let d = self.sites[i as usize].dist(p);
                        if d < best || (d == best && (i as usize) < best_idx) {
                            best = d;
                            best_idx = i as usize;
                        }
                    }
                }
            }
            let _ = any;
            // Cells on ring k are at least (k-1) * cell away from p.
            if best_idx != usize::MAX && (ring as f64 - 1.0) * self.cell > best {
                break;
            }
            if ring > max_ring {
                break;
            }
            ring += 1;
        }
        debug_assert!(best_idx != usize::MAX);
        (best, best_idx)
    }

    fn max_ring(&self, p: Point) -> i64 {
        let cx = (p.x / self.cell).floor() as i64;
        let cy = (p.y / self.cell).floor() as i64;
        self.cells
            .keys()
            .map(|(x, y)| (x - cx).abs().max((y - cy).abs()))
            .max()
            .unwrap_or(0)
            + 1
    }
}

fn cells_on_segment(a: Point, b: Point, cell: f64) -> Vec<(i64, i64)> {
    // Conservative rasterization: walk the segment with a step of half a cell
    // and mark the 3x3 neighborhood of every visited cell.
    let len = a.dist(b);
    let steps = (len / (0.5 * cell)).ceil().max(1.0) as usize;
    let mut out = std::collections::BTreeSet::new();
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let p = a.add(b.sub(a).scale(t));
        let cx = (p.x / cell).floor() as i64;
        let cy = (p.y / cell).floor() as i64;
        for dx in -1..=1 {
            for dy in -1..=1 {
                out.insert((cx + dx, cy + dy));
            }
        }
    }
    out.into_iter().collect()
}

fn ring_cells(cx: i64, cy: i64, ring: i64) -> Vec<(i64, i64)> {
    if ring == 0 {
        return vec![(cx, cy)];
    }
    let mut out = Vec::with_capacity((8 * ring) as usize);
    for dx in -ring..=ring {
        out.push((cx + dx, cy - ring));
        out.push((cx + dx, cy + ring));
    }
    for dy in (-ring + 1)..ring {
        out.push((cx - ring, cy + dy));
        out.push((cx + ring, cy + dy));
    }
    out
}

/// `F_M(Σ)`: maximal distance from the cloud to the graph.
pub fn energy(m: &PointCloud, g: &SigmaGraph) -> Result<EnergyResult> {
    energy_impl(m, g, false)
}

/// Like [`energy`] but also returns the per-point distances.
pub fn energy_per_point(m: &PointCloud, g: &SigmaGraph) -> Result<EnergyResult> {
    energy_impl(m, g, true)
}

fn energy_impl(m: &PointCloud, g: &SigmaGraph, keep: bool) -> Result<EnergyResult> {
    let field = SigmaDistanceField::build(g)?;
    let dists: Vec<f64> = (0..m.len())
        .into_par_iter()
        .map(|i| field.nearest(m.point(i)).0)
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0usize;
    for (i, &d) in dists.iter().enumerate() {
        if d > best {
            best = d;
            best_idx = i;
        }
    }
    Ok(EnergyResult {
        value: best,
        argmax: m.point(best_idx),
        argmax_index: best_idx,
        per_point: if keep { Some(dists) } else { None },
    })
}

/// True iff `F_M(Σ) ≤ r + eta`.
pub fn is_feasible(m: &PointCloud, g: &SigmaGraph, r: f64, eta: f64) -> Result<bool> {
    Ok(energy(m, g)?.value <= r + eta)
}

/// Enumeration of the polyline points of a graph, vertices first (in vertex
/// order), then interior polyline points edge by edge.
pub fn sigma_samples(g: &SigmaGraph) -> Vec<Point> {
    let mut out: Vec<Point> = g.vertices.iter().map(|v| v.point()).collect();
    for e in &g.edges {
        let pts = e.points();
        for p in &pts[1..pts.len().saturating_sub(1)] {
            out.push(*p);
        }
    }
    out
}

/// Detects energetic Σ-samples and their witnesses.
///
/// For every Σ-sample `x`, collects all cloud points `y` with
/// `| |x−y| − r | ≤ eta` whose distance to Σ is at least `r − eta`. The result
/// is ordered by Σ-sample index, then by cloud index.
pub fn find_energetic(
    m: &PointCloud,
    g: &SigmaGraph,
    r: f64,
    eta: f64,
) -> Result<Vec<EnergeticWitness>> {
    let res = energy_per_point(m, g)?;
    if res.value > r + eta {
        return Err(Error::Infeasible {
            energy: res.value,
            r,
            eta,
        });
    }
    let dists = res.per_point.expect("per_point requested");
    let samples = sigma_samples(g);
    find_energetic_for_samples(m, &dists, &samples, r, eta)
}

/// Witness detection for an explicit list of Σ-samples; `sigma_dists` are the
/// precomputed distances from every cloud point to Σ.
pub fn find_energetic_for_samples(
    m: &PointCloud,
    sigma_dists: &[f64],
    samples: &[Point],
    r: f64,
    eta: f64,
) -> Result<Vec<EnergeticWitness>> {
    let max_abs = (0..m.len()).map(|i| m.point(i).norm()).fold(0.0f64, f64::max);
    let grid = CloudGrid::build(m, (0.125 * r).max(max_abs * 1e-12).max(1e-12));
    let per_sample: Vec<Vec<EnergeticWitness>> = samples
        .par_iter()
        .enumerate()
        .map(|(si, &x)| {
            let mut ws = Vec::new();
            for yi in grid.annulus_candidates(x, r, eta) {
                let y = m.point(yi);
                let slack = (x.dist(y) - r).abs();
                if slack <= eta && sigma_dists[yi] >= r - eta {
                    ws.push(EnergeticWitness {
                        x,
                        y,
                        slack,
                        ball_clearance: sigma_dists[yi] - r,
                        sample_index: si,
                        point_index: yi,
                    });
                }
            }
            ws.sort_by_key(|w| w.point_index);
            ws
        })
        .collect();
    Ok(per_sample.into_iter().flatten().collect())
}

/// Uniform grid over cloud points for annulus queries.
struct CloudGrid {
    cell: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl CloudGrid {
    fn build(m: &PointCloud, cell: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for i in 0..m.len() {
            let p = m.point(i);
            let key = ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
            cells.entry(key).or_default().push(i);
        }
        CloudGrid { cell, cells }
    }

    /// Indices of cloud points whose cell could intersect the annulus
    /// `r ± (eta + cell diagonal)` around `x`, in ascending index order.
    fn annulus_candidates(&self, x: Point, r: f64, eta: f64) -> Vec<usize> {
        let lo = r - eta;
        let hi = r + eta;
        let reach = hi + self.cell * std::f64::consts::SQRT_2;
        let cx0 = ((x.x - reach) / self.cell).floor() as i64;
        let cx1 = ((x.x + reach) / self.cell).floor() as i64;
        let cy0 = ((x.y - reach) / self.cell).floor() as i64;
        let cy1 = ((x.y + reach) / self.cell).floor() as i64;
        let mut out = Vec::new();
        for cx in cx0..=cx1 {
            for cy in cy0..=cy1 {
                // Distance range from x to this cell.
                let minx = cx as f64 * self.cell;
                let miny = cy as f64 * self.cell;
                let nearest_x = x.x.clamp(minx, minx + self.cell);
                let nearest_y = x.y.clamp(miny, miny + self.cell);
                let dmin = x.dist(Point::new(nearest_x, nearest_y));
                let corner = |px: f64, py: f64| x.dist(Point::new(px, py));
                let dmax = corner(minx, miny)
                    .max(corner(minx + self.cell, miny))
                    .max(corner(minx, miny + self.cell))
                    .max(corner(minx + self.cell, miny + self.cell));
                if dmax < lo || dmin > hi {
                    continue;
                }
                if let Some(list) = self.cells.get(&(cx, cy)) {
                    out.extend_from_slice(list);
                }
            }
        }
        out.sort_unstable();
        out
    }
}
