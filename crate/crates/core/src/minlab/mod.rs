//! Explicit minimizer constructions and certificates for concrete compacts.
//!
//! For a finite set `M` there is an exact sufficient criterion: a connected
//! set Σ with `F_M(Σ) ≤ r` is a minimizer as soon as
//! `H(Σ) ≤ H(St(M)) − r·♯M`, where `St(M)` is a Steiner minimal tree of `M`;
//! the inequality can never be strict. [`trimmed_tree`] realizes the equality
//! case by shortening every terminal edge of `St(M)` by exactly `r`, and
//! [`criterion_check`] evaluates the certificate for arbitrary candidates.
//!
//! For `M` a circle of radius `R` the candidate minimizer is the horseshoe:
//! a concentric arc of radius `R − r` plus two segments tangent to it at the
//! arc ends, valid for `R > 4.98·r`. [`horseshoe`] resolves the arc sweep and
//! tangent length so the coverage is exact and no shorter member of the
//! two-parameter family is feasible.

pub mod fixtures;

use serde::{Deserialize, Serialize};

use crate::energy::{energy, PointCloud, ETA_REL};
use crate::error::{Error, Result};
use crate::geometry::{dist_point_segment, Point, Segment};
use crate::sigma::{GraphEdge, GraphVertex, SigmaGraph};
use crate::steiner::{steiner_exact, NodeRef, SteinerTree};

/// Criterion margin tolerance as a fraction of the configuration diameter.
pub const TOL_LEN_REL: f64 = 1e-9;

/// Validity threshold for the horseshoe radius ratio used by this build.
pub const HORSESHOE_THRESHOLD: f64 = 4.98;

/// Alternative threshold stated in the companion text; surfaced in reports.
pub const HORSESHOE_COMPANION_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionVerdict {
    CertifiedMinimizer,
    NotMinimizer,
    Inconclusive,
}

/// Outcome of the finite-`M` certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub steiner_length: f64,
    pub sigma_length: f64,
    pub r: f64,
    pub n_points: usize,
    /// `steiner_length − r·n_points`.
    pub bound: f64,
    /// `bound − sigma_length`; certification requires `margin ≥ −tol_len`.
    pub margin: f64,
    pub feasible: bool,
    pub verdict: CriterionVerdict,
    pub tol_len: f64,
}

/// Evaluates the finite-`M` minimality certificate for a candidate Σ.
pub fn criterion_check(m: &PointCloud, g: &SigmaGraph, r: f64) -> Result<CriterionReport> {
    if m.len() > 6 {
        return Err(Error::TooManyPoints(m.len()));
    }
    if !g.is_connected() {
        return Err(Error::InvalidGraph(
            "criterion requires a connected candidate".into(),
        ));
    }
    let points: Vec<Point> = (0..m.len()).map(|i| m.point(i)).collect();
    let st = steiner_exact(&points)?;
    let sigma_length = g.total_length();
    let n = m.len();
    let bound = st.length - r * n as f64;
    let margin = bound - sigma_length;
    let scale = g.diameter().max(m.spread()).max(r);
    let tol_len = TOL_LEN_REL * scale;
    let feasible = energy(m, g)?.value <= r + ETA_REL * r;

    let verdict = if !feasible {
        CriterionVerdict::NotMinimizer
    } else if margin >= -tol_len {
        if margin > tol_len {
            // A feasible candidate strictly shorter than the bound is
            // impossible; the excess must be numerical or sampling error.
            CriterionVerdict::Inconclusive
        } else {
            CriterionVerdict::CertifiedMinimizer
        }
    } else if trimmed_tree(m, r).is_ok() {
        // The bound is attained by the trimmed tree, so a strictly longer
        // feasible candidate cannot be minimal.
        CriterionVerdict::NotMinimizer
    } else {
        CriterionVerdict::Inconclusive
    };

    Ok(CriterionReport {
        steiner_length: st.length,
        sigma_length,
        r,
        n_points: n,
        bound,
        margin,
        feasible,
        verdict,
        tol_len,
    })
}

/// `St(M)` with every terminal edge shortened by exactly `r` from the
/// terminal end. Requires every point of `M` to be a leaf of the Steiner
/// tree and every edge to survive its trims with positive length.
pub fn trimmed_tree(m: &PointCloud, r: f64) -> Result<SigmaGraph> {
    if !(r > 0.0) {
        return Err(Error::TrimUndefined(format!("r must be positive, got {r}")));
    }
    let points: Vec<Point> = (0..m.len()).map(|i| m.point(i)).collect();
    let st = steiner_exact(&points)?;
    trim_steiner_tree(&st, r)
}

/// Trimming of an explicit Steiner tree; exposed for reuse by the optimizer's
/// initialization.
pub fn trim_steiner_tree(st: &SteinerTree, r: f64) -> Result<SigmaGraph> {
    let n = st.terminals.len();
    for i in 0..n {
        let d = st.degree_of(NodeRef::Terminal(i));
        if d != 1 {
            return Err(Error::TrimUndefined(format!(
                "terminal {i} has degree {d} in St(M); the construction needs all terminals to be leaves"
            )));
        }
    }
    // Total trim on each edge: r per terminal endpoint.
    let mut positions: Vec<(NodeRef, Point)> = Vec::new();
    for i in 0..n {
        positions.push((NodeRef::Terminal(i), st.terminals[i]));
    }
    for j in 0..st.steiner_points.len() {
        positions.push((NodeRef::Steiner(j), st.steiner_points[j]));
    }
    let pos_of = |node: NodeRef| positions.iter().find(|(k, _)| *k == node).unwrap().1;

    let mut trimmed: Vec<(Point, Point)> = Vec::new();
    for (u, v) in &st.edges {
        let pu = pos_of(*u);
        let pv = pos_of(*v);
        let len = pu.dist(pv);
        let trim_u = matches!(u, NodeRef::Terminal(_)) as usize as f64 * r;
        let trim_v = matches!(v, NodeRef::Terminal(_)) as usize as f64 * r;
        if len - trim_u - trim_v <= 0.0 {
            return Err(Error::TrimUndefined(format!(
                "edge of length {len} cannot absorb trims {trim_u} + {trim_v}"
            )));
        }
        let dir = pv.sub(pu).scale(1.0 / len);
        let a = pu.add(dir.scale(trim_u));
        let b = pv.sub(dir.scale(trim_v));
        trimmed.push((a, b));
    }
    crate::sigma::graph_from_segments(&trimmed, "trimmed Steiner tree")
}

/// Resolved horseshoe construction parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HorseshoeParams {
    pub circle_radius: f64,
    pub r: f64,
    pub center: Point,
    pub gap_direction: f64,
    /// Sweep of the concentric arc, in radians.
    pub arc_sweep: f64,
    /// Half-angle of the gap left uncovered by the arc.
    pub gap_half_angle: f64,
    pub tangent_length: f64,
    pub total_length: f64,
    /// Residual `|F_M(Σ) − r|` of the continuous covering equation.
    pub covering_residual: f64,
    pub validity_threshold: f64,
    pub companion_threshold: f64,
}

/// Tangent length closing the covering equation at gap half-angle `gamma`:
/// the far tangent endpoint sits at distance exactly `r` from the gap-center
/// point of `M`. Returns `None` outside the solvable range.
fn tangent_length_for(big_r: f64, r: f64, gamma: f64) -> Option<f64> {
    let rho = big_r - r;
    let disc = big_r * big_r * gamma.sin().powi(2) + 2.0 * rho * big_r * gamma.cos()
        - rho * rho
        - big_r * big_r
        + r * r;
    if disc < 0.0 {
        return None;
    }
    let t = big_r * gamma.sin() - disc.sqrt();
    if t < 0.0 {
        return None;
    }
    Some(t)
}

fn horseshoe_total_length(big_r: f64, r: f64, gamma: f64) -> Option<f64> {
    let rho = big_r - r;
    let t = tangent_length_for(big_r, r, gamma)?;
    Some(2.0 * rho * (std::f64::consts::PI - gamma) + 2.0 * t)
}

/// Geometry of the resolved horseshoe at gap half-angle `gamma`.
struct HorseshoeGeometry {
    junction: Point,     // arc endpoint on the gap side with positive angle
    far_end: Point,      // far tangent endpoint
    tangent_length: f64,
}

fn horseshoe_geometry(big_r: f64, r: f64, gamma: f64) -> Option<HorseshoeGeometry> {
    let rho = big_r - r;
    let t = tangent_length_for(big_r, r, gamma)?;
    let junction = Point::new(rho * gamma.cos(), rho * gamma.sin());
    let toward_gap = Point::new(gamma.sin(), -gamma.cos());
    let far_end = junction.add(toward_gap.scale(t));
    Some(HorseshoeGeometry {
        junction,
        far_end,
        tangent_length: t,
    })
}

/// Worst coverage distance over the gap arc of the continuum circle, measured
/// against the two tangent segments (the covered arc is at distance exactly
/// `r` radially).
fn gap_coverage_max(big_r: f64, r: f64, gamma: f64, probes: usize) -> Option<f64> {
    let geom = horseshoe_geometry(big_r, r, gamma)?;
    let seg = Segment::new(geom.junction, geom.far_end).ok()?;
    let mut worst: f64 = 0.0;
    for k in 0..=probes {
        let phi = gamma * k as f64 / probes as f64;
        let y = Point::new(big_r * phi.cos(), big_r * phi.sin());
        // By mirror symmetry it suffices to probe the upper half-gap.
        worst = worst.max(dist_point_segment(y, &seg));
    }
    Some(worst)
}

/// Builds the horseshoe for `M` a circle of radius `R` around the origin with
/// the gap centered on the positive x-axis.
///
/// Returns the sampled cloud, the flattened candidate Σ, and the resolved
/// parameters. The arc sweep is minimized by a grid-plus-golden-section
/// search over the one-parameter family in which the covering equation is
/// closed exactly by the tangent length.
pub fn horseshoe(big_r: f64, r: f64, samples: usize) -> Result<(PointCloud, SigmaGraph, HorseshoeParams)> {
    if !(big_r > HORSESHOE_THRESHOLD * r) {
        return Err(Error::HorseshoeDomain {
            r_big: big_r,
            threshold: HORSESHOE_THRESHOLD,
            bound: HORSESHOE_THRESHOLD * r,
        });
    }
    if samples < 1000 {
        return Err(Error::TooFewSamples {
            need: 1000,
            got: samples,
        });
    }

    // Bracket the solvable gamma range: the discriminant vanishes at 0 and at
    // gamma_max, and is positive in between.
    let probe = |gamma: f64| horseshoe_total_length(big_r, r, gamma);
    let mut gamma_hi = std::f64::consts::PI;
    while probe(gamma_hi).is_none() {
        gamma_hi *= 0.5;
        if gamma_hi < 1e-9 {
            return Err(Error::CoveringUnsolvable(
                "no feasible arc sweep in the validity domain".into(),
            ));
        }
    }
    // Expand back up with bisection to the exact upper end of solvability.
    let mut lo = gamma_hi;
    let mut hi = (2.0 * gamma_hi).min(std::f64::consts::PI);
    if probe(hi).is_none() {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if probe(mid).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let gamma_max = lo;

    // Coarse scan, then golden-section refinement of the unimodal length.
    let grid = 512;
    let mut best_gamma = gamma_max * 0.5;
    let mut best_len = f64::INFINITY;
    for k in 1..grid {
        let gamma = gamma_max * k as f64 / grid as f64;
        if let Some(len) = probe(gamma) {
            if len < best_len {
                best_len = len;
                best_gamma = gamma;
            }
        }
    }
    let (mut a, mut b) = (
        (best_gamma - gamma_max / grid as f64).max(1e-12),
        (best_gamma + gamma_max / grid as f64).min(gamma_max - 1e-12),
    );
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = probe(x1).unwrap_or(f64::INFINITY);
    let mut f2 = probe(x2).unwrap_or(f64::INFINITY);
    for _ in 0..200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = probe(x1).unwrap_or(f64::INFINITY);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = probe(x2).unwrap_or(f64::INFINITY);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let gamma = 0.5 * (a + b);
    let geom = horseshoe_geometry(big_r, r, gamma)
        .ok_or_else(|| Error::CoveringUnsolvable("resolved sweep left the solvable range".into()))?;
    let total_length = probe(gamma)
        .ok_or_else(|| Error::CoveringUnsolvable("resolved sweep left the solvable range".into()))?;

    // Verify the continuous covering equation: the gap must be covered with
    // the worst point at distance exactly r, and the far endpoint's ball must
    // close it.
    let worst_gap = gap_coverage_max(big_r, r, gamma, 4000)
        .ok_or_else(|| Error::CoveringUnsolvable("gap probe failed".into()))?;
    let residual = (worst_gap - r).abs();
    if worst_gap > r + 1e-10 * r {
        return Err(Error::CoveringUnsolvable(format!(
            "gap coverage misses by {residual}"
        )));
    }

    // Sample M on the angular grid and flatten Σ on the same grid.
    let m = PointCloud::circle(Point::new(0.0, 0.0), big_r, samples, 0.0)?;
    let rho = big_r - r;
    let tau = 2.0 * std::f64::consts::PI;
    let mut arc_angles = vec![gamma];
    let step = tau / samples as f64;
    let mut k = (gamma / step).ceil() as usize;
    while (k as f64) * step < tau - gamma {
        let ang = k as f64 * step;
        if ang > gamma {
            arc_angles.push(ang);
        }
        k += 1;
    }
    arc_angles.push(tau - gamma);
    let arc_pts: Vec<Point> = arc_angles
        .iter()
        .map(|t| Point::new(rho * t.cos(), rho * t.sin()))
        .collect();
    let h1 = arc_pts[0];
    let h2 = *arc_pts.last().unwrap();
    let p1 = geom.far_end;
    let p2 = Point::new(p1.x, -p1.y);

    let vertices = vec![
        GraphVertex { id: 0, x: h1.x, y: h1.y },
        GraphVertex { id: 1, x: h2.x, y: h2.y },
        GraphVertex { id: 2, x: p1.x, y: p1.y },
        GraphVertex { id: 3, x: p2.x, y: p2.y },
    ];
    let edges = vec![
        GraphEdge {
            id: 0,
            u: 0,
            v: 1,
            polyline: arc_pts.iter().map(|p| [p.x, p.y]).collect(),
        },
        GraphEdge {
            id: 1,
            u: 0,
            v: 2,
            polyline: vec![[h1.x, h1.y], [p1.x, p1.y]],
        },
        GraphEdge {
            id: 2,
            u: 1,
            v: 3,
            polyline: vec![[h2.x, h2.y], [p2.x, p2.y]],
        },
    ];
    let sigma = SigmaGraph::new(vertices, edges, "horseshoe")?;

    let params = HorseshoeParams {
        circle_radius: big_r,
        r,
        center: Point::new(0.0, 0.0),
        gap_direction: 0.0,
        arc_sweep: tau - 2.0 * gamma,
        gap_half_angle: gamma,
        tangent_length: geom.tangent_length,
        total_length,
        covering_residual: residual,
        validity_threshold: HORSESHOE_THRESHOLD,
        companion_threshold: HORSESHOE_COMPANION_THRESHOLD,
    };
    Ok((m, sigma, params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{energy, is_feasible};
    use approx::assert_abs_diff_eq;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn two_points() -> PointCloud {
        PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap()
    }

    fn equilateral_cloud() -> PointCloud {
        PointCloud::finite(&[
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(0.5, 3.0f64.sqrt() / 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn criterion_certifies_trimmed_segment() {
        let m = two_points();
        let g = crate::sigma::graph_from_segments(&[(p(0.2, 0.0), p(0.8, 0.0))], "").unwrap();
        let rep = criterion_check(&m, &g, 0.2).unwrap();
        assert_abs_diff_eq!(rep.bound, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.sigma_length, 0.6, epsilon = 1e-12);
        assert!(rep.feasible);
        assert_eq!(rep.verdict, CriterionVerdict::CertifiedMinimizer);
        assert!(rep.margin.abs() <= rep.tol_len);
    }

    #[test]
    fn criterion_rejects_longer_candidate() {
        let m = two_points();
        let g = crate::sigma::graph_from_segments(&[(p(0.0, 0.0), p(0.8, 0.0))], "").unwrap();
        let rep = criterion_check(&m, &g, 0.2).unwrap();
        assert_abs_diff_eq!(rep.sigma_length, 0.8, epsilon = 1e-12);
        assert_eq!(rep.verdict, CriterionVerdict::NotMinimizer);
    }

    #[test]
    fn criterion_equilateral_trimmed_tripod() {
        let m = equilateral_cloud();
        let r = 0.1;
        let g = trimmed_tree(&m, r).unwrap();
        let rep = criterion_check(&m, &g, r).unwrap();
        let expected_bound = 3.0f64.sqrt() - 0.3;
        assert_abs_diff_eq!(rep.bound, expected_bound, epsilon = 1e-9);
        assert_eq!(rep.verdict, CriterionVerdict::CertifiedMinimizer);
    }

    #[test]
    fn trimmed_two_points() {
        let m = two_points();
        let g = trimmed_tree(&m, 0.2).unwrap();
        assert_abs_diff_eq!(g.total_length(), 0.6, epsilon = 1e-12);
        let e = energy(&m, &g).unwrap();
        assert_abs_diff_eq!(e.value, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn trimmed_equilateral_tripod() {
        let m = equilateral_cloud();
        let g = trimmed_tree(&m, 0.1).unwrap();
        assert_abs_diff_eq!(g.total_length(), 3.0f64.sqrt() - 0.3, epsilon = 1e-9);
        let e = energy(&m, &g).unwrap();
        assert_abs_diff_eq!(e.value, 0.1, epsilon = 1e-10);
    }

    #[test]
    fn trim_exceeding_edge_errors() {
        let m = two_points();
        assert!(matches!(
            trimmed_tree(&m, 0.6),
            Err(Error::TrimUndefined(_))
        ));
    }

    #[test]
    fn trim_degree_two_terminal_errors() {
        // Collinear middle terminal has degree 2 in St(M).
        let m = PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)]).unwrap();
        assert!(matches!(
            trimmed_tree(&m, 0.1),
            Err(Error::TrimUndefined(_))
        ));
    }

    #[test]
    fn horseshoe_feasible_and_short() {
        let (m, g, params) = horseshoe(5.0, 1.0, 5000).unwrap();
        assert!(params.covering_residual <= 1e-10);
        let e = energy(&m, &g).unwrap();
        assert_abs_diff_eq!(e.value, 1.0, epsilon = 1e-6);
        assert!(is_feasible(&m, &g, 1.0, 1e-6).unwrap());
        // Strictly better than the full concentric circle.
        assert!(g.total_length() < 2.0 * std::f64::consts::PI * 4.0);
        assert!(params.total_length < 2.0 * std::f64::consts::PI * 4.0);
        // The flattened polyline tracks the resolved continuous length.
        assert!((g.total_length() - params.total_length).abs() < 1e-3);
    }

    #[test]
    fn horseshoe_domain_error() {
        assert!(matches!(
            horseshoe(4.9, 1.0, 5000),
            Err(Error::HorseshoeDomain { .. })
        ));
    }

    #[test]
    fn horseshoe_sample_count_guard() {
        assert!(horseshoe(5.0, 1.0, 999).is_err());
    }

    #[test]
    fn criterion_scaling_invariance() {
        let m = equilateral_cloud();
        let r = 0.1;
        let g = trimmed_tree(&m, r).unwrap();
        let rep = criterion_check(&m, &g, r).unwrap();

        let lambda = 3.7;
        let scaled_pts: Vec<Point> = (0..m.len()).map(|i| m.point(i).scale(lambda)).collect();
        let ms = PointCloud::finite(&scaled_pts).unwrap();
        let gs = trimmed_tree(&ms, r * lambda).unwrap();
        let reps = criterion_check(&ms, &gs, r * lambda).unwrap();
        assert_eq!(rep.verdict, reps.verdict);
        assert_abs_diff_eq!(reps.bound, lambda * rep.bound, epsilon = 1e-9);
    }
}
