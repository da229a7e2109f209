//! Rule evaluations for the validator.

use serde::{Deserialize, Serialize};

use crate::geometry::{discrete_curvature, Point};
use crate::sigma::SigmaGraph;

use super::{Classification, PointLabel, SampleRef};

const TWO_PI_3: f64 = 2.0 * std::f64::consts::PI / 3.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleResult {
    pub name: String,
    pub pass: bool,
    /// Positive margins mean slack; negative means the rule is violated by
    /// that amount (in the rule's own units).
    pub margin: f64,
    pub tolerance: f64,
    pub offenders: Vec<Point>,
}

/// R1..R6 on a classified graph. Locations condemned by an earlier rule are
/// excluded from later ones.
pub fn structure_rules(g: &SigmaGraph, cls: &Classification, tol_angle: f64) -> Vec<RuleResult> {
    let mut rules = Vec::new();

    // R1: acyclicity.
    let acyclic = !g.has_cycle();
    rules.push(RuleResult {
        name: "R1-acyclic".into(),
        pass: acyclic,
        margin: if acyclic { 1.0 } else { -1.0 },
        tolerance: 0.0,
        offenders: Vec::new(),
    });

    // R2: degree at most 3.
    let mut max_degree = 0usize;
    let mut r2_offenders = Vec::new();
    for s in &cls.samples {
        max_degree = max_degree.max(s.degree);
        if s.degree > 3 {
            r2_offenders.push(s.point);
        }
    }
    rules.push(RuleResult {
        name: "R2-degree".into(),
        pass: r2_offenders.is_empty(),
        margin: 3.0 - max_degree as f64,
        tolerance: 0.0,
        offenders: r2_offenders,
    });

    // R3: pairwise tangent-ray angles at least 2π/3 (at degree <= 3 samples).
    let mut min_angle = f64::INFINITY;
    let mut r3_offenders = Vec::new();
    for s in &cls.samples {
        if s.degree > 3 || s.rays.len() < 2 {
            continue;
        }
        for i in 0..s.rays.len() {
            for j in (i + 1)..s.rays.len() {
                let th = s.rays[i]
                    .cross(s.rays[j])
                    .abs()
                    .atan2(s.rays[i].dot(s.rays[j]));
                if th < min_angle {
                    min_angle = th;
                }
                if th < TWO_PI_3 - tol_angle {
                    r3_offenders.push(s.point);
                }
            }
        }
    }
    rules.push(RuleResult {
        name: "R3-angles".into(),
        pass: r3_offenders.is_empty(),
        margin: if min_angle.is_finite() {
            min_angle - TWO_PI_3
        } else {
            f64::INFINITY
        },
        tolerance: tol_angle,
        offenders: r3_offenders,
    });

    // R4: degree-3 points are straight regular tripods and non-energetic.
    let mut worst_dev: f64 = 0.0;
    let mut r4_offenders = Vec::new();
    for s in &cls.samples {
        if s.degree != 3 {
            continue;
        }
        let mut bad = false;
        for i in 0..s.rays.len() {
            for j in (i + 1)..s.rays.len() {
                let th = s.rays[i]
                    .cross(s.rays[j])
                    .abs()
                    .atan2(s.rays[i].dot(s.rays[j]));
                let dev = (th - TWO_PI_3).abs();
                worst_dev = worst_dev.max(dev);
                if dev > tol_angle {
                    bad = true;
                }
            }
        }
        for res in &s.ray_residuals {
            worst_dev = worst_dev.max(*res);
            if *res > tol_angle {
                bad = true;
            }
        }
        if s.label != PointLabel::S {
            bad = true;
        }
        if bad {
            r4_offenders.push(s.point);
        }
    }
    rules.push(RuleResult {
        name: "R4-tripod".into(),
        pass: r4_offenders.is_empty(),
        margin: tol_angle - worst_dev,
        tolerance: tol_angle,
        offenders: r4_offenders,
    });

    // R5: energetic points have one or two tangent rays, never three.
    let mut max_rays_at_e = 0usize;
    let mut r5_offenders = Vec::new();
    for s in &cls.samples {
        if s.degree > 3 {
            continue;
        }
        if s.label == PointLabel::E || s.label == PointLabel::X {
            max_rays_at_e = max_rays_at_e.max(s.rays.len());
            if s.rays.len() > 2 {
                r5_offenders.push(s.point);
            }
        }
    }
    rules.push(RuleResult {
        name: "R5-energetic-rays".into(),
        pass: r5_offenders.is_empty(),
        margin: 2.0 - max_rays_at_e as f64,
        tolerance: 0.0,
        offenders: r5_offenders,
    });

    // R6: the branch-vertex count must not grow under re-sampling at double
    // resolution.
    let branch_count = |graph: &SigmaGraph| {
        graph
            .vertices
            .iter()
            .filter(|v| graph.degree(v.id) >= 3)
            .count()
    };
    let base = branch_count(&cls.graph);
    let fine = branch_count(&cls.graph.densified(0.5 * cls.sample_step.max(1e-12)));
    rules.push(RuleResult {
        name: "R6-finite-branching".into(),
        pass: fine <= base,
        margin: base as f64 - fine as f64,
        tolerance: 0.0,
        offenders: Vec::new(),
    });

    rules
}

/// Empirical Ahlfors regularity: ratios `H(Σ ∩ B_ρ(x))/ρ` over sampled
/// centers. The lower gate applies at all radii, the upper gate (length
/// expansion `ord ≤ 3`) at the smallest tested radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AhlforsReport {
    pub c_hat: f64,
    pub big_c_hat: f64,
    pub radii: Vec<f64>,
    pub pass: bool,
    pub margin: f64,
    pub tolerance: f64,
    pub offenders: Vec<Point>,
}

pub fn check_ahlfors(g: &SigmaGraph, radii: &[f64], tol: f64) -> AhlforsReport {
    let chords = g.segments();
    let mut centers: Vec<Point> = Vec::new();
    for v in &g.vertices {
        if g.degree(v.id) <= 3 {
            centers.push(v.point());
        }
    }
    let interior: Vec<Point> = g
        .edges
        .iter()
        .flat_map(|e| {
            let pts = e.points();
            pts[1..pts.len().saturating_sub(1)].to_vec()
        })
        .collect();
    let stride = (interior.len() / 64).max(1);
    centers.extend(interior.iter().step_by(stride).cloned());

    let smallest = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let largest = radii.iter().cloned().fold(0.0f64, f64::max);
    let mut c_hat = f64::INFINITY;
    let mut big_c_hat: f64 = 0.0;
    let mut offenders = Vec::new();
    for &x in &centers {
        // Quick reject: only chords whose bounding box reaches the largest
        // tested disk can contribute.
        let near: Vec<usize> = (0..chords.len())
            .filter(|&k| {
                let s = &chords[k];
                let dx = (s.a.x.min(s.b.x) - x.x).max(x.x - s.a.x.max(s.b.x)).max(0.0);
                let dy = (s.a.y.min(s.b.y) - x.y).max(x.y - s.a.y.max(s.b.y)).max(0.0);
                dx * dx + dy * dy <= largest * largest
            })
            .collect();
        for &rho in radii {
            let mut inside = 0.0;
            for &k in &near {
                let s = &chords[k];
                inside += chord_length_in_disk(s.a, s.b, x, rho);
            }
            let ratio = inside / rho;
            if ratio < c_hat {
                c_hat = ratio;
            }
            if ratio < 1.0 - tol {
                offenders.push(x);
            }
            if rho == smallest {
                if ratio > big_c_hat {
                    big_c_hat = ratio;
                }
                if ratio > 3.0 + tol {
                    offenders.push(x);
                }
            }
        }
    }
    let margin = (c_hat - (1.0 - tol)).min((3.0 + tol) - big_c_hat);
    AhlforsReport {
        c_hat,
        big_c_hat,
        radii: radii.to_vec(),
        pass: offenders.is_empty(),
        margin,
        tolerance: tol,
        offenders,
    }
}

fn chord_length_in_disk(a: Point, b: Point, x: Point, rho: f64) -> f64 {
    let e = b.sub(a);
    let f = a.sub(x);
    let qa = e.dot(e);
    if qa == 0.0 {
        return 0.0;
    }
    let qb = 2.0 * f.dot(e);
    let qc = f.dot(f) - rho * rho;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let t0 = ((-qb - sq) / (2.0 * qa)).max(0.0);
    let t1 = ((-qb + sq) / (2.0 * qa)).min(1.0);
    if t1 <= t0 {
        return 0.0;
    }
    (t1 - t0) * qa.sqrt()
}

/// Curvature and convexity at energetic points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub max_abs_kappa: f64,
    /// `1/r`.
    pub bound: f64,
    pub pass: bool,
    pub offenders: Vec<Point>,
    pub measured_triples: usize,
    pub sign_consistent: bool,
}

/// Discrete curvature at interior energetic samples by circumscribed circles
/// of consecutive triples. Two-sided witnesses enforce `|κ| ≤ 1/r + tol`;
/// one-sided energetic runs must turn with a consistent sign, away from the
/// witness side.
pub fn check_curvature_bound(cls: &Classification, r: f64, tol_kappa: f64) -> CurvatureReport {
    let bound = 1.0 / r;
    let mut max_abs: f64 = 0.0;
    let mut offenders = Vec::new();
    let mut measured = 0usize;
    let mut sign_consistent = true;

    // Index interior samples by (edge, index).
    let mut by_loc = std::collections::BTreeMap::new();
    for (si, s) in cls.samples.iter().enumerate() {
        if let SampleRef::Interior { edge, index } = s.location {
            by_loc.insert((edge, index), si);
        }
    }

    for (ei, e) in cls.graph.edges.iter().enumerate() {
        let pts = e.points();
        // Contiguous runs of one-sided energetic samples share a turn sign.
        let mut run_sign = 0i8;
        for i in 1..pts.len().saturating_sub(1) {
            let Some(&si) = by_loc.get(&(ei, i)) else { continue };
            let s = &cls.samples[si];
            if s.label != PointLabel::E {
                run_sign = 0;
                continue;
            }
            let kappa = discrete_curvature(pts[i - 1], pts[i], pts[i + 1]);
            measured += 1;
            max_abs = max_abs.max(kappa.abs());
            if both_sided(s) {
                if kappa.abs() > bound + tol_kappa {
                    offenders.push(s.point);
                }
                run_sign = 0;
                continue;
            }
            // One-sided: non-strict convexity toward the witness side.
            if kappa.abs() <= tol_kappa {
                continue; // flat within tolerance
            }
            let tangent = pts[i + 1].sub(pts[i - 1]);
            if let Some(w) = s.witnesses.first() {
                let side = tangent.cross(w.y.sub(s.point));
                if kappa * side > 0.0 {
                    // Turning toward the empty ball side.
                    offenders.push(s.point);
                    sign_consistent = false;
                }
            }
            let sign = if kappa > 0.0 { 1i8 } else { -1i8 };
            if run_sign != 0 && sign != run_sign {
                offenders.push(s.point);
                sign_consistent = false;
            }
            run_sign = sign;
        }
    }

    CurvatureReport {
        max_abs_kappa: max_abs,
        bound,
        pass: offenders.is_empty(),
        offenders,
        measured_triples: measured,
        sign_consistent,
    }
}

fn both_sided(s: &super::SampleInfo) -> bool {
    for i in 0..s.witnesses.len() {
        for j in (i + 1)..s.witnesses.len() {
            let a = s.witnesses[i].y.sub(s.point);
            let b = s.witnesses[j].y.sub(s.point);
            let th = a.cross(b).abs().atan2(a.dot(b));
            if th > std::f64::consts::PI - 0.2 {
                return true;
            }
        }
    }
    false
}
