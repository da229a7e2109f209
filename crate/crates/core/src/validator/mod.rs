//! Machine-checkable necessary conditions for minimizers.
//!
//! [`classify`] labels every sample of Σ as `S` (no witness), `X` (isolated
//! energetic) or `E` (non-isolated energetic) using witness detection from
//! the energy module. [`validate`] then evaluates the structural rules:
//!
//! * R1 — no cycles;
//! * R2 — degree at most 3 everywhere;
//! * R3 — pairwise tangent-ray angles at least 2π/3;
//! * R4 — degree-3 points are locally straight regular tripods (exact 2π/3
//!   angles) and non-energetic;
//! * R5 — energetic points carry one or two tangent rays, never three;
//! * R6 — the branch-vertex count is stable under re-sampling at double
//!   resolution;
//! * Ahlfors ratios `H(Σ ∩ B_ρ(x))/ρ` within `[1 − tol, …]` with the upper
//!   gate `≤ 3 + tol` at the smallest tested radius;
//! * curvature at energetic points: `|κ| ≤ 1/r + tol` where two-sided
//!   witnesses pin the point, sign-consistent turning on one-sided arcs.
//!
//! Rules own disjoint offense domains: locations condemned by a lower rule
//! (e.g. degree > 3) are excluded from later rules so a defect is reported
//! exactly once, at its root cause.

mod rules;

pub use rules::{AhlforsReport, CurvatureReport, RuleResult};

use serde::{Deserialize, Serialize};

use crate::energy::{
    energy_per_point, find_energetic_for_samples, EnergeticWitness, PointCloud, ETA_REL,
};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sigma::SigmaGraph;

/// Default angle tolerance for constructed fixtures.
pub const TOL_ANGLE_DEFAULT: f64 = 1e-3;
/// Relaxed angle tolerance for optimizer outputs.
pub const TOL_ANGLE_OPTIMIZER: f64 = 5e-2;
/// Isolation radius as a multiple of the sampling step.
pub const RHO_ISO_STEPS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointLabel {
    E,
    X,
    S,
}

/// Where a classified sample sits on the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleRef {
    Vertex { id: u64 },
    Interior { edge: usize, index: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleInfo {
    pub point: Point,
    pub location: SampleRef,
    pub degree: usize,
    /// Unit tangent-ray directions, one per incident branch.
    pub rays: Vec<Point>,
    /// Root-mean-square line-fit residual of each branch, relative to its
    /// extent; a straightness measure.
    pub ray_residuals: Vec<f64>,
    pub label: PointLabel,
    pub witnesses: Vec<EnergeticWitness>,
    /// False when the nearest other witnessed sample sits near the isolation
    /// radius, making the X/E split scale-sensitive.
    pub isolation_robust: bool,
}

/// Per-sample labels over a densified copy of Σ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub samples: Vec<SampleInfo>,
    pub rho_iso: f64,
    pub sample_step: f64,
    pub r: f64,
    /// The densified graph the samples live on.
    pub graph: SigmaGraph,
}

#[derive(Debug, Clone)]
pub struct ValidatorOptions {
    pub tol_angle: f64,
    pub rho_iso: Option<f64>,
    pub eta: Option<f64>,
    pub max_step: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub tol_ahlfors: f64,
    pub tol_kappa_rel: f64,
}

impl Default for ValidatorOptions {
    fn default() -> Self {
        ValidatorOptions {
            tol_angle: TOL_ANGLE_DEFAULT,
            rho_iso: None,
            eta: None,
            max_step: None,
            radii: None,
            tol_ahlfors: 1e-6,
            tol_kappa_rel: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Structured rule outcomes; overall pass iff every rule passes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rules: Vec<RuleResult>,
    pub ahlfors: AhlforsReport,
    pub curvature: CurvatureReport,
    pub verdict: Verdict,
    pub rho_iso: f64,
    pub tol_angle: f64,
}

impl ValidationReport {
    pub fn rule(&self, name: &str) -> Option<&RuleResult> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn failing_rules(&self) -> Vec<&str> {
        self.rules
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.as_str())
            .collect()
    }
}

/// Densification step used for classification.
fn classify_step(g: &SigmaGraph, r: f64, opts: &ValidatorOptions) -> f64 {
    if let Some(s) = opts.max_step {
        return s;
    }
    let diam = g.diameter();
    let mut h = (r / 20.0).min(diam / 100.0);
    // Cap the total sample count.
    let budget = g.total_length() / 2e5;
    if h < budget {
        h = budget;
    }
    h.max(1e-12)
}

fn median_chord(g: &SigmaGraph) -> f64 {
    let mut lens: Vec<f64> = g.segments().iter().map(|s| s.length()).collect();
    if lens.is_empty() {
        return 0.0;
    }
    lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lens[lens.len() / 2]
}

/// Geometric sample table of a graph with degrees, tangent rays and default
/// `S` labels; witness information is filled in by [`classify`] or injected
/// synthetically by fixtures.
pub fn structural_samples(g: &SigmaGraph) -> Vec<SampleInfo> {
    let mut samples = Vec::new();
    for v in &g.vertices {
        let mut rays = Vec::new();
        let mut residuals = Vec::new();
        let mut degree = 0usize;
        for e in &g.edges {
            let pts = e.points();
            if e.u == v.id {
                degree += 1;
                let (ray, res) = fit_ray(v.point(), &pts[1..pts.len().min(8)]);
                rays.push(ray);
                residuals.push(res);
            }
            if e.v == v.id {
                degree += 1;
                let lo = pts.len().saturating_sub(8);
                let window: Vec<Point> =
                    pts[lo..pts.len() - 1].iter().rev().cloned().collect();
                let (ray, res) = fit_ray(v.point(), &window);
                rays.push(ray);
                residuals.push(res);
            }
        }
        samples.push(SampleInfo {
            point: v.point(),
            location: SampleRef::Vertex { id: v.id },
            degree,
            rays,
            ray_residuals: residuals,
            label: PointLabel::S,
            witnesses: Vec::new(),
            isolation_robust: true,
        });
    }
    for (ei, e) in g.edges.iter().enumerate() {
        let pts = e.points();
        for i in 1..pts.len().saturating_sub(1) {
            let fwd: Vec<Point> = pts[(i + 1)..pts.len().min(i + 8)].to_vec();
            let back: Vec<Point> = pts[i.saturating_sub(7)..i].iter().rev().cloned().collect();
            let (r1, res1) = fit_ray(pts[i], &fwd);
            let (r2, res2) = fit_ray(pts[i], &back);
            samples.push(SampleInfo {
                point: pts[i],
                location: SampleRef::Interior { edge: ei, index: i },
                degree: 2,
                rays: vec![r1, r2],
                ray_residuals: vec![res1, res2],
                label: PointLabel::S,
                witnesses: Vec::new(),
                isolation_robust: true,
            });
        }
    }
    samples
}

/// Least-squares tangent ray at `x` through a window of nearby samples:
/// principal direction of the scatter, oriented toward the window mean.
/// Returns the unit ray and the relative fit residual.
fn fit_ray(x: Point, window: &[Point]) -> (Point, f64) {
    if window.is_empty() {
        return (Point::new(1.0, 0.0), 0.0);
    }
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    let mut mean = Point::new(0.0, 0.0);
    for p in window {
        let d = p.sub(x);
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
        mean = mean.add(d);
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let mut v = Point::new(theta.cos(), theta.sin());
    if v.dot(mean) < 0.0 {
        v = v.scale(-1.0);
    }
    let total: f64 = sxx + syy;
    let cross: f64 = window
        .iter()
        .map(|p| {
            let d = p.sub(x);
            let c = d.cross(v);
            c * c
        })
        .sum();
    let residual = if total > 0.0 { (cross / total).sqrt() } else { 0.0 };
    (v, residual)
}

/// Labels every Σ-sample of a densified copy of `g` under the cloud `m`.
pub fn classify(m: &PointCloud, g: &SigmaGraph, r: f64, opts: &ValidatorOptions) -> Result<Classification> {
    let eta = opts.eta.unwrap_or(ETA_REL * r);
    let step = classify_step(g, r, opts);
    let dense = g.densified(step);

    let res = energy_per_point(m, &dense)?;
    if res.value > r + eta {
        return Err(Error::Infeasible {
            energy: res.value,
            r,
            eta,
        });
    }
    let dists = res.per_point.expect("per-point distances requested");

    let mut samples = structural_samples(&dense);
    let points: Vec<Point> = samples.iter().map(|s| s.point).collect();
    let witnesses = find_energetic_for_samples(m, &dists, &points, r, eta)?;
    for w in &witnesses {
        samples[w.sample_index].witnesses.push(w.clone());
    }

    let actual_step = median_chord(&dense);
    let rho_iso = opts.rho_iso.unwrap_or(RHO_ISO_STEPS * actual_step);

    // X/E split by isolation among witnessed samples, via a grid whose 5x5
    // cell blocks cover the 2·rho_iso decision window.
    let witnessed: Vec<usize> = (0..samples.len())
        .filter(|&i| !samples[i].witnesses.is_empty())
        .collect();
    let cell = rho_iso.max(1e-12);
    let key_of = |p: Point| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: std::collections::BTreeMap<(i64, i64), Vec<usize>> =
        std::collections::BTreeMap::new();
    for &i in &witnessed {
        grid.entry(key_of(samples[i].point)).or_default().push(i);
    }
    for &i in &witnessed {
        let (cx, cy) = key_of(samples[i].point);
        let mut nearest = f64::INFINITY;
        'rings: for ring in 0i64..=2 {
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs().max(dy.abs()) != ring {
                        continue;
                    }
                    if let Some(list) = grid.get(&(cx + dx, cy + dy)) {
                        for &j in list {
                            if j != i {
                                nearest = nearest.min(samples[i].point.dist(samples[j].point));
                            }
                        }
                    }
                }
            }
            // A neighbour well inside the isolation radius settles the label.
            if nearest < 0.5 * rho_iso {
                break 'rings;
            }
        }
        samples[i].label = if nearest > rho_iso {
            PointLabel::X
        } else {
            PointLabel::E
        };
        samples[i].isolation_robust = !(0.5 * rho_iso <= nearest && nearest <= 2.0 * rho_iso);
    }

    Ok(Classification {
        samples,
        rho_iso,
        sample_step: actual_step,
        r,
        graph: dense,
    })
}

/// Runs the full rule set against a precomputed classification.
pub fn validate_classified(
    g: &SigmaGraph,
    cls: &Classification,
    opts: &ValidatorOptions,
) -> ValidationReport {
    let diam = cls.graph.diameter();
    let default_radii: Vec<f64> = [0.002, 0.005, 0.01, 0.05, 0.1]
        .iter()
        .map(|f| f * diam)
        .collect();
    let radii = opts.radii.clone().unwrap_or(default_radii);

    let mut rules = rules::structure_rules(g, cls, opts.tol_angle);
    let ahlfors = rules::check_ahlfors(&cls.graph, &radii, opts.tol_ahlfors);
    let curvature = rules::check_curvature_bound(cls, cls.r, opts.tol_kappa_rel / cls.r);
    rules.push(RuleResult {
        name: "ahlfors".into(),
        pass: ahlfors.pass,
        margin: ahlfors.margin,
        tolerance: opts.tol_ahlfors,
        offenders: ahlfors.offenders.clone(),
    });
    rules.push(RuleResult {
        name: "curvature".into(),
        pass: curvature.pass,
        margin: curvature.bound - curvature.max_abs_kappa,
        tolerance: opts.tol_kappa_rel / cls.r,
        offenders: curvature.offenders.clone(),
    });
    rules.sort_by(|a, b| a.name.cmp(&b.name));

    let any_fail = rules.iter().any(|r| !r.pass);
    let any_marginal = cls.samples.iter().any(|s| !s.isolation_robust);
    let verdict = if any_fail {
        Verdict::Fail
    } else if any_marginal {
        Verdict::Inconclusive
    } else {
        Verdict::Pass
    };
    ValidationReport {
        rules,
        ahlfors,
        curvature,
        verdict,
        rho_iso: cls.rho_iso,
        tol_angle: opts.tol_angle,
    }
}

/// Classification plus the full rule set in one call.
pub fn validate(
    m: &PointCloud,
    g: &SigmaGraph,
    r: f64,
    opts: &ValidatorOptions,
) -> Result<ValidationReport> {
    let cls = classify(m, g, r, opts)?;
    Ok(validate_classified(g, &cls, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minlab::trimmed_tree;
    use crate::sigma::graph_from_segments;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn classify_trimmed_segment() {
        let m = PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        let g = trimmed_tree(&m, 0.2).unwrap();
        let cls = classify(&m, &g, 0.2, &ValidatorOptions::default()).unwrap();
        let x_points: Vec<&SampleInfo> = cls
            .samples
            .iter()
            .filter(|s| s.label == PointLabel::X)
            .collect();
        assert_eq!(x_points.len(), 2);
        let mut xs: Vec<f64> = x_points.iter().map(|s| s.point.x).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((xs[0] - 0.2).abs() <= 1e-9);
        assert!((xs[1] - 0.8).abs() <= 1e-9);
        assert!(cls
            .samples
            .iter()
            .filter(|s| s.label != PointLabel::X)
            .all(|s| s.label == PointLabel::S));
    }

    #[test]
    fn classify_trimmed_tripod() {
        let m = PointCloud::finite(&[
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(0.5, 3.0f64.sqrt() / 2.0),
        ])
        .unwrap();
        let g = trimmed_tree(&m, 0.1).unwrap();
        let cls = classify(&m, &g, 0.1, &ValidatorOptions::default()).unwrap();
        let x_count = cls
            .samples
            .iter()
            .filter(|s| s.label == PointLabel::X)
            .count();
        assert_eq!(x_count, 3);
        // The branch vertex is non-energetic.
        let center = cls
            .samples
            .iter()
            .find(|s| s.degree == 3)
            .expect("tripod center");
        assert_eq!(center.label, PointLabel::S);
    }

    #[test]
    fn classify_concentric_arc_all_energetic() {
        let n = 4096;
        let r = 1.0;
        let m = PointCloud::circle(p(0.0, 0.0), 5.0, n, 0.0).unwrap();
        let pts: Vec<Point> = (0..=n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k % n) as f64 / n as f64;
                p(4.0 * t.cos(), 4.0 * t.sin())
            })
            .collect();
        let g = crate::sigma::graph_from_polyline(&pts, "concentric circle").unwrap();
        let cls = classify(&m, &g, r, &ValidatorOptions::default()).unwrap();
        assert!(cls
            .samples
            .iter()
            .all(|s| s.label == PointLabel::E), "all samples radially witnessed");
    }

    #[test]
    fn classify_requires_feasibility() {
        let m = PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0)]).unwrap();
        let g = graph_from_segments(&[(p(0.4, 0.0), p(0.6, 0.0))], "").unwrap();
        assert!(matches!(
            classify(&m, &g, 0.2, &ValidatorOptions::default()),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn rays_at_interior_samples_are_opposite() {
        let g = graph_from_segments(&[(p(0.0, 0.0), p(1.0, 0.0))], "")
            .unwrap()
            .densified(0.05);
        let samples = structural_samples(&g);
        for s in &samples {
            if let SampleRef::Interior { .. } = s.location {
                assert_eq!(s.rays.len(), 2);
                let dot = s.rays[0].dot(s.rays[1]);
                assert!(dot < -0.999, "rays should be opposite, dot = {dot}");
            }
        }
    }
}
