//! Fixture constructions exercising the validator: positive cases that must
//! pass every rule, and negative cases that each violate exactly one rule.

use crate::energy::{EnergeticWitness, PointCloud};
use crate::error::Result;
use crate::geometry::Point;
use crate::sigma::{graph_from_polyline, graph_from_segments, SigmaGraph};
use crate::validator::{
    structural_samples, validate_classified, Classification, PointLabel, SampleRef,
    ValidationReport, ValidatorOptions,
};

use super::{horseshoe, trimmed_tree};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Two unit arms from the origin with the given opening angle, plus a cloud
/// making both tips and the corner energetic: witnesses beyond each tip and
/// one on the reflex side of the corner.
pub fn corner_fixture(opening: f64, r: f64) -> Result<(PointCloud, SigmaGraph)> {
    let dir1 = Point::new((opening / 2.0).cos(), (opening / 2.0).sin());
    let dir2 = Point::new((opening / 2.0).cos(), -(opening / 2.0).sin());
    let tip1 = dir1;
    let tip2 = dir2;
    let g = graph_from_segments(&[(p(0.0, 0.0), tip1), (p(0.0, 0.0), tip2)], "corner")?;
    let m = PointCloud::finite(&[
        tip1.add(dir1.scale(r)),
        tip2.add(dir2.scale(r)),
        p(-r, 0.0),
    ])?;
    Ok((m, g))
}

/// Closed concentric polygon (a cycle) under a circular cloud; feasible, and
/// every sample is radially witnessed.
pub fn cycle_fixture(big_r: f64, r: f64, n: usize) -> Result<(PointCloud, SigmaGraph)> {
    let m = PointCloud::circle(p(0.0, 0.0), big_r, n, 0.0)?;
    let rho = big_r - r;
    let tau = 2.0 * std::f64::consts::PI;
    let angle = |k: usize| tau * (k % n) as f64 / n as f64;
    let upper: Vec<Point> = (0..=n / 2)
        .map(|k| p(rho * angle(k).cos(), rho * angle(k).sin()))
        .collect();
    let lower: Vec<Point> = (n / 2..=n)
        .map(|k| p(rho * angle(k).cos(), rho * angle(k).sin()))
        .collect();
    let v0 = upper[0];
    let v1 = *upper.last().unwrap();
    let vertices = vec![
        crate::sigma::GraphVertex { id: 0, x: v0.x, y: v0.y },
        crate::sigma::GraphVertex { id: 1, x: v1.x, y: v1.y },
    ];
    let edges = vec![
        crate::sigma::GraphEdge {
            id: 0,
            u: 0,
            v: 1,
            polyline: upper.iter().map(|q| [q.x, q.y]).collect(),
        },
        crate::sigma::GraphEdge {
            id: 1,
            u: 1,
            v: 0,
            polyline: lower.iter().map(|q| [q.x, q.y]).collect(),
        },
    ];
    Ok((m, SigmaGraph::new(vertices, edges, "concentric cycle")?))
}

/// Four unit arms meeting at a degree-4 vertex, with tip witnesses.
pub fn cross_fixture(r: f64) -> Result<(PointCloud, SigmaGraph)> {
    let dirs = [p(1.0, 0.0), p(0.0, 1.0), p(-1.0, 0.0), p(0.0, -1.0)];
    let segs: Vec<(Point, Point)> = dirs.iter().map(|d| (p(0.0, 0.0), *d)).collect();
    let g = graph_from_segments(&segs, "degree-4 cross")?;
    let m = PointCloud::finite(
        &dirs
            .iter()
            .map(|d| d.add(d.scale(r)))
            .collect::<Vec<Point>>(),
    )?;
    Ok((m, g))
}

/// Discretized graph of `x² sin(1/x)` on a window right of zero, fine enough
/// that triples resolve the unbounded curvature oscillation.
pub fn oscillating_curve_graph() -> Result<SigmaGraph> {
    let step = 5e-4f64;
    let x0 = 0.07;
    let x1 = 0.30;
    let n = ((x1 - x0) / step).round() as usize;
    let pts: Vec<Point> = (0..=n)
        .map(|k| {
            let x = x0 + step * k as f64;
            p(x, x * x * (1.0 / x).sin())
        })
        .collect();
    graph_from_polyline(&pts, "x^2 sin(1/x)")
}

/// Synthetic classification of the oscillating curve: every interior sample
/// marked energetic with witnesses on both sides at distance exactly `r`.
///
/// The pinned-curve condition (two opposite empty balls) is not recoverable
/// from any finite cloud here, so the witnesses are injected directly.
pub fn oscillating_curve_classification(r: f64) -> Result<Classification> {
    let g = oscillating_curve_graph()?;
    let mut samples = structural_samples(&g);
    for (si, s) in samples.iter_mut().enumerate() {
        if let SampleRef::Interior { .. } = s.location {
            let tangent = s.rays[0];
            let normal = Point::new(-tangent.y, tangent.x);
            for (wi, side) in [1.0f64, -1.0].iter().enumerate() {
                let y = s.point.add(normal.scale(side * r));
                s.witnesses.push(EnergeticWitness {
                    x: s.point,
                    y,
                    slack: 0.0,
                    ball_clearance: 0.0,
                    sample_index: si,
                    point_index: wi,
                });
            }
            s.label = PointLabel::E;
        }
    }
    let step = 5e-4f64;
    Ok(Classification {
        samples,
        rho_iso: 20.0 * step,
        sample_step: step,
        r,
        graph: g,
    })
}

/// The positive fixture family; every report must pass all rules.
pub fn validate_example_suite() -> Result<Vec<(String, ValidationReport)>> {
    let opts = ValidatorOptions::default();
    let mut out = Vec::new();

    let m = PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0)])?;
    let g = trimmed_tree(&m, 0.2)?;
    out.push((
        "trimmed-segment".to_string(),
        crate::validator::validate(&m, &g, 0.2, &opts)?,
    ));

    let m = PointCloud::finite(&[p(0.0, 0.0), p(1.0, 0.0), p(0.5, 3.0f64.sqrt() / 2.0)])?;
    let g = trimmed_tree(&m, 0.1)?;
    out.push((
        "trimmed-tripod".to_string(),
        crate::validator::validate(&m, &g, 0.1, &opts)?,
    ));

    let (m, g) = corner_fixture(2.0 * std::f64::consts::PI / 3.0, 0.2)?;
    out.push((
        "corner-exact-120".to_string(),
        crate::validator::validate(&m, &g, 0.2, &opts)?,
    ));

    let (m, g) = corner_fixture((150.0f64).to_radians(), 0.2)?;
    out.push((
        "corner-wide-150".to_string(),
        crate::validator::validate(&m, &g, 0.2, &opts)?,
    ));

    let (m, g, _) = horseshoe(5.0, 1.0, 5000)?;
    out.push((
        "horseshoe".to_string(),
        crate::validator::validate(&m, &g, 1.0, &opts)?,
    ));

    Ok(out)
}

/// Negative fixtures, each annotated with the single rule it must violate.
pub fn negative_example_suite() -> Result<Vec<(String, ValidationReport, String)>> {
    let opts = ValidatorOptions::default();
    let mut out = Vec::new();

    let (m, g) = cycle_fixture(5.0, 1.0, 8192)?;
    out.push((
        "cycle-circle".to_string(),
        crate::validator::validate(&m, &g, 1.0, &opts)?,
        "R1-acyclic".to_string(),
    ));

    let (m, g) = cross_fixture(0.2)?;
    out.push((
        "cross-degree-4".to_string(),
        crate::validator::validate(&m, &g, 0.2, &opts)?,
        "R2-degree".to_string(),
    ));

    let (m, g) = corner_fixture(std::f64::consts::FRAC_PI_2, 0.2)?;
    out.push((
        "corner-90".to_string(),
        crate::validator::validate(&m, &g, 0.2, &opts)?,
        "R3-angles".to_string(),
    ));

    let r = 1.0;
    let cls = oscillating_curve_classification(r)?;
    let g = cls.graph.clone();
    out.push((
        "oscillating-curve".to_string(),
        validate_classified(&g, &cls, &opts),
        "curvature".to_string(),
    ));

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validator::Verdict;

    #[test]
    fn positive_suite_all_pass() {
        for (name, report) in validate_example_suite().unwrap() {
            assert_eq!(
                report.verdict,
                Verdict::Pass,
                "fixture {name} failed rules {:?}",
                report.failing_rules()
            );
        }
    }

    #[test]
    fn negative_suite_fails_exactly_cited_rule() {
        for (name, report, expected) in negative_example_suite().unwrap() {
            assert_eq!(report.verdict, Verdict::Fail, "fixture {name} should fail");
            let failing = report.failing_rules();
            assert_eq!(
                failing,
                vec![expected.as_str()],
                "fixture {name} failed {failing:?}, expected only {expected}"
            );
        }
    }

    #[test]
    fn horseshoe_curvature_matches_arc() {
        let (m, g, params) = horseshoe(5.0, 1.0, 5000).unwrap();
        let report =
            crate::validator::validate(&m, &g, 1.0, &ValidatorOptions::default()).unwrap();
        let expected = 1.0 / (params.circle_radius - params.r);
        assert!(
            (report.curvature.max_abs_kappa - expected).abs() <= 1e-3,
            "kappa = {}",
            report.curvature.max_abs_kappa
        );
        assert!(report.curvature.max_abs_kappa <= 1.0 / params.r);
    }
}
