//! Independent oracles for the Steiner solvers.
//!
//! The oracles here deliberately avoid the library's construction path:
//! Weiszfeld iteration for the three-point junction, and a plain
//! coordinate-descent length minimization over explicit four-point
//! topologies for the square.

use maxdist_core::geometry::Point;
use maxdist_core::steiner::{steiner_3, steiner_exact};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Total three-point Steiner length via Weiszfeld iteration on the junction.
///
/// If some vertex satisfies the local optimality condition
/// `|sum of unit vectors to the other two| <= 1`, the junction is that vertex.
fn weiszfeld_length(pts: [Point; 3]) -> f64 {
    for i in 0..3 {
        let v = pts[i];
        let mut s = Point::new(0.0, 0.0);
        for j in 0..3 {
            if j != i {
                s = s.add(pts[j].sub(v).unit().expect("distinct points"));
            }
        }
        if s.norm() <= 1.0 {
            let others: Vec<&Point> = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q).collect();
            return v.dist(*others[0]) + v.dist(*others[1]);
        }
    }
    let mut y = pts
        .iter()
        .fold(Point::new(0.0, 0.0), |acc, q| acc.add(*q))
        .scale(1.0 / 3.0);
    for _ in 0..100_000 {
        let mut num = Point::new(0.0, 0.0);
        let mut den = 0.0;
        for q in &pts {
            let d = y.dist(*q).max(1e-300);
            num = num.add(q.scale(1.0 / d));
            den += 1.0 / d;
        }
        let next = num.scale(1.0 / den);
        let step = y.dist(next);
        y = next;
        if step <= 1e-15 {
            break;
        }
    }
    pts.iter().map(|q| y.dist(*q)).sum()
}

#[test]
fn steiner_3_matches_weiszfeld_on_random_triangles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 1000 {
        let pts = [
            p(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
            p(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
            p(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
        ];
        if pts[0].dist(pts[1]) < 1e-6 || pts[1].dist(pts[2]) < 1e-6 || pts[0].dist(pts[2]) < 1e-6 {
            continue;
        }
        let t = steiner_3(pts[0], pts[1], pts[2]).unwrap();
        let oracle = weiszfeld_length(pts);
        assert!(
            (t.length - oracle).abs() <= 1e-9,
            "triangle {pts:?}: {} vs oracle {}",
            t.length,
            oracle
        );
        checked += 1;
    }
}

#[test]
fn wide_angle_triangles_have_no_junction() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut seen = 0;
    while seen < 200 {
        let pts = [
            p(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
            p(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
            p(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)),
        ];
        if pts[0].dist(pts[1]) < 1e-6 || pts[1].dist(pts[2]) < 1e-6 || pts[0].dist(pts[2]) < 1e-6 {
            continue;
        }
        let max_angle = max_triangle_angle(pts);
        if max_angle < 2.0 * std::f64::consts::PI / 3.0 {
            continue;
        }
        let t = steiner_3(pts[0], pts[1], pts[2]).unwrap();
        assert!(t.steiner_points.is_empty(), "triangle {pts:?}");
        seen += 1;
    }
}

fn max_triangle_angle(pts: [Point; 3]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..3 {
        let v = pts[i];
        let a = pts[(i + 1) % 3].sub(v);
        let b = pts[(i + 2) % 3].sub(v);
        best = best.max(a.cross(b).abs().atan2(a.dot(b)));
    }
    best
}

/// Coordinate-descent oracle for the unit square over both sensible
/// two-junction pairings (vertical and horizontal), written independently of
/// the library's Melzak path.
#[test]
fn unit_square_matches_descent_oracle() {
    let corners = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];

    // Pairing A: s1 joins corners 0, 1; s2 joins corners 2, 3.
    // Pairing B: s1 joins corners 1, 2; s2 joins corners 3, 0.
    let mut best = f64::INFINITY;
    for pairing in [[(0, 1), (2, 3)], [(1, 2), (3, 0)]] {
        let mut s1 = p(0.5, 0.3);
        let mut s2 = p(0.5, 0.7);
        for _ in 0..20_000 {
            s1 = fermat_oracle(corners[pairing[0].0], corners[pairing[0].1], s2);
            s2 = fermat_oracle(corners[pairing[1].0], corners[pairing[1].1], s1);
        }
        let len = s1.dist(corners[pairing[0].0])
            + s1.dist(corners[pairing[0].1])
            + s2.dist(corners[pairing[1].0])
            + s2.dist(corners[pairing[1].1])
            + s1.dist(s2);
        best = best.min(len);
    }
    let expected = 1.0 + 3.0f64.sqrt();
    assert!((best - expected).abs() <= 1e-9, "oracle {best}");

    let t = steiner_exact(&corners).unwrap();
    assert!((t.length - expected).abs() <= 1e-9);
    assert!((t.length - best).abs() <= 1e-9);
}

/// Weiszfeld step specialized to three anchors, used only by the oracle.
fn fermat_oracle(a: Point, b: Point, c: Point) -> Point {
    let pts = [a, b, c];
    for i in 0..3 {
        let v = pts[i];
        let mut s = Point::new(0.0, 0.0);
        let mut ok = true;
        for j in 0..3 {
            if j != i {
                match pts[j].sub(v).unit() {
                    Some(u) => s = s.add(u),
                    None => ok = false,
                }
            }
        }
        if ok && s.norm() <= 1.0 {
            return v;
        }
    }
    let mut y = a.add(b).add(c).scale(1.0 / 3.0);
    for _ in 0..200 {
        let mut num = Point::new(0.0, 0.0);
        let mut den = 0.0;
        for q in &pts {
            let d = y.dist(*q).max(1e-300);
            num = num.add(q.scale(1.0 / d));
            den += 1.0 / d;
        }
        y = num.scale(1.0 / den);
    }
    y
}
