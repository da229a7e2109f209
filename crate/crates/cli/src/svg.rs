//! Deterministic SVG emission: cloud points as dots, Σ as strokes, witness
//! balls as circles of radius `r`. Identical inputs produce byte-identical
//! documents; coordinates carry 9 significant digits.

use maxdist_core::energy::{EnergeticWitness, PointCloud};
use maxdist_core::geometry::Point;
use maxdist_core::sigma::SigmaGraph;

/// Formats with 9 significant digits; the shortest round-trip printing of the
/// rounded value keeps output stable across platforms.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(8 - mag);
    let y = (x * scale).round() / scale;
    format!("{y}")
}

struct Bounds {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Bounds {
    fn new() -> Self {
        Bounds {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        }
    }

    fn feed(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    fn feed_circle(&mut self, x: f64, y: f64, r: f64) {
        self.feed(x - r, y - r);
        self.feed(x + r, y + r);
    }
}

/// Scene renderer. The y axis is flipped at emission so the figure reads in
/// mathematical orientation.
pub fn render_svg(
    m: Option<&PointCloud>,
    g: Option<&SigmaGraph>,
    witnesses: &[EnergeticWitness],
    ball_radius: Option<f64>,
) -> String {
    let flip = |p: Point| (p.x, -p.y);
    let mut b = Bounds::new();
    if let Some(cloud) = m {
        for i in 0..cloud.len() {
            let (x, y) = flip(cloud.point(i));
            b.feed(x, y);
        }
    }
    if let Some(graph) = g {
        for e in &graph.edges {
            for p in e.points() {
                let (x, y) = flip(p);
                b.feed(x, y);
            }
        }
        for v in &graph.vertices {
            let (x, y) = flip(v.point());
            b.feed(x, y);
        }
    }
    if let Some(r) = ball_radius {
        for w in witnesses {
            let (x, y) = flip(w.y);
            b.feed_circle(x, y, r);
        }
    }
    if !b.min_x.is_finite() {
        b = Bounds::new();
        b.feed(0.0, 0.0);
        b.feed(1.0, 1.0);
    }
    let width = (b.max_x - b.min_x).max(1e-9);
    let height = (b.max_y - b.min_y).max(1e-9);
    let margin = 0.1 * width.max(height);
    let vb = (
        b.min_x - margin,
        b.min_y - margin,
        width + 2.0 * margin,
        height + 2.0 * margin,
    );
    let unit = width.max(height) + 2.0 * margin;
    let stroke = 0.003 * unit;
    let dot = 0.004 * unit;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        sig9(vb.0),
        sig9(vb.1),
        sig9(vb.2),
        sig9(vb.3)
    ));

    if let Some(r) = ball_radius {
        for w in witnesses {
            let (x, y) = flip(w.y);
            out.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"none\" stroke=\"#7f7fff\" stroke-width=\"{}\"/>\n",
                sig9(x),
                sig9(y),
                sig9(r),
                sig9(0.5 * stroke)
            ));
        }
    }

    if let Some(graph) = g {
        for e in &graph.edges {
            let pts = e.points();
            if pts.len() == 2 {
                let (x1, y1) = flip(pts[0]);
                let (x2, y2) = flip(pts[1]);
                out.push_str(&format!(
                    "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#202020\" stroke-width=\"{}\"/>\n",
                    sig9(x1),
                    sig9(y1),
                    sig9(x2),
                    sig9(y2),
                    sig9(stroke)
                ));
            } else {
                let mut d = String::new();
                for (i, p) in pts.iter().enumerate() {
                    let (x, y) = flip(*p);
                    if i == 0 {
                        d.push_str(&format!("M {} {}", sig9(x), sig9(y)));
                    } else {
                        d.push_str(&format!(" L {} {}", sig9(x), sig9(y)));
                    }
                }
                out.push_str(&format!(
                    "  <path d=\"{d}\" fill=\"none\" stroke=\"#202020\" stroke-width=\"{}\"/>\n",
                    sig9(stroke)
                ));
            }
        }
    }

    if let Some(cloud) = m {
        for i in 0..cloud.len() {
            let (x, y) = flip(cloud.point(i));
            out.push_str(&format!(
                "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#d04040\"/>\n",
                sig9(x),
                sig9(y),
                sig9(dot)
            ));
        }
    }

    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxdist_core::sigma::graph_from_segments;

    #[test]
    fn sig9_examples() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(std::f64::consts::PI), "3.14159265");
        assert_eq!(sig9(-0.25), "-0.25");
        assert_eq!(sig9(123456789.123), "123456789");
    }

    #[test]
    fn dot_count_matches_cloud() {
        let m = PointCloud::finite(&[
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.5, 1.0),
        ])
        .unwrap();
        let svg = render_svg(Some(&m), None, &[], None);
        assert_eq!(svg.matches("<circle").count(), 3);
    }

    #[test]
    fn byte_identical_rerender() {
        let m = PointCloud::circle(Point::new(0.0, 0.0), 2.0, 64, 0.1).unwrap();
        let g = graph_from_segments(
            &[(Point::new(-1.0, 0.0), Point::new(1.0, 0.25))],
            "seg",
        )
        .unwrap();
        let a = render_svg(Some(&m), Some(&g), &[], Some(0.5));
        let b = render_svg(Some(&m), Some(&g), &[], Some(0.5));
        assert_eq!(a, b);
    }
}
