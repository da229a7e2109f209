//! Planar primitives shared by all modules: points, segments, circular arcs,
//! angles and distances.
//!
//! Everything is 64-bit floating point; exactness is replaced by explicit
//! tolerances surfaced in the reports that consume these primitives. Angles
//! between rays are always reduced to `[0, π]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Constructor that rejects non-finite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFiniteCoordinate(x, y));
        }
        Ok(Point { x, y })
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn add(&self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn sub(&self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(&self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the cross product, treating both points as vectors.
    pub fn cross(&self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn unit(&self) -> Option<Point> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }

    /// Rotates the vector by `theta` radians counterclockwise.
    pub fn rotate(&self, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Direction angle in `(-π, π]`.
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

/// A non-degenerate closed segment `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    /// Rejects degenerate (zero-length) segments.
    pub fn new(a: Point, b: Point) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::NonFiniteCoordinate(a.x, a.y));
        }
        if !b.is_finite() {
            return Err(Error::NonFiniteCoordinate(b.x, b.y));
        }
        if a.dist(b) == 0.0 {
            return Err(Error::DegenerateSegment(a.x, a.y));
        }
        Ok(Segment { a, b })
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Closest point of the segment to `p`, with its parameter `t ∈ [0, 1]`.
    pub fn closest_point(&self, p: Point) -> (f64, Point) {
        let e = self.b.sub(self.a);
        let t = (p.sub(self.a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
        (t, self.a.add(e.scale(t)))
    }
}

/// Winding direction of a circular arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Ccw,
    Cw,
}

/// A circular arc with positive sweep angle in `(0, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularArc {
    pub center: Point,
    pub radius: f64,
    pub theta_start: f64,
    pub theta_end: f64,
    pub orientation: Orientation,
}

impl CircularArc {
    pub fn new(
        center: Point,
        radius: f64,
        theta_start: f64,
        theta_end: f64,
        orientation: Orientation,
    ) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFiniteCoordinate(center.x, center.y));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArc(format!("radius must be positive, got {radius}")));
        }
        if !theta_start.is_finite() || !theta_end.is_finite() {
            return Err(Error::InvalidArc("non-finite angles".into()));
        }
        let arc = CircularArc {
            center,
            radius,
            theta_start,
            theta_end,
            orientation,
        };
        let sweep = arc.sweep();
        if !(sweep > 0.0 && sweep <= 2.0 * std::f64::consts::PI + 1e-12) {
            return Err(Error::InvalidArc(format!(
                "sweep angle must lie in (0, 2π], got {sweep}"
            )));
        }
        Ok(arc)
    }

    /// Sweep angle in `(0, 2π]`, measured along the arc's orientation.
    pub fn sweep(&self) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        let signed = match self.orientation {
            Orientation::Ccw => self.theta_end - self.theta_start,
            Orientation::Cw => self.theta_start - self.theta_end,
        };
        if signed == tau {
            return tau;
        }
        let m = signed.rem_euclid(tau);
        if m == 0.0 && signed != 0.0 {
            tau
        } else {
            m
        }
    }

    pub fn point_at(&self, theta: f64) -> Point {
        Point::new(
            self.center.x + self.radius * theta.cos(),
            self.center.y + self.radius * theta.sin(),
        )
    }
}

/// Minimal distance from `p` to the segment `s`.
pub fn dist_point_segment(p: Point, s: &Segment) -> f64 {
    let (_, c) = s.closest_point(p);
    p.dist(c)
}

/// Unsigned angle `∠avb` between the rays `v→a` and `v→b`, in `[0, π]`.
pub fn angle_between_rays(v: Point, a: Point, b: Point) -> Result<f64> {
    let u = a.sub(v);
    let w = b.sub(v);
    if u.norm() == 0.0 {
        return Err(Error::CoincidentPoints(format!(
            "ray endpoint a = ({}, {}) coincides with the vertex",
            a.x, a.y
        )));
    }
    if w.norm() == 0.0 {
        return Err(Error::CoincidentPoints(format!(
            "ray endpoint b = ({}, {}) coincides with the vertex",
            b.x, b.y
        )));
    }
    // atan2 of (cross, dot) is far more accurate near 0 and π than acos.
    Ok(u.cross(w).abs().atan2(u.dot(w)))
}

/// `n` points uniformly spaced in angle along the arc, endpoints included.
pub fn sample_arc(arc: &CircularArc, n: usize) -> Result<Vec<Point>> {
    if n < 2 {
        return Err(Error::TooFewSamples { need: 2, got: n });
    }
    let sweep = arc.sweep();
    let sign = match arc.orientation {
        Orientation::Ccw => 1.0,
        Orientation::Cw => -1.0,
    };
    let mut points = Vec::with_capacity(n);
    for i in 0..n {
        let theta = arc.theta_start + sign * sweep * (i as f64) / ((n - 1) as f64);
        points.push(arc.point_at(theta));
    }
    Ok(points)
}

/// Total chord length of a polyline.
pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Circumcenter of three points; `None` when they are collinear.
pub fn circumcenter(a: Point, b: Point, c: Point) -> Option<Point> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    if d == 0.0 {
        return None;
    }
    let a2 = a.x * a.x + a.y * a.y;
    let b2 = b.x * b.x + b.y * b.y;
    let c2 = c.x * c.x + c.y * c.y;
    let ux = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    let uy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    Some(Point::new(ux, uy))
}

/// Signed curvature of the circle through three consecutive points.
///
/// Returns 0 for collinear triples; the sign follows the turn direction
/// (positive for a left turn).
pub fn discrete_curvature(p0: Point, p1: Point, p2: Point) -> f64 {
    let a = p1.sub(p0);
    let b = p2.sub(p1);
    let cross = a.cross(b);
    let la = a.norm();
    let lb = b.norm();
    let lc = p2.dist(p0);
    let denom = la * lb * lc;
    if denom == 0.0 {
        return 0.0;
    }
    2.0 * cross / denom
}
