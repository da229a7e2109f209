//! Shared helpers for the criterion benchmarks.

use maxdist_core::energy::PointCloud;
use maxdist_core::geometry::Point;

/// Deterministic pseudo-random points in the unit square (splitmix-style).
pub fn scatter(n: usize, mut seed: u64) -> Vec<Point> {
    let mut next = move || {
        seed = seed.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = seed;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z = z ^ (z >> 31);
        (z >> 11) as f64 / (1u64 << 53) as f64
    };
    (0..n).map(|_| Point::new(next(), next())).collect()
}

pub fn circle_cloud(n: usize) -> PointCloud {
    PointCloud::circle(Point::new(0.0, 0.0), 5.0, n, 0.0).unwrap()
}
