//! Regenerates the committed golden SVG for the render test.

use maxdist_cli::svg::render_svg;
use maxdist_core::energy::{find_energetic, PointCloud, ETA_REL};
use maxdist_core::geometry::Point;
use maxdist_core::minlab::trimmed_tree;

fn main() {
    let m = PointCloud::finite(&[
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(0.5, 0.75),
    ])
    .unwrap();
    let g = trimmed_tree(&m, 0.1).unwrap();
    let witnesses = find_energetic(&m, &g, 0.1, ETA_REL * 0.1).unwrap();
    let doc = render_svg(Some(&m), Some(&g), &witnesses, Some(0.1));
    print!("{doc}");
}
