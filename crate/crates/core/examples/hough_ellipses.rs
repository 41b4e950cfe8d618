//! Randomized Hough transform on edge points of two ellipses plus clutter.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signscan::imaging::EdgeSet;
use signscan::rht::{rht_detect, verify_candidate, EllipseParams, RhtConfig};

fn outline(e: &EllipseParams) -> impl Iterator<Item = (i32, i32)> + '_ {
    let steps = (e.perimeter() * 8.0) as usize;
    (0..steps).map(move |i| {
        let (x, y) = e.point_at(i as f64 / steps as f64 * 2.0 * PI);
        (x.round() as i32, y.round() as i32)
    })
}

fn main() {
    let truth = [EllipseParams::new((60.0, 70.0), 28.0, 22.0, 0.4), EllipseParams::circle((150.0, 60.0), 18.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut pts: Vec<(i32, i32)> = truth.iter().flat_map(outline).collect();
    pts.extend((0..150).map(|_| (rng.random_range(0..200), rng.random_range(0..140))));
    let edges = EdgeSet::new(pts);

    let cfg = RhtConfig::default();
    for e in rht_detect(&edges, &cfg) {
        println!(
            "center ({:.2}, {:.2}) axes {:.2} x {:.2} theta {:.3} support {:.2}",
            e.center.0,
            e.center.1,
            e.semi_major,
            e.semi_minor,
            e.theta,
            verify_candidate(&edges, &e, cfg.support_eps)
        );
    }
}
