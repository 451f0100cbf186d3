//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code paths it is used to check.

#![allow(dead_code)]

use farmcover::geometry::{point_clearance, Obstacle, Point2D, Segment2D};
use farmcover::world::{load_map, FarmMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Minimum obstacle clearance along a segment by dense sampling followed by
/// ternary refinement. Clearance to a convex set is convex along a line, so
/// the refinement converges to the true minimum.
pub fn sampled_min_clearance(seg: &Segment2D, obs: &Obstacle) -> f64 {
    const SAMPLES: usize = 2000;
    let f = |t: f64| point_clearance(seg.at(t), obs);
    let (mut best_k, mut best) = (0, f64::INFINITY);
    for k in 0..=SAMPLES {
        let v = f(k as f64 / SAMPLES as f64);
        if v < best {
            best = v;
            best_k = k;
        }
    }
    let mut lo = (best_k.saturating_sub(1)) as f64 / SAMPLES as f64;
    let mut hi = ((best_k + 1).min(SAMPLES)) as f64 / SAMPLES as f64;
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best.min(f(0.5 * (lo + hi)))
}

/// Distance / turn / cost of a polyline computed from scratch with acos.
pub fn polyline_cost(points: &[Point2D], lambda: f64, gamma: f64) -> (f64, f64, f64) {
    let mut d = 0.0;
    for w in points.windows(2) {
        d += ((w[1].x - w[0].x).powi(2) + (w[1].y - w[0].y).powi(2)).sqrt();
    }
    let mut theta = 0.0;
    for w in points.windows(3) {
        let (ux, uy) = (w[1].x - w[0].x, w[1].y - w[0].y);
        let (vx, vy) = (w[2].x - w[1].x, w[2].y - w[1].y);
        let c = (ux * vx + uy * vy) / ((ux * ux + uy * uy).sqrt() * (vx * vx + vy * vy).sqrt());
        theta += c.clamp(-1.0, 1.0).acos().to_degrees();
    }
    (d, theta, lambda * d + gamma * theta)
}

/// All orderings of `items` (Heap's algorithm).
pub fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a = items.to_vec();
    let mut out = Vec::new();
    heap(a.len(), &mut a, &mut out);
    out
}

pub fn random_point(r: &mut ChaCha8Rng, span: f64) -> Point2D {
    Point2D::new(r.gen_range(-span..span), r.gen_range(-span..span))
}

pub fn random_obstacle(r: &mut ChaCha8Rng, span: f64) -> Obstacle {
    if r.gen_bool(0.5) {
        Obstacle::circle(random_point(r, span), r.gen_range(0.5..span / 4.0)).unwrap()
    } else {
        let a = random_point(r, span);
        let w = r.gen_range(0.5..span / 3.0);
        let h = r.gen_range(0.5..span / 3.0);
        Obstacle::rect(a, Point2D::new(a.x + w, a.y + h)).unwrap()
    }
}

pub fn random_segment(r: &mut ChaCha8Rng, span: f64) -> Segment2D {
    loop {
        if let Ok(s) = Segment2D::new(random_point(r, span), random_point(r, span)) {
            return s;
        }
    }
}

/// A small obstacle-free map whose grid has between 1 and `max_points`
/// waypoints; station somewhere inside the perimeter.
pub fn random_open_map(r: &mut ChaCha8Rng, max_points: usize) -> FarmMap {
    loop {
        let cols = r.gen_range(1..=4usize);
        let rows = r.gen_range(1..=3usize);
        if cols * rows > max_points || cols * rows < 2 {
            continue;
        }
        let spacing = r.gen_range(20.0..60.0);
        let w = (cols - 1) as f64 * spacing + r.gen_range(0.0..spacing * 0.9);
        let h = (rows - 1) as f64 * spacing + r.gen_range(0.0..spacing * 0.9);
        let (w, h) = (w.max(1.0), h.max(1.0));
        let sx = r.gen_range(0.0..w);
        let sy = r.gen_range(0.0..h);
        let doc = format!(
            r#"{{"perimeter": {{"min": [0, 0], "max": [{w}, {h}]}}, "obstacles": [],
                "stations": [[{sx}, {sy}]], "clearance_m": 5, "grid_spacing_m": {spacing}}}"#
        );
        return load_map(&doc).unwrap();
    }
}

/// A map with a few random trees and sheds; may or may not be connected.
pub fn random_cluttered_map(r: &mut ChaCha8Rng) -> FarmMap {
    loop {
        let w = r.gen_range(80.0..200.0);
        let h = r.gen_range(60.0..150.0);
        let mut obstacles = Vec::new();
        for _ in 0..r.gen_range(1..5) {
            if r.gen_bool(0.5) {
                obstacles.push(format!(
                    r#"{{"type": "circle", "center": [{}, {}], "radius": {}}}"#,
                    r.gen_range(0.0..w),
                    r.gen_range(0.0..h),
                    r.gen_range(2.0..10.0)
                ));
            } else {
                let x = r.gen_range(0.0..w);
                let y = r.gen_range(0.0..h);
                obstacles.push(format!(
                    r#"{{"type": "rect", "min": [{x}, {y}], "max": [{}, {}]}}"#,
                    x + r.gen_range(3.0..25.0),
                    y + r.gen_range(3.0..25.0)
                ));
            }
        }
        let doc = format!(
            r#"{{"perimeter": {{"min": [0, 0], "max": [{w}, {h}]}}, "obstacles": [{}],
                "stations": [[{}, {}]], "clearance_m": {}, "grid_spacing_m": {}}}"#,
            obstacles.join(","),
            r.gen_range(0.0..w),
            r.gen_range(0.0..h),
            r.gen_range(2.0..10.0),
            r.gen_range(20.0..40.0)
        );
        if let Ok(m) = load_map(&doc) {
            return m;
        }
    }
}
