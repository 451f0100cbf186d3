//! 2D primitives and clearance predicates.
//!
//! Coordinates are meters in a local east/north frame. Every obstacle is
//! convex (circle or axis-aligned rectangle), so clearances reduce to closed
//! forms: no sampling anywhere in this module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn sub(self, other: Point2D) -> (f64, f64) {
        (self.x - other.x, self.y - other.y)
    }
}

impl From<[f64; 2]> for Point2D {
    fn from([x, y]: [f64; 2]) -> Self {
        Self { x, y }
    }
}

impl From<Point2D> for [f64; 2] {
    fn from(p: Point2D) -> Self {
        [p.x, p.y]
    }
}

/// A straight flight leg. Zero-length segments cannot be built.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment2D {
    a: Point2D,
    b: Point2D,
}

impl Segment2D {
    pub fn new(a: Point2D, b: Point2D) -> Result<Self> {
        if a == b {
            return Err(Error::Degenerate(format!(
                "zero-length segment at ({}, {})",
                a.x, a.y
            )));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> Point2D {
        self.a
    }

    pub fn b(&self) -> Point2D {
        self.b
    }

    pub fn length(&self) -> f64 {
        distance(self.a, self.b)
    }

    /// Point at parameter `t` in [0, 1] along the segment.
    pub fn at(&self, t: f64) -> Point2D {
        Point2D::new(
            self.a.x + t * (self.b.x - self.a.x),
            self.a.y + t * (self.b.y - self.a.y),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Obstacle {
    Circle { center: Point2D, radius: f64 },
    Rect { min: Point2D, max: Point2D },
}

impl Obstacle {
    pub fn circle(center: Point2D, radius: f64) -> Result<Self> {
        if !center.is_finite() || !(radius.is_finite() && radius > 0.0) {
            return Err(Error::Degenerate(format!(
                "circle radius must be positive and finite, got {radius}"
            )));
        }
        Ok(Obstacle::Circle { center, radius })
    }

    pub fn rect(min: Point2D, max: Point2D) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || min.x >= max.x || min.y >= max.y {
            return Err(Error::Degenerate(format!(
                "rectangle min ({}, {}) must be strictly below max ({}, {})",
                min.x, min.y, max.x, max.y
            )));
        }
        Ok(Obstacle::Rect { min, max })
    }

    fn corners(min: Point2D, max: Point2D) -> [Point2D; 4] {
        [
            min,
            Point2D::new(max.x, min.y),
            max,
            Point2D::new(min.x, max.y),
        ]
    }
}

pub fn distance(a: Point2D, b: Point2D) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Unsigned heading change in degrees when flying h → i → j.
pub fn turn_angle_deg(h: Point2D, i: Point2D, j: Point2D) -> Result<f64> {
    if h == i || i == j {
        return Err(Error::Degenerate(
            "turn angle needs h != i and i != j".to_string(),
        ));
    }
    Ok(turn_angle_unchecked(h, i, j))
}

/// Same as [`turn_angle_deg`] without the degeneracy check. Returns 0 for
/// degenerate input.
pub(crate) fn turn_angle_unchecked(h: Point2D, i: Point2D, j: Point2D) -> f64 {
    let (ux, uy) = i.sub(h);
    let (vx, vy) = j.sub(i);
    let cross = ux * vy - uy * vx;
    let dot = ux * vx + uy * vy;
    cross.abs().atan2(dot).to_degrees()
}

/// Distance from `p` to the closest point of `seg`.
fn point_segment_distance(p: Point2D, seg: &Segment2D) -> f64 {
    let (dx, dy) = seg.b.sub(seg.a);
    let (px, py) = p.sub(seg.a);
    let len2 = dx * dx + dy * dy;
    let t = ((px * dx + py * dy) / len2).clamp(0.0, 1.0);
    distance(p, seg.at(t))
}

/// Distance from `p` to the obstacle; 0 inside or on the boundary.
pub fn point_clearance(p: Point2D, obs: &Obstacle) -> f64 {
    match *obs {
        Obstacle::Circle { center, radius } => (distance(p, center) - radius).max(0.0),
        Obstacle::Rect { min, max } => {
            let dx = (min.x - p.x).max(p.x - max.x).max(0.0);
            let dy = (min.y - p.y).max(p.y - max.y).max(0.0);
            dx.hypot(dy)
        }
    }
}

/// Liang–Barsky clip of the segment against the closed rectangle.
fn segment_hits_rect(seg: &Segment2D, min: Point2D, max: Point2D) -> bool {
    let (dx, dy) = seg.b.sub(seg.a);
    let mut t0 = 0.0_f64;
    let mut t1 = 1.0_f64;
    let checks = [
        (-dx, seg.a.x - min.x),
        (dx, max.x - seg.a.x),
        (-dy, seg.a.y - min.y),
        (dy, max.y - seg.a.y),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

/// Minimum distance between any point of `seg` and the obstacle; 0 when the
/// segment touches or enters it.
pub fn min_clearance(seg: &Segment2D, obs: &Obstacle) -> f64 {
    match *obs {
        Obstacle::Circle { center, radius } => {
            (point_segment_distance(center, seg) - radius).max(0.0)
        }
        Obstacle::Rect { min, max } => {
            if segment_hits_rect(seg, min, max) {
                return 0.0;
            }
            // Disjoint convex sets: the gap is realized at a vertex of one of them.
            let from_ends = point_clearance(seg.a, obs).min(point_clearance(seg.b, obs));
            Obstacle::corners(min, max)
                .iter()
                .map(|&c| point_segment_distance(c, seg))
                .fold(from_ends, f64::min)
        }
    }
}

fn orientation(a: Point2D, b: Point2D, c: Point2D) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn within_box(a: Point2D, b: Point2D, p: Point2D) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, touching and collinear overlap included.
pub fn segments_intersect(s: &Segment2D, t: &Segment2D) -> bool {
    let d1 = orientation(t.a, t.b, s.a);
    let d2 = orientation(t.a, t.b, s.b);
    let d3 = orientation(s.a, s.b, t.a);
    let d4 = orientation(s.a, s.b, t.b);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && within_box(t.a, t.b, s.a))
        || (d2 == 0.0 && within_box(t.a, t.b, s.b))
        || (d3 == 0.0 && within_box(s.a, s.b, t.a))
        || (d4 == 0.0 && within_box(s.a, s.b, t.b))
}
