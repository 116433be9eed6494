//! Planar geometric kernel shared by every navigation law: arc-length
//! parameterized curves, curvilinear coordinates, chord distances,
//! tangent/visibility queries and inter-obstacle gaps.

mod curve;
mod obstacle;

pub use curve::{polar_arc_length, ConvexRegion, ParamCurve};
pub use obstacle::{obstacle_gap, visible_extremes, Obstacle, ObstacleShape, VisibleArc};

use serde::{Deserialize, Serialize};

/// Planar point, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(&self, other: Point2) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn add(&self, v: Vec2) -> Point2 {
        Point2::new(self.x + v.x, self.y + v.y)
    }

    pub fn to_vec(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Planar vector, meters (or meters/second when used as a velocity).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn from_points(from: Point2, to: Point2) -> Vec2 {
        Vec2::new(to.x - from.x, to.y - from.y)
    }

    pub fn from_angle(theta: f64) -> Vec2 {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }

    pub fn dot(&self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(&self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn scale(&self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }

    pub fn plus(&self, other: Vec2) -> Vec2 {
        Vec2::new(self.x + other.x, self.y + other.y)
    }

    pub fn minus(&self, other: Vec2) -> Vec2 {
        Vec2::new(self.x - other.x, self.y - other.y)
    }

    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Unit vector, or zero when the norm underflows.
    pub fn normalized(&self) -> Vec2 {
        let n = self.norm();
        if n < 1e-300 {
            Vec2::ZERO
        } else {
            self.scale(1.0 / n)
        }
    }

    /// Rotate counter-clockwise by `theta` radians.
    pub fn rotated(&self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn perp(&self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }
}

/// Euclidean chord length between two planar points.
pub fn chord_length(x: Point2, p: Point2) -> f64 {
    x.dist(p)
}

/// Distance from `p` to the closed segment `[a, b]`, plus the closest point.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> (f64, Point2) {
    let ab = Vec2::from_points(a, b);
    let ap = Vec2::from_points(a, p);
    let len2 = ab.dot(ab);
    let t = if len2 <= 0.0 {
        0.0
    } else {
        (ap.dot(ab) / len2).clamp(0.0, 1.0)
    };
    let q = a.add(ab.scale(t));
    (p.dist(q), q)
}

/// Minimum distance between two closed segments.
pub fn segment_segment_distance(
    a1: Point2,
    a2: Point2,
    b1: Point2,
    b2: Point2,
) -> (f64, Point2, Point2) {
    // Endpoint-to-segment projections cover the minimum for non-crossing segments.
    let mut best = (f64::INFINITY, a1, b1);
    for &(p, s1, s2, p_on_a) in &[
        (a1, b1, b2, true),
        (a2, b1, b2, true),
        (b1, a1, a2, false),
        (b2, a1, a2, false),
    ] {
        let (d, q) = point_segment_distance(p, s1, s2);
        if d < best.0 {
            best = if p_on_a { (d, p, q) } else { (d, q, p) };
        }
    }
    if segments_intersect(a1, a2, b1, b2) {
        let p = segment_intersection_point(a1, a2, b1, b2).unwrap_or(a1);
        return (0.0, p, p);
    }
    best
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    Vec2::from_points(a, b).cross(Vec2::from_points(a, c))
}

pub fn segments_intersect(a1: Point2, a2: Point2, b1: Point2, b2: Point2) -> bool {
    let d1 = orient(b1, b2, a1);
    let d2 = orient(b1, b2, a2);
    let d3 = orient(a1, a2, b1);
    let d4 = orient(a1, a2, b2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point2, q: Point2, r: Point2| {
        orient(p, q, r).abs() < 1e-12
            && r.x >= p.x.min(q.x) - 1e-12
            && r.x <= p.x.max(q.x) + 1e-12
            && r.y >= p.y.min(q.y) - 1e-12
            && r.y <= p.y.max(q.y) + 1e-12
    };
    on(b1, b2, a1) || on(b1, b2, a2) || on(a1, a2, b1) || on(a1, a2, b2)
}

/// Intersection point of two segments, when they properly cross.
pub fn segment_intersection_point(
    a1: Point2,
    a2: Point2,
    b1: Point2,
    b2: Point2,
) -> Option<Point2> {
    let r = Vec2::from_points(a1, a2);
    let s = Vec2::from_points(b1, b2);
    let denom = r.cross(s);
    if denom.abs() < 1e-300 {
        return None;
    }
    let qp = Vec2::from_points(a1, b1);
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    if (-1e-12..=1.0 + 1e-12).contains(&t) && (-1e-12..=1.0 + 1e-12).contains(&u) {
        Some(a1.add(r.scale(t)))
    } else {
        None
    }
}
