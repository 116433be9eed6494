//! Arc-length parameterized curves and convex regions.
//!
//! Curves are dense polylines with precomputed cumulative arc length;
//! analytic pieces (circle arcs, polar graphs) are sampled at a configurable
//! resolution so straight, curved and ring boundaries get uniform treatment.

use super::{point_segment_distance, Point2, Vec2};
use crate::error::GeomError;
use serde::{Deserialize, Serialize};

/// Default polyline spacing for sampled analytic pieces, as a fraction of
/// total length.
pub const DEFAULT_SAMPLE_SPACING: f64 = 1e-3;

/// Tolerance multiplier for `arc_coord` on off-curve points.
pub const OFF_CURVE_TOL: f64 = 1e-6;

/// Piecewise-linear planar curve parameterized by arc length.
///
/// `arc_coord(P1) = 0` and `arc_coord(P2) = L`; the arc coordinate increases
/// strictly along traversal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamCurve {
    points: Vec<Point2>,
    cum: Vec<f64>,
    total: f64,
}

impl ParamCurve {
    /// Build from an explicit polyline. Consecutive duplicate points are
    /// collapsed; at least two distinct points are required.
    pub fn from_polyline(raw: &[Point2]) -> Result<ParamCurve, GeomError> {
        let mut points: Vec<Point2> = Vec::with_capacity(raw.len());
        for &p in raw {
            if !p.is_finite() {
                return Err(GeomError::NonFinite);
            }
            if points.last().is_none_or(|q| q.dist(p) > 0.0) {
                points.push(p);
            }
        }
        if points.len() < 2 {
            return Err(GeomError::DegenerateCurve);
        }
        let mut cum = Vec::with_capacity(points.len());
        cum.push(0.0);
        let mut total = 0.0;
        for w in points.windows(2) {
            total += w[0].dist(w[1]);
            cum.push(total);
        }
        Ok(ParamCurve { points, cum, total })
    }

    /// Straight segment from `p1` to `p2`.
    pub fn line(p1: Point2, p2: Point2) -> Result<ParamCurve, GeomError> {
        ParamCurve::from_polyline(&[p1, p2])
    }

    /// Circle arc, counter-clockwise from `a0` to `a1` (radians), sampled at
    /// the default resolution.
    pub fn circle_arc(
        center: Point2,
        radius: f64,
        a0: f64,
        a1: f64,
    ) -> Result<ParamCurve, GeomError> {
        if radius <= 0.0 {
            return Err(GeomError::BadRadius(radius));
        }
        let sweep = a1 - a0;
        if sweep <= 0.0 {
            return Err(GeomError::DegenerateCurve);
        }
        let n = ((sweep / DEFAULT_SAMPLE_SPACING).ceil() as usize).clamp(16, 200_000);
        let pts: Vec<Point2> = (0..=n)
            .map(|i| {
                let a = a0 + sweep * (i as f64) / (n as f64);
                Point2::new(center.x + radius * a.cos(), center.y + radius * a.sin())
            })
            .collect();
        ParamCurve::from_polyline(&pts)
    }

    /// Curve of a polar graph `r(beta)` over `[b0, b1]`, sampled densely.
    pub fn from_polar<F: Fn(f64) -> f64>(r: F, b0: f64, b1: f64) -> Result<ParamCurve, GeomError> {
        if b1 <= b0 {
            return Err(GeomError::DegenerateCurve);
        }
        let n = (((b1 - b0) / DEFAULT_SAMPLE_SPACING).ceil() as usize).clamp(16, 200_000);
        let pts: Vec<Point2> = (0..=n)
            .map(|i| {
                let b = b0 + (b1 - b0) * (i as f64) / (n as f64);
                let rb = r(b);
                Point2::new(rb * b.cos(), rb * b.sin())
            })
            .collect();
        ParamCurve::from_polyline(&pts)
    }

    pub fn total_length(&self) -> f64 {
        self.total
    }

    pub fn start(&self) -> Point2 {
        self.points[0]
    }

    pub fn end(&self) -> Point2 {
        *self.points.last().unwrap()
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.start().dist(self.end()) < OFF_CURVE_TOL * self.total
    }

    /// Point at arc coordinate `s` in `[0, L]`.
    ///
    /// A small tolerance past the ends absorbs numeric arc-length drift from
    /// sampled analytic pieces.
    pub fn arc_point(&self, s: f64) -> Result<Point2, GeomError> {
        let tol = OFF_CURVE_TOL * self.total;
        if !s.is_finite() || s < -tol || s > self.total + tol {
            return Err(GeomError::ArcOutOfRange { s, len: self.total });
        }
        let s = s.clamp(0.0, self.total);
        // Binary search on the cumulative table.
        let idx = match self.cum.binary_search_by(|c| c.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.points.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.points.len() - 2),
        };
        let seg_len = self.cum[idx + 1] - self.cum[idx];
        let t = if seg_len > 0.0 {
            (s - self.cum[idx]) / seg_len
        } else {
            0.0
        };
        let a = self.points[idx];
        let b = self.points[idx + 1];
        Ok(Point2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t))
    }

    /// Arc coordinate of a point on (or within tolerance of) the curve;
    /// nearest-point projection absorbs numeric drift.
    pub fn arc_coord(&self, p: Point2) -> Result<f64, GeomError> {
        let (s, _, d) = self.nearest_point(p);
        let tol = OFF_CURVE_TOL * self.total;
        if d > tol {
            return Err(GeomError::OffCurve {
                x: p.x,
                y: p.y,
                dist: d,
                tol,
            });
        }
        Ok(s)
    }

    /// Nearest point of the curve to `p`: `(arc coordinate, point, distance)`.
    /// Unlike [`arc_coord`](Self::arc_coord) this never errors on distance.
    pub fn nearest_point(&self, p: Point2) -> (f64, Point2, f64) {
        let mut best = (0.0, self.points[0], f64::INFINITY);
        for i in 0..self.points.len() - 1 {
            let a = self.points[i];
            let b = self.points[i + 1];
            let (d, q) = point_segment_distance(p, a, b);
            if d < best.2 {
                let s = self.cum[i] + a.dist(q);
                best = (s, q, d);
            }
        }
        best
    }

    /// Signed crossing test: where does the motion segment `from -> to`
    /// intersect this curve, if anywhere? Returns `(fraction along motion,
    /// crossing point)` for the earliest intersection.
    pub fn segment_crossing(&self, from: Point2, to: Point2) -> Option<(f64, Point2)> {
        let motion = Vec2::from_points(from, to);
        let motion_len = motion.norm();
        if motion_len == 0.0 {
            return None;
        }
        let mut best: Option<(f64, Point2)> = None;
        for w in self.points.windows(2) {
            if let Some(x) = super::segment_intersection_point(from, to, w[0], w[1]) {
                let t = Vec2::from_points(from, x).norm() / motion_len;
                if best.is_none_or(|(bt, _)| t < bt) {
                    best = Some((t, x));
                }
            }
        }
        best
    }
}

/// Closed convex planar region bounded by a counter-clockwise polyline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexRegion {
    boundary: ParamCurve,
    hull: Vec<Point2>,
}

impl ConvexRegion {
    /// Build from a counter-clockwise closed boundary. Convexity is validated
    /// at construction; non-convex input is rejected.
    pub fn new(boundary: ParamCurve) -> Result<ConvexRegion, GeomError> {
        if !boundary.is_closed() {
            return Err(GeomError::DegenerateCurve);
        }
        // Vertex decimation keeps the convexity scan robust on dense samples.
        let pts = boundary.points();
        let n = pts.len() - 1; // last point repeats the first
        let stride = (n / 256).max(1);
        let hull: Vec<Point2> = (0..n).step_by(stride).map(|i| pts[i]).collect();
        let m = hull.len();
        if m >= 3 {
            for i in 0..m {
                let a = hull[i];
                let b = hull[(i + 1) % m];
                let c = hull[(i + 2) % m];
                let cross = Vec2::from_points(a, b).cross(Vec2::from_points(b, c));
                if cross < -1e-9 * boundary.total_length() {
                    return Err(GeomError::NotConvex { index: i });
                }
            }
        }
        Ok(ConvexRegion { boundary, hull })
    }

    pub fn circle(center: Point2, radius: f64) -> Result<ConvexRegion, GeomError> {
        let arc = ParamCurve::circle_arc(center, radius, 0.0, std::f64::consts::TAU)?;
        ConvexRegion::new(arc)
    }

    pub fn boundary(&self) -> &ParamCurve {
        &self.boundary
    }

    pub fn contains(&self, p: Point2) -> bool {
        let m = self.hull.len();
        for i in 0..m {
            let a = self.hull[i];
            let b = self.hull[(i + 1) % m];
            if Vec2::from_points(a, b).cross(Vec2::from_points(a, p)) < -1e-9 {
                return false;
            }
        }
        true
    }
}

/// Arc length of the polar graph `r(beta)` over `[b1, b2]` by adaptive
/// Simpson quadrature of `sqrt(r^2 + (dr/dbeta)^2)`.
pub fn polar_arc_length<F: Fn(f64) -> f64>(r: F, b1: f64, b2: f64) -> Result<f64, GeomError> {
    if b2 < b1 {
        return Err(GeomError::ArcOutOfRange { s: b2, len: b1 });
    }
    let h = 1e-6;
    let integrand = |b: f64| -> f64 {
        let rb = r(b);
        let dr = (r(b + h) - r(b - h)) / (2.0 * h);
        (rb * rb + dr * dr).sqrt()
    };
    let value = adaptive_simpson(&integrand, b1, b2, 1e-10, 40)?;
    if !value.is_finite() {
        return Err(GeomError::NonFinite);
    }
    Ok(value)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    eps: f64,
    depth: u32,
) -> Result<f64, GeomError> {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (f(a) + 4.0 * fm + f(b)), fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> Result<f64, GeomError> {
        if !whole.is_finite() {
            return Err(GeomError::NonFinite);
        }
        let m = 0.5 * (a + b);
        let (left, _) = simpson(f, a, m);
        let (right, _) = simpson(f, m, b);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * eps {
            return Ok(left + right + (left + right - whole) / 15.0);
        }
        Ok(recurse(f, a, m, left, eps / 2.0, depth - 1)?
            + recurse(f, m, b, right, eps / 2.0, depth - 1)?)
    }
    if a == b {
        return Ok(0.0);
    }
    let (whole, _) = simpson(f, a, b);
    recurse(f, a, b, whole, eps, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

    fn quarter_circle() -> ParamCurve {
        ParamCurve::circle_arc(Point2::new(0.0, 0.0), 1.0, 0.0, FRAC_PI_2).unwrap()
    }

    #[test]
    fn arc_point_straight_endpoint() {
        let c = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
        let p = c.arc_point(0.0).unwrap();
        assert_eq!((p.x, p.y), (0.0, 0.0));
    }

    #[test]
    fn arc_point_straight_midpoint() {
        let c = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
        let p = c.arc_point(0.5).unwrap();
        assert!((p.x - 0.5).abs() < 1e-15 && p.y == 0.0);
    }

    #[test]
    fn arc_point_quarter_circle() {
        // Independent check: s = pi/2 along the unit quarter circle lands on (0, 1).
        let c = quarter_circle();
        let p = c.arc_point(FRAC_PI_2).unwrap();
        assert!(
            p.dist(Point2::new(0.0, 1.0)) < 1e-6,
            "got ({}, {})",
            p.x,
            p.y
        );
    }

    #[test]
    fn arc_point_out_of_range() {
        let c = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
        assert!(c.arc_point(1.5).is_err());
        assert!(c.arc_point(-0.5).is_err());
    }

    #[test]
    fn arc_coord_far_endpoint() {
        let c = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)).unwrap();
        assert!((c.arc_coord(Point2::new(2.0, 0.0)).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn arc_coord_quarter_circle_diagonal() {
        // Brute-force oracle: nearest dense sample to (sqrt2/2, sqrt2/2) has
        // analytic arc length pi/4.
        let c = quarter_circle();
        let d = 2.0_f64.sqrt() / 2.0;
        let s = c.arc_coord(Point2::new(d, d)).unwrap();
        assert!((s - FRAC_PI_4).abs() < 1e-5, "s = {s}");
    }

    #[test]
    fn arc_coord_near_curve_projection() {
        let c = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)).unwrap();
        let s = c.arc_coord(Point2::new(1.0, 1e-9)).unwrap();
        assert!((s - 1.0).abs() < 1e-8);
    }

    #[test]
    fn arc_coord_rejects_far_point() {
        let c = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(2.0, 0.0)).unwrap();
        assert!(c.arc_coord(Point2::new(1.0, 0.5)).is_err());
    }

    #[test]
    fn polar_semicircle() {
        let len = polar_arc_length(|_| 1.0, 0.0, PI).unwrap();
        assert!((len - PI).abs() < 1e-9);
    }

    #[test]
    fn polar_full_circle_radius_r0() {
        let r0 = 2.5;
        let len = polar_arc_length(|_| r0, 0.0, TAU).unwrap();
        assert!((len - TAU * r0).abs() < 1e-8);
    }

    #[test]
    fn polar_wobbly_ring_matches_dense_trapezoid() {
        let r = |b: f64| 1.0 + 0.1 * b.sin();
        // Dense trapezoid oracle at 1e6 samples with analytic derivative.
        let n = 1_000_000usize;
        let f = |b: f64| {
            let rb = 1.0 + 0.1 * b.sin();
            let dr = 0.1 * b.cos();
            (rb * rb + dr * dr).sqrt()
        };
        let h = TAU / n as f64;
        let mut acc = 0.5 * (f(0.0) + f(TAU));
        for i in 1..n {
            acc += f(i as f64 * h);
        }
        let oracle = acc * h;
        let len = polar_arc_length(r, 0.0, TAU).unwrap();
        assert!((len - oracle).abs() < 1e-6, "len {len} oracle {oracle}");
    }

    #[test]
    fn convexity_rejected_for_dented_polygon() {
        let pts = [
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(1.0, 0.5), // dent
            Point2::new(2.0, 2.0),
            Point2::new(0.0, 2.0),
            Point2::new(0.0, 0.0),
        ];
        let c = ParamCurve::from_polyline(&pts).unwrap();
        assert!(ConvexRegion::new(c).is_err());
    }

    #[test]
    fn region_contains() {
        let r = ConvexRegion::circle(Point2::new(0.0, 0.0), 2.0).unwrap();
        assert!(r.contains(Point2::new(0.5, 0.5)));
        assert!(!r.contains(Point2::new(3.0, 0.0)));
    }
}
