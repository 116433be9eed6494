//! Convex obstacles (polygons and disks) with tangent-visibility and
//! inter-obstacle gap queries.

use super::{point_segment_distance, segment_segment_distance, Point2, Vec2};
use crate::error::GeomError;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ObstacleShape {
    /// Convex polygon given by counter-clockwise vertices in body frame.
    Polygon(Vec<Point2>),
    Disk {
        radius: f64,
    },
}

/// Static or movable convex planar obstacle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Obstacle {
    pub shape: ObstacleShape,
    pub position: Point2,
    pub rotation: f64,
    #[serde(default)]
    pub velocity: Vec2,
    #[serde(default)]
    pub angular_velocity: f64,
}

impl Obstacle {
    pub fn new(shape: ObstacleShape, position: Point2) -> Result<Obstacle, GeomError> {
        match &shape {
            ObstacleShape::Disk { radius } => {
                if *radius <= 0.0 {
                    return Err(GeomError::BadRadius(*radius));
                }
            }
            ObstacleShape::Polygon(verts) => {
                if verts.len() < 3 {
                    return Err(GeomError::DegenerateCurve);
                }
                let n = verts.len();
                for i in 0..n {
                    let a = verts[i];
                    let b = verts[(i + 1) % n];
                    let c = verts[(i + 2) % n];
                    if Vec2::from_points(a, b).cross(Vec2::from_points(b, c)) < 0.0 {
                        return Err(GeomError::NotConvex { index: i });
                    }
                }
            }
        }
        Ok(Obstacle {
            shape,
            position,
            rotation: 0.0,
            velocity: Vec2::ZERO,
            angular_velocity: 0.0,
        })
    }

    pub fn disk(center: Point2, radius: f64) -> Result<Obstacle, GeomError> {
        Obstacle::new(ObstacleShape::Disk { radius }, center)
    }

    pub fn polygon(vertices: Vec<Point2>, position: Point2) -> Result<Obstacle, GeomError> {
        Obstacle::new(ObstacleShape::Polygon(vertices), position)
    }

    /// Regular-polygon approximation of an ellipse, body frame.
    pub fn ellipse(center: Point2, a: f64, b: f64, sides: usize) -> Result<Obstacle, GeomError> {
        let n = sides.max(8);
        let verts: Vec<Point2> = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * (i as f64) / (n as f64);
                Point2::new(a * t.cos(), b * t.sin())
            })
            .collect();
        Obstacle::polygon(verts, center)
    }

    /// World-frame vertices (polygon) with pose applied.
    pub fn world_vertices(&self) -> Vec<Point2> {
        match &self.shape {
            ObstacleShape::Disk { .. } => Vec::new(),
            ObstacleShape::Polygon(verts) => {
                let (s, c) = self.rotation.sin_cos();
                verts
                    .iter()
                    .map(|v| {
                        Point2::new(
                            self.position.x + c * v.x - s * v.y,
                            self.position.y + s * v.x + c * v.y,
                        )
                    })
                    .collect()
            }
        }
    }

    /// Distance from a point to the obstacle boundary (0 when inside).
    pub fn distance_to(&self, p: Point2) -> f64 {
        match &self.shape {
            ObstacleShape::Disk { radius } => (p.dist(self.position) - radius).max(0.0),
            ObstacleShape::Polygon(_) => {
                let verts = self.world_vertices();
                if point_in_convex(&verts, p) {
                    return 0.0;
                }
                let n = verts.len();
                let mut best = f64::INFINITY;
                for i in 0..n {
                    let (d, _) = point_segment_distance(p, verts[i], verts[(i + 1) % n]);
                    best = best.min(d);
                }
                best
            }
        }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match &self.shape {
            ObstacleShape::Disk { radius } => p.dist(self.position) <= *radius,
            ObstacleShape::Polygon(_) => point_in_convex(&self.world_vertices(), p),
        }
    }

    /// Closest boundary point to `p`.
    pub fn closest_point(&self, p: Point2) -> Point2 {
        match &self.shape {
            ObstacleShape::Disk { radius } => {
                let dir = Vec2::from_points(self.position, p).normalized();
                self.position.add(dir.scale(*radius))
            }
            ObstacleShape::Polygon(_) => {
                let verts = self.world_vertices();
                let n = verts.len();
                let mut best = (f64::INFINITY, verts[0]);
                for i in 0..n {
                    let (d, q) = point_segment_distance(p, verts[i], verts[(i + 1) % n]);
                    if d < best.0 {
                        best = (d, q);
                    }
                }
                best.1
            }
        }
    }

    /// Boundary sampled as a dense closed polyline in world frame.
    pub fn boundary_samples(&self, n: usize) -> Vec<Point2> {
        match &self.shape {
            ObstacleShape::Disk { radius } => (0..n)
                .map(|i| {
                    let t = std::f64::consts::TAU * (i as f64) / (n as f64);
                    Point2::new(
                        self.position.x + radius * t.cos(),
                        self.position.y + radius * t.sin(),
                    )
                })
                .collect(),
            ObstacleShape::Polygon(_) => {
                let verts = self.world_vertices();
                let m = verts.len();
                let perimeter: f64 = (0..m).map(|i| verts[i].dist(verts[(i + 1) % m])).sum();
                let step = perimeter / n as f64;
                let mut out = Vec::with_capacity(n);
                let mut edge = 0usize;
                let mut along = 0.0f64;
                for _ in 0..n {
                    let mut a = verts[edge];
                    let mut b = verts[(edge + 1) % m];
                    let mut elen = a.dist(b);
                    while along > elen {
                        along -= elen;
                        edge = (edge + 1) % m;
                        a = verts[edge];
                        b = verts[(edge + 1) % m];
                        elen = a.dist(b);
                    }
                    let t = if elen > 0.0 { along / elen } else { 0.0 };
                    out.push(Point2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t));
                    along += step;
                }
                out
            }
        }
    }

    pub fn step_motion(&mut self, dt: f64) {
        self.position = self.position.add(self.velocity.scale(dt));
        self.rotation += self.angular_velocity * dt;
    }
}

fn point_in_convex(verts: &[Point2], p: Point2) -> bool {
    let n = verts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = verts[i];
        let b = verts[(i + 1) % n];
        if Vec2::from_points(a, b).cross(Vec2::from_points(a, p)) < -1e-12 {
            return false;
        }
    }
    true
}

/// The two tangent points bounding the visible arc of an obstacle, plus the
/// subtended angle between the tangent rays.
///
/// `first` is the extreme on the clockwise side of the sight line from `pos`
/// to the obstacle, `last` the counter-clockwise one, so sweeping from
/// `first` to `last` counter-clockwise crosses the visible face.
#[derive(Debug, Clone, Copy)]
pub struct VisibleArc {
    pub first: Point2,
    pub last: Point2,
    pub subtended: f64,
}

/// Tangent extremes of a convex obstacle as seen from an exterior point.
pub fn visible_extremes(obs: &Obstacle, pos: Point2) -> Result<VisibleArc, GeomError> {
    if obs.contains(pos) || obs.distance_to(pos) == 0.0 {
        return Err(GeomError::InsideObstacle);
    }
    match &obs.shape {
        ObstacleShape::Disk { radius } => {
            let d = pos.dist(obs.position);
            let half = (radius / d).asin();
            let to_center = Vec2::from_points(pos, obs.position);
            let bearing = to_center.angle();
            // Tangent point: rotate the center->pos unit vector by +-acos(r/d).
            let back = Vec2::from_points(obs.position, pos).normalized();
            let rot = (radius / d).acos();
            let t_plus = obs.position.add(back.rotated(rot).scale(*radius));
            let t_minus = obs.position.add(back.rotated(-rot).scale(*radius));
            // Order by bearing around the center direction, CCW from pos.
            let ang = |p: Point2| {
                let a = Vec2::from_points(pos, p).angle() - bearing;
                wrap_pi(a)
            };
            let (first, last) = if ang(t_minus) < ang(t_plus) {
                (t_minus, t_plus)
            } else {
                (t_plus, t_minus)
            };
            Ok(VisibleArc {
                first,
                last,
                subtended: 2.0 * half,
            })
        }
        ObstacleShape::Polygon(_) => {
            let verts = obs.world_vertices();
            let bearing = Vec2::from_points(pos, obs.position).angle();
            let mut lo = (f64::INFINITY, verts[0]);
            let mut hi = (f64::NEG_INFINITY, verts[0]);
            for &v in &verts {
                let a = wrap_pi(Vec2::from_points(pos, v).angle() - bearing);
                if a < lo.0 {
                    lo = (a, v);
                }
                if a > hi.0 {
                    hi = (a, v);
                }
            }
            Ok(VisibleArc {
                first: lo.1,
                last: hi.1,
                subtended: hi.0 - lo.0,
            })
        }
    }
}

/// Minimal separating segment between two disjoint obstacles and its length.
/// Touching obstacles return a zero gap; overlapping interiors are an error.
pub fn obstacle_gap(a: &Obstacle, b: &Obstacle) -> Result<(f64, (Point2, Point2)), GeomError> {
    match (&a.shape, &b.shape) {
        (ObstacleShape::Disk { radius: ra }, ObstacleShape::Disk { radius: rb }) => {
            let d = a.position.dist(b.position);
            // Summing the radii first keeps the gap bit-exactly symmetric
            // in the argument order.
            let gap = d - (ra + rb);
            if gap < -1e-12 {
                return Err(GeomError::OverlappingObstacles);
            }
            let dir = Vec2::from_points(a.position, b.position).normalized();
            let pa = a.position.add(dir.scale(*ra));
            let pb = b.position.add(dir.scale(-*rb));
            Ok((gap.max(0.0), (pa, pb)))
        }
        (ObstacleShape::Disk { radius }, ObstacleShape::Polygon(_)) => {
            let (gap, (pb, pa)) = polygon_point_gap(b, a.position, *radius)?;
            Ok((gap, (pa, pb)))
        }
        (ObstacleShape::Polygon(_), ObstacleShape::Disk { radius }) => {
            polygon_point_gap(a, b.position, *radius)
        }
        (ObstacleShape::Polygon(_), ObstacleShape::Polygon(_)) => {
            let va = a.world_vertices();
            let vb = b.world_vertices();
            if va.iter().any(|&p| point_in_convex(&vb, p))
                || vb.iter().any(|&p| point_in_convex(&va, p))
            {
                // Vertex containment catches all overlaps except edge
                // crossings, which the edge loop below reports as zero gap.
                return Err(GeomError::OverlappingObstacles);
            }
            let na = va.len();
            let nb = vb.len();
            let mut best = (f64::INFINITY, (va[0], vb[0]));
            for i in 0..na {
                for j in 0..nb {
                    let (d, p, q) =
                        segment_segment_distance(va[i], va[(i + 1) % na], vb[j], vb[(j + 1) % nb]);
                    if d < best.0 {
                        best = (d, (p, q));
                    }
                }
            }
            Ok(best)
        }
    }
}

fn polygon_point_gap(
    poly: &Obstacle,
    center: Point2,
    radius: f64,
) -> Result<(f64, (Point2, Point2)), GeomError> {
    let verts = poly.world_vertices();
    if point_in_convex(&verts, center) {
        return Err(GeomError::OverlappingObstacles);
    }
    let n = verts.len();
    let mut best = (f64::INFINITY, verts[0]);
    for i in 0..n {
        let (d, q) = point_segment_distance(center, verts[i], verts[(i + 1) % n]);
        if d < best.0 {
            best = (d, q);
        }
    }
    let gap = best.0 - radius;
    if gap < -1e-12 {
        return Err(GeomError::OverlappingObstacles);
    }
    let dir = Vec2::from_points(center, best.1).normalized();
    let disk_pt = center.add(dir.scale(radius));
    Ok((gap.max(0.0), (best.1, disk_pt)))
}

fn wrap_pi(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    } else if a < -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_square_at(center: Point2) -> Obstacle {
        Obstacle::polygon(
            vec![
                Point2::new(-0.5, -0.5),
                Point2::new(0.5, -0.5),
                Point2::new(0.5, 0.5),
                Point2::new(-0.5, 0.5),
            ],
            center,
        )
        .unwrap()
    }

    #[test]
    fn disk_tangents_from_twice_radius() {
        let obs = Obstacle::disk(Point2::new(0.0, 0.0), 1.0).unwrap();
        let arc = visible_extremes(&obs, Point2::new(2.0, 0.0)).unwrap();
        assert!((arc.subtended - PI / 3.0).abs() < 1e-12);
        // Looking from (2, 0) toward the origin, the upper tangent point is
        // on the clockwise side of the sight line.
        let expect_cw = Point2::new(0.5, 3.0f64.sqrt() / 2.0);
        let expect_ccw = Point2::new(0.5, -(3.0f64.sqrt()) / 2.0);
        assert!(arc.first.dist(expect_cw) < 1e-9);
        assert!(arc.last.dist(expect_ccw) < 1e-9);
        // Ray-sampling oracle: rays to the tangent points must not enter the
        // interior.
        for &t in &[arc.first, arc.last] {
            for k in 1..100 {
                let f = k as f64 / 100.0;
                let p = Point2::new(2.0 + (t.x - 2.0) * f, t.y * f);
                assert!(p.dist(obs.position) >= 1.0 - 1e-9);
            }
        }
    }

    #[test]
    fn disk_subtended_angle_vanishes_far_away() {
        let obs = Obstacle::disk(Point2::new(0.0, 0.0), 1.0).unwrap();
        let arc = visible_extremes(&obs, Point2::new(1e6, 0.0)).unwrap();
        assert!(arc.subtended < 1e-5);
    }

    #[test]
    fn square_tangent_vertices() {
        // Vertex-scan oracle: from (3, 0) the extreme vertices of the unit
        // square are (0.5, +-0.5).
        let obs = unit_square_at(Point2::new(0.0, 0.0));
        let arc = visible_extremes(&obs, Point2::new(3.0, 0.0)).unwrap();
        assert!(arc.first.dist(Point2::new(0.5, 0.5)) < 1e-12);
        assert!(arc.last.dist(Point2::new(0.5, -0.5)) < 1e-12);
        // Ray-cast oracle: neither tangent ray enters the interior.
        for &t in &[arc.first, arc.last] {
            for k in 1..100 {
                let f = k as f64 / 100.0;
                let p = Point2::new(3.0 + (t.x - 3.0) * f, t.y * f);
                let inset = Point2::new(p.x * (1.0 - 1e-9), p.y);
                assert!(
                    !obs.contains(inset) || obs.distance_to(inset) < 1e-9,
                    "tangent ray dips into the interior at {f}"
                );
            }
        }
    }

    #[test]
    fn inside_point_rejected() {
        let obs = Obstacle::disk(Point2::new(0.0, 0.0), 1.0).unwrap();
        assert!(visible_extremes(&obs, Point2::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn gap_collinear_disks() {
        let a = Obstacle::disk(Point2::new(0.0, 0.0), 1.0).unwrap();
        let b = Obstacle::disk(Point2::new(4.0, 0.0), 1.0).unwrap();
        let (d, (pa, pb)) = obstacle_gap(&a, &b).unwrap();
        assert!((d - 2.0).abs() < 1e-12);
        assert!(pa.dist(Point2::new(1.0, 0.0)) < 1e-12);
        assert!(pb.dist(Point2::new(3.0, 0.0)) < 1e-12);
    }

    #[test]
    fn gap_touching_disks_is_zero() {
        let a = Obstacle::disk(Point2::new(0.0, 0.0), 1.0).unwrap();
        let b = Obstacle::disk(Point2::new(2.0, 0.0), 1.0).unwrap();
        let (d, _) = obstacle_gap(&a, &b).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn gap_overlapping_disks_is_error() {
        let a = Obstacle::disk(Point2::new(0.0, 0.0), 1.0).unwrap();
        let b = Obstacle::disk(Point2::new(1.0, 0.0), 1.0).unwrap();
        assert!(obstacle_gap(&a, &b).is_err());
    }

    #[test]
    fn gap_diagonal_squares() {
        // Brute force over edge pairs: unit squares offset by (3, 3) have
        // corner-to-corner gap 2*sqrt(2).
        let a = unit_square_at(Point2::new(0.0, 0.0));
        let b = unit_square_at(Point2::new(3.0, 3.0));
        let (d, _) = obstacle_gap(&a, &b).unwrap();
        assert!((d - 2.0 * 2.0f64.sqrt()).abs() < 1e-12, "d = {d}");
    }

    #[test]
    fn gap_symmetry() {
        let a = unit_square_at(Point2::new(0.0, 0.0));
        let b = Obstacle::disk(Point2::new(5.0, 1.0), 0.7).unwrap();
        let (dab, _) = obstacle_gap(&a, &b).unwrap();
        let (dba, _) = obstacle_gap(&b, &a).unwrap();
        assert_eq!(dab, dba);
    }
}
