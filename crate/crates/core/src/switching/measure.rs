//! Tangent-chord measurements and the per-mode step constructions.

use super::SwitchingParams;
use crate::error::LawError;
use crate::geometry::{visible_extremes, Obstacle, Point2, Vec2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchingMode {
    /// Leader-follower around one convex obstacle.
    SingleObstacle,
    /// Leader-follower among multiple obstacles with gap selection.
    MultiObstacle,
    /// Fully decentralized per-robot navigation.
    Decentralized,
}

/// One sensor snapshot of an obstacle: the extreme visible points within
/// sensing range, the chord between them, the right-triangle heading angle
/// and the perpendicular clearance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PesaMeasurement {
    pub p_first: Point2,
    pub p_last: Point2,
    /// Chord length between the visible extremes.
    pub chord: f64,
    /// Right-triangle heading angle `atan(L3 / chord)`.
    pub theta_d: f64,
    pub nearest: Point2,
    pub clearance: f64,
}

/// Record of one executed switching step, mirrored into the trace.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SwitchingStep {
    pub index: u64,
    pub chord: f64,
    pub heading: f64,
    pub travel: f64,
    pub clearance_before: f64,
}

/// Measure one obstacle from `pos`: visible extremes clipped to the sensing
/// disk. `None` when no boundary point is in range (the caller travels
/// straight).
pub fn pesa_measure(
    pos: Point2,
    obstacle: &Obstacle,
    params: &SwitchingParams,
) -> Result<Option<PesaMeasurement>, LawError> {
    let arc = visible_extremes(obstacle, pos)?;
    let nearest = obstacle.closest_point(pos);
    let clearance = pos.dist(nearest);
    if clearance > params.sensing_radius {
        return Ok(None);
    }
    // Walk the visible face between the tangent extremes and keep the part
    // inside the sensing disk.
    let samples = visible_face_samples(obstacle, pos, &arc.first, &arc.last);
    let in_range: Vec<Point2> = samples
        .into_iter()
        .filter(|p| pos.dist(*p) <= params.sensing_radius)
        .collect();
    if in_range.len() < 2 {
        return Ok(None);
    }
    // Extreme bearings among in-range visible points.
    let bearing0 = Vec2::from_points(pos, nearest).angle();
    let rel = |p: &Point2| wrap_pi(Vec2::from_points(pos, *p).angle() - bearing0);
    let p_first = *in_range
        .iter()
        .min_by(|a, b| rel(a).partial_cmp(&rel(b)).unwrap())
        .unwrap();
    let p_last = *in_range
        .iter()
        .max_by(|a, b| rel(a).partial_cmp(&rel(b)).unwrap())
        .unwrap();
    let chord = p_first.dist(p_last);
    if chord <= 0.0 {
        return Ok(None);
    }
    let theta_d = (params.l3() / chord).atan();
    Ok(Some(PesaMeasurement {
        p_first,
        p_last,
        chord,
        theta_d,
        nearest,
        clearance,
    }))
}

fn visible_face_samples(
    obstacle: &Obstacle,
    pos: Point2,
    first: &Point2,
    last: &Point2,
) -> Vec<Point2> {
    let all = obstacle.boundary_samples(256);
    let mut out: Vec<Point2> = all
        .into_iter()
        .filter(|q| segment_clears_interior(obstacle, pos, *q))
        .collect();
    out.push(*first);
    out.push(*last);
    out
}

/// Occlusion test for one boundary point of a convex obstacle: the sight
/// segment may touch the boundary at `q` but must not pass through the
/// interior on the way. Sample points are nudged toward the robot so that
/// riding along a flat face does not count as occlusion of its near end.
fn segment_clears_interior(obstacle: &Obstacle, pos: Point2, q: Point2) -> bool {
    for k in 1..=15 {
        let t = (k as f64 / 16.0) * (1.0 - 1e-6);
        let p = Point2::new(pos.x + (q.x - pos.x) * t, pos.y + (q.y - pos.y) * t);
        let nudged = Point2::new(p.x + (pos.x - p.x) * 1e-7, p.y + (pos.y - p.y) * 1e-7);
        if obstacle.contains(nudged) {
            return false;
        }
    }
    true
}

/// Advance the leader toward the next wall-following station: the point
/// `epsilon` above the forward half of the visible chord. Travel is capped
/// at half the chord and the sensing horizon, so the executed hop keeps the
/// clearance in the `epsilon` band while it rounds the obstacle. `forward`
/// disambiguates which chord end the robot progresses toward.
pub fn pesa_step(
    pos: Point2,
    m: &PesaMeasurement,
    params: &SwitchingParams,
    forward: Vec2,
) -> (Point2, f64, f64) {
    let mut along = Vec2::from_points(m.p_first, m.p_last).normalized();
    if along.dot(forward) < 0.0 {
        along = along.scale(-1.0);
    }
    let station = wall_station(pos, m, params, along);
    let to = Vec2::from_points(pos, station);
    let travel = to.norm().min(0.5 * m.chord).min(params.sensing_radius);
    let dir = to.normalized();
    (pos.add(dir.scale(travel)), dir.angle(), travel)
}

/// Next wall-following station: advance half the chord from the robot's
/// own chord projection (clamped to the chord extent), lifted off the wall
/// by epsilon plus half the measurement tolerance. Anchoring the advance to
/// the robot keeps the hop progressing even when the visible chord is
/// static; the curvature of the face eats into the lift from below (the
/// chord is a secant).
fn wall_station(pos: Point2, m: &PesaMeasurement, params: &SwitchingParams, along: Vec2) -> Point2 {
    // Rear chord end relative to the oriented along direction.
    let (rear, _front) = if Vec2::from_points(m.p_first, m.p_last).dot(along) >= 0.0 {
        (m.p_first, m.p_last)
    } else {
        (m.p_last, m.p_first)
    };
    let mut lift = along.perp();
    let mid = Point2::new(
        0.5 * (m.p_first.x + m.p_last.x),
        0.5 * (m.p_first.y + m.p_last.y),
    );
    if lift.dot(Vec2::from_points(mid, pos)) < 0.0 {
        lift = lift.scale(-1.0);
    }
    let t_robot = Vec2::from_points(rear, pos).dot(along).clamp(0.0, m.chord);
    let t_target = (t_robot + 0.5 * m.chord).min(m.chord);
    rear.add(along.scale(t_target))
        .add(lift.scale(params.epsilon + 0.5 * params.mu0))
}

/// Gap admissibility: the separation must dominate the robot diameter by
/// the strictness factor.
pub fn gap_admissible(gap: f64, params: &SwitchingParams) -> bool {
    gap >= params.gap_strictness * 2.0 * params.robot_radius * (1.0 + params.epsilon)
}

#[derive(Debug, Clone, Copy)]
pub struct GapChoice {
    pub index: usize,
    pub width: f64,
}

/// Pick the widest admissible gap; ties break to the smallest heading
/// change from `current_heading`. `gaps` pairs each candidate's width with
/// the world heading toward its middle.
pub fn gap_select(
    gaps: &[(f64, f64)],
    current_heading: f64,
    params: &SwitchingParams,
) -> Result<GapChoice, LawError> {
    let mut best: Option<(f64, f64, usize)> = None;
    for (i, &(width, heading)) in gaps.iter().enumerate() {
        if !gap_admissible(width, params) {
            continue;
        }
        let turn = {
            let d = (heading - current_heading).abs() % std::f64::consts::TAU;
            d.min(std::f64::consts::TAU - d)
        };
        let better = match best {
            None => true,
            Some((bw, bt, _)) => width > bw + 1e-12 || ((width - bw).abs() <= 1e-12 && turn < bt),
        };
        if better {
            best = Some((width, turn, i));
        }
    }
    best.map(|(width, _, index)| GapChoice { index, width })
        .ok_or(LawError::Blocked)
}

/// Dual-obstacle gap-threading step: the half-scaled resultant of the two
/// per-obstacle station displacements, which is the midpoint of the two
/// chord stations. Each station is anchored `epsilon` off its own wall, so
/// the midpoint rides the middle of the corridor regardless of where the
/// robot currently is. Travel is capped by the smaller half-chord and the
/// sensing horizon. Returns the new position, the executed heading, the
/// travel and the closed-form resultant magnitude for the comparison
/// report.
pub fn dual_step_resultant(
    pos: Point2,
    near: &PesaMeasurement,
    far: &PesaMeasurement,
    params: &SwitchingParams,
    forward: Vec2,
) -> (Point2, f64, f64, f64) {
    let s_near = chord_station(pos, near, params, forward);
    let s_far = chord_station(pos, far, params, forward);
    let target = Point2::new(0.5 * (s_near.x + s_far.x), 0.5 * (s_near.y + s_far.y));
    let to = Vec2::from_points(pos, target);
    let travel = to
        .norm()
        .min(0.5 * near.chord)
        .min(0.5 * far.chord)
        .min(params.sensing_radius);
    let dir = to.normalized();
    // Closed-form magnitude: half the law-of-cosines resultant of the two
    // chords under the summed triangle angles, reported for comparison.
    let alpha1 = near.theta_d;
    let alpha2 = far.theta_d;
    let closed_form = 0.5
        * (near.chord.powi(2)
            + far.chord.powi(2)
            + 2.0 * near.chord * far.chord * (alpha1 + alpha2).cos())
        .sqrt();
    (pos.add(dir.scale(travel)), dir.angle(), travel, closed_form)
}

/// Wall station of one measurement oriented by the global progress hint.
fn chord_station(
    pos: Point2,
    m: &PesaMeasurement,
    params: &SwitchingParams,
    forward: Vec2,
) -> Point2 {
    let mut along = Vec2::from_points(m.p_first, m.p_last).normalized();
    if along.dot(forward) < 0.0 {
        along = along.scale(-1.0);
    }
    wall_station(pos, m, params, along)
}

/// Component-form dual-obstacle step of the decentralized mode, expressed in
/// the frame whose x-axis is the ray to the nearer obstacle's gap-side
/// extreme. Travel is the component-form length, clamped to the sensing
/// radius so the hop never leaves the sensed region.
pub fn dual_step_component(
    pos: Point2,
    near: &PesaMeasurement,
    far: &PesaMeasurement,
    params: &SwitchingParams,
) -> (Point2, f64, f64) {
    // Gap-side extremes: the pair of visible extremes (one per obstacle)
    // with the smallest angular separation.
    let (e_near, e_far) = gap_side_extremes(pos, near, far);
    let x_axis = Vec2::from_points(pos, e_near).normalized();
    let to_far = Vec2::from_points(pos, e_far);
    let delta = x_axis.cross(to_far).atan2(x_axis.dot(to_far)); // signed
    let alpha2 = far.theta_d;
    let alpha3 = delta.abs() - alpha2;
    let l1_far = pos.dist(e_far);
    let x = l1_far * alpha3.cos();
    let y = l1_far * alpha3.sin();
    let beta = ((params.epsilon + y) / (0.25 * near.chord + x)).atan();
    let length = ((0.25 * near.chord + x).powi(2) + (params.epsilon + y).powi(2))
        .sqrt()
        .min(params.sensing_radius);
    // Rotate beta from the x-axis toward the gap (the sign of delta).
    let world = x_axis.rotated(beta.copysign(delta));
    (pos.add(world.scale(length)), world.angle(), length)
}

fn gap_side_extremes(
    pos: Point2,
    near: &PesaMeasurement,
    far: &PesaMeasurement,
) -> (Point2, Point2) {
    let mut best = (f64::INFINITY, near.p_first, far.p_first);
    for en in [near.p_first, near.p_last] {
        for ef in [far.p_first, far.p_last] {
            let a = Vec2::from_points(pos, en);
            let b = Vec2::from_points(pos, ef);
            let ang = a.cross(b).atan2(a.dot(b)).abs();
            if ang < best.0 {
                best = (ang, en, ef);
            }
        }
    }
    (best.1, best.2)
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
    use crate::geometry::ObstacleShape;

    fn params(mode: SwitchingMode) -> SwitchingParams {
        SwitchingParams::new(1.0, 0.05, 10.0, 0.2, mode).unwrap()
    }

    fn wall() -> Obstacle {
        // Long thin wall south of the origin.
        Obstacle::new(
            ObstacleShape::Polygon(vec![
                Point2::new(-8.0, -0.5),
                Point2::new(8.0, -0.5),
                Point2::new(8.0, 0.0),
                Point2::new(-8.0, 0.0),
            ]),
            Point2::new(0.0, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn theta_d_flat_wall_substitution() {
        let p = params(SwitchingMode::SingleObstacle);
        let m = pesa_measure(Point2::new(0.0, 1.0), &wall(), &p)
            .unwrap()
            .unwrap();
        // Visible chord is clipped by the sensing disk; theta_d must equal
        // atan(2 eps / chord) for the measured chord.
        assert!((m.theta_d - (2.0 * p.epsilon / m.chord).atan()).abs() < 1e-12);
        assert!((m.clearance - 1.0).abs() < 1e-9);
    }

    #[test]
    fn theta_d_limits() {
        let p = params(SwitchingMode::SingleObstacle);
        // Equal catheti: chord = 2 eps gives pi/4.
        let theta = (p.l3() / (2.0 * p.epsilon)).atan();
        assert!((theta - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        //

        let theta_far = (p.l3() / 1e9).atan();
        assert!(theta_far < 1e-8, "grazing in the long-chord limit");
    }

    #[test]
    fn decentralized_l2_doubles() {
        let single = params(SwitchingMode::SingleObstacle);
        let dec = params(SwitchingMode::Decentralized);
        assert_eq!(single.l2(), 1.0);
        assert_eq!(single.l3(), 2.0);
        assert_eq!(dec.l2(), 2.0);
        assert_eq!(dec.l3(), 4.0);
    }

    #[test]
    fn pesa_step_follows_flat_wall_at_epsilon() {
        let p = params(SwitchingMode::SingleObstacle);
        let pos = Point2::new(0.0, p.epsilon);
        let m = pesa_measure(pos, &wall(), &p).unwrap().unwrap();
        let (next, _, travel) = pesa_step(pos, &m, &p, Vec2::new(1.0, 0.0));
        assert!(next.x > pos.x, "progress along the wall");
        let lift = p.epsilon + 0.5 * p.mu0;
        assert!(
            (next.y - lift).abs() < 0.05,
            "station rides the tolerance-budgeted band above a flat face, got y = {}",
            next.y
        );
        assert!(travel <= 0.5 * m.chord + 1e-12);
        assert!(travel <= p.sensing_radius);
    }

    #[test]
    fn pesa_steps_hold_the_band_around_a_flat_face() {
        // Repeated hops along a long wall stay pinned at the band; the wall
        // is long enough that no hop reaches its corner.
        let p = params(SwitchingMode::SingleObstacle);
        let w = Obstacle::new(
            ObstacleShape::Polygon(vec![
                Point2::new(-8.0, -0.5),
                Point2::new(40.0, -0.5),
                Point2::new(40.0, 0.0),
                Point2::new(-8.0, 0.0),
            ]),
            Point2::new(0.0, 0.0),
        )
        .unwrap();
        let mut pos = Point2::new(-5.0, 1.3);
        for _ in 0..4 {
            let m = pesa_measure(pos, &w, &p).unwrap().unwrap();
            let (next, _, _) = pesa_step(pos, &m, &p, Vec2::new(1.0, 0.0));
            pos = next;
        }
        let clearance = w.distance_to(pos);
        let lift = p.epsilon + 0.5 * p.mu0;
        assert!(
            (clearance - lift).abs() < 0.05,
            "clearance settled at {clearance}"
        );
    }

    #[test]
    fn measurement_invisible_obstacle() {
        let p = params(SwitchingMode::SingleObstacle);
        let far = Obstacle::disk(Point2::new(100.0, 0.0), 1.0).unwrap();
        assert!(pesa_measure(Point2::new(0.0, 0.0), &far, &p)
            .unwrap()
            .is_none());
    }

    #[test]
    fn gap_admissibility_thresholds() {
        let p = params(SwitchingMode::MultiObstacle);
        let unit = 2.0 * p.robot_radius * (1.0 + p.epsilon); // 0.8
        assert!(gap_admissible(10.0 * unit, &p));
        assert!(!gap_admissible(2.0 * p.robot_radius, &p));
        // Exactly at the default strictness boundary counts as admissible.
        assert!(gap_admissible(1.5 * unit, &p));
        assert!(!gap_admissible(1.5 * unit - 1e-9, &p));
    }

    #[test]
    fn gap_select_widest_and_ties() {
        let p = params(SwitchingMode::MultiObstacle);
        let gaps = vec![(3.0, 0.0), (5.0, 1.0), (4.0, -0.5)];
        let choice = gap_select(&gaps, 0.0, &p).unwrap();
        assert_eq!(choice.index, 1);
        let single = vec![(3.0, 2.0)];
        assert_eq!(gap_select(&single, 0.0, &p).unwrap().index, 0);
        // Two equal widest gaps: the smaller heading change wins.
        let tied = vec![(5.0, 1.5), (5.0, 0.1)];
        assert_eq!(gap_select(&tied, 0.0, &p).unwrap().index, 1);
    }

    #[test]
    fn gap_select_blocked() {
        let p = params(SwitchingMode::MultiObstacle);
        let gaps = vec![(0.1, 0.0)];
        assert!(matches!(gap_select(&gaps, 0.0, &p), Err(LawError::Blocked)));
    }

    #[test]
    fn resultant_symmetric_twins_bisect() {
        let p = params(SwitchingMode::MultiObstacle);
        let a = Obstacle::disk(Point2::new(-3.0, 4.0), 1.0).unwrap();
        let b = Obstacle::disk(Point2::new(3.0, 4.0), 1.0).unwrap();
        let pos = Point2::new(0.0, 0.0);
        let ma = pesa_measure(pos, &a, &p).unwrap().unwrap();
        let mb = pesa_measure(pos, &b, &p).unwrap().unwrap();
        let (next, heading, _, _) = dual_step_resultant(pos, &ma, &mb, &p, Vec2::new(0.0, 1.0));
        assert!(
            next.x.abs() < 1e-6,
            "station midpoint bisects the twin gap, got {next:?}"
        );
        assert!((heading - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn component_heading_in_first_quadrant_of_frame() {
        // eps + y and chord/4 + x positive imply beta in (0, pi/2).
        let p = params(SwitchingMode::Decentralized);
        let a = Obstacle::disk(Point2::new(-2.5, 4.0), 1.0).unwrap();
        let b = Obstacle::disk(Point2::new(3.5, 5.0), 1.2).unwrap();
        let pos = Point2::new(0.0, 0.0);
        let ma = pesa_measure(pos, &a, &p).unwrap().unwrap();
        let mb = pesa_measure(pos, &b, &p).unwrap().unwrap();
        let (next, _, travel) = dual_step_component(pos, &ma, &mb, &p);
        assert!(
            travel <= p.sensing_radius,
            "hop stays inside the sensed disk"
        );
        assert!(travel > 0.0);
        assert!(next.y > pos.y, "moves into the gap between the obstacles");
    }
}
