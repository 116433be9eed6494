//! Virtual source/sink force-field navigation among moving, rotating,
//! merging obstacles.
//!
//! Every visible obstacle point is an inverse-square repulsive source; every
//! admissible gap between neighbouring obstacles is strung with virtual
//! attractive sink particles. The gated resultant sets both the heading and
//! the travel distance of one blind sojourn step.

use crate::error::LawError;
use crate::geometry::{obstacle_gap, visible_extremes, Obstacle, Point2, Vec2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ForceParams {
    /// Shared force constant (repulsive and attractive are equal).
    pub force_constant: f64,
    /// Uniform particle charge.
    pub charge: f64,
    /// Minimum allowed robot-obstacle clearance.
    pub epsilon: f64,
    /// Sojourn interval between field samples, seconds.
    pub sojourn_dt: f64,
    /// Sink particle count per gap (interior particles are `n - 1`).
    pub n_sink: usize,
    /// Saturation magnitude for degenerate (near-zero) distances.
    pub max_force: f64,
    /// Boundary samples per obstacle when building the visible point set.
    pub samples_per_obstacle: usize,
    /// Robot circumradius used by the disjointness threshold.
    pub robot_radius: f64,
}

impl Default for ForceParams {
    fn default() -> Self {
        ForceParams {
            force_constant: 1.0,
            charge: 1.0,
            epsilon: 0.5,
            sojourn_dt: 0.01,
            n_sink: 8,
            max_force: 1e6,
            samples_per_obstacle: 32,
            robot_radius: 0.1,
        }
    }
}

/// One field evaluation: decomposed resultants plus the gated step command.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSample {
    pub repulsive: Vec2,
    pub attractive: Vec2,
    /// Gated resultant.
    pub total: Vec2,
    pub heading: f64,
    /// Travel distance for the sojourn step.
    pub magnitude: f64,
    pub gated: bool,
    /// Distance to the nearest visible obstacle point.
    pub nearest: f64,
}

/// Disjointness threshold: neighbouring obstacles count as separate sources
/// only when their gap admits the robot with the `2 sqrt(3) r` margin.
pub fn obstacles_disjoint(a: &Obstacle, b: &Obstacle, robot_radius: f64) -> bool {
    match obstacle_gap(a, b) {
        Ok((gap, _)) => gap >= 2.0 * 3.0f64.sqrt() * robot_radius,
        Err(_) => false,
    }
}

/// Partition obstacles into merged groups: any pair below the disjointness
/// threshold fuses, transitively, into a single source.
pub fn merge_groups(obstacles: &[Obstacle], robot_radius: f64) -> Vec<Vec<usize>> {
    let n = obstacles.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            if !obstacles_disjoint(&obstacles[i], &obstacles[j], robot_radius) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    groups.into_values().collect()
}

/// Sum of inverse-square contributions, each pointing from the obstacle
/// point toward the robot. Distances below 1e-6 saturate at `max_force`.
pub fn repulsive_force(robot: Point2, points: &[Point2], params: &ForceParams) -> Vec2 {
    let k = params.force_constant * params.charge * params.charge;
    let mut f = Vec2::ZERO;
    for p in points {
        let away = Vec2::from_points(*p, robot);
        let d = away.norm();
        let mag = if d < 1e-6 {
            params.max_force
        } else {
            (k / (d * d)).min(params.max_force)
        };
        f = f.plus(away.normalized().scale(mag));
    }
    f
}

/// Interior sink particles of a gap segment: `n - 1` points evenly spaced at
/// `len / n` along the segment.
pub fn sink_particles(a: Point2, b: Point2, n: usize) -> Vec<Point2> {
    if n < 2 {
        return Vec::new();
    }
    (1..n)
        .map(|l| {
            let f = l as f64 / n as f64;
            Point2::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
        })
        .collect()
}

fn attractive_force(robot: Point2, sinks: &[Point2], params: &ForceParams) -> Vec2 {
    let k = params.force_constant * params.charge * params.charge;
    let mut f = Vec2::ZERO;
    for p in sinks {
        let toward = Vec2::from_points(robot, *p);
        let d = toward.norm();
        let mag = if d < 1e-6 {
            params.max_force
        } else {
            (k / (d * d)).min(params.max_force)
        };
        f = f.plus(toward.normalized().scale(mag));
    }
    f
}

/// Points of an obstacle's near face visible from the robot.
fn visible_points(obstacle: &Obstacle, robot: Point2, n: usize) -> Vec<Point2> {
    obstacle
        .boundary_samples(n)
        .into_iter()
        .filter(|q| {
            let mid = Point2::new(0.5 * (robot.x + q.x), 0.5 * (robot.y + q.y));
            !obstacle.contains(mid)
        })
        .collect()
}

/// Full field evaluation at the robot position: merged repulsive sources,
/// sink particles on admissible gaps between bearing-adjacent groups, and
/// the step-length gate.
///
/// With no visible obstacle the field is zero and the robot holds course.
pub fn total_force(
    robot: Point2,
    obstacles: &[Obstacle],
    params: &ForceParams,
) -> Result<FieldSample, LawError> {
    let groups = merge_groups(obstacles, params.robot_radius);
    total_force_grouped(robot, obstacles, &groups, params)
}

/// Field evaluation with a caller-supplied grouping, for engines that keep
/// merges sticky across steps.
pub fn total_force_grouped(
    robot: Point2,
    obstacles: &[Obstacle],
    groups: &[Vec<usize>],
    params: &ForceParams,
) -> Result<FieldSample, LawError> {
    struct GroupView {
        bearing: f64,
        first: Point2,
        last: Point2,
    }
    let mut all_points: Vec<Point2> = Vec::new();
    let mut views: Vec<GroupView> = Vec::new();
    for group in groups {
        let mut pts = Vec::new();
        for &i in group {
            if obstacles[i].contains(robot) {
                return Err(LawError::Geom(crate::error::GeomError::InsideObstacle));
            }
            pts.extend(visible_points(
                &obstacles[i],
                robot,
                params.samples_per_obstacle,
            ));
        }
        if pts.is_empty() {
            continue;
        }
        let centroid = {
            let (sx, sy) = pts
                .iter()
                .fold((0.0, 0.0), |acc, p| (acc.0 + p.x, acc.1 + p.y));
            Point2::new(sx / pts.len() as f64, sy / pts.len() as f64)
        };
        let bearing = Vec2::from_points(robot, centroid).angle();
        // Group extremes: widest angular span over member tangent extremes.
        let mut lo = (f64::INFINITY, pts[0]);
        let mut hi = (f64::NEG_INFINITY, pts[0]);
        for &i in group {
            if let Ok(arc) = visible_extremes(&obstacles[i], robot) {
                for e in [arc.first, arc.last] {
                    let rel = wrap_pi(Vec2::from_points(robot, e).angle() - bearing);
                    if rel < lo.0 {
                        lo = (rel, e);
                    }
                    if rel > hi.0 {
                        hi = (rel, e);
                    }
                }
            }
        }
        all_points.extend(pts);
        views.push(GroupView {
            bearing,
            first: lo.1,
            last: hi.1,
        });
    }

    if all_points.is_empty() {
        return Ok(FieldSample {
            repulsive: Vec2::ZERO,
            attractive: Vec2::ZERO,
            total: Vec2::ZERO,
            heading: 0.0,
            magnitude: 0.0,
            gated: false,
            nearest: f64::INFINITY,
        });
    }

    let repulsive = repulsive_force(robot, &all_points, params);

    // Sinks populate admissible gaps between bearing-adjacent groups; gaps
    // closed by merging never get particles because merged members share a
    // group.
    let mut sinks: Vec<Point2> = Vec::new();
    if views.len() >= 2 {
        let mut order: Vec<usize> = (0..views.len()).collect();
        order.sort_by(|&a, &b| views[a].bearing.partial_cmp(&views[b].bearing).unwrap());
        for w in order.windows(2) {
            let a = views[w[0]].last;
            let b = views[w[1]].first;
            if a.dist(b) >= 2.0 * 3.0f64.sqrt() * params.robot_radius {
                sinks.extend(sink_particles(a, b, params.n_sink));
            }
        }
    }
    let attractive = attractive_force(robot, &sinks, params);

    let raw = repulsive.plus(attractive);
    let (nearest, nearest_point) =
        all_points
            .iter()
            .fold((f64::INFINITY, all_points[0]), |acc, p| {
                let d = robot.dist(*p);
                if d < acc.0 {
                    (d, *p)
                } else {
                    acc
                }
            });
    // The field magnitude is a velocity; one sojourn integrates it into a
    // displacement, and the step-length gate caps that displacement whenever
    // it would reach half the nearest distance.
    let _ = nearest_point;
    let raw_travel = raw.norm() * params.sojourn_dt;
    let (travel, gated) = if raw_travel < 0.5 * nearest {
        (raw_travel, false)
    } else {
        ((0.5 * nearest - params.epsilon).max(0.0), true)
    };
    let total = raw.normalized().scale(travel);
    Ok(FieldSample {
        repulsive,
        attractive,
        heading: total.angle(),
        magnitude: travel,
        total,
        gated,
        nearest,
    })
}

/// One blind sojourn step: displace the gated magnitude along the field
/// heading. No sensing happens during the interval.
pub fn field_step(robot: Point2, sample: &FieldSample) -> Point2 {
    robot.add(Vec2::from_angle(sample.heading).scale(sample.magnitude))
}

/// Diagnostic interval of the nominal worst-case pursuit bound; reported
/// only, never used for stepping.
pub fn delta_t_diagnostic(robot_radius: f64, nearest: f64, obstacle_speed: f64) -> f64 {
    if obstacle_speed <= 0.0 {
        return f64::INFINITY;
    }
    (2.0 * robot_radius * nearest + std::f64::consts::PI * robot_radius * robot_radius)
        / obstacle_speed
}

/// Minimum robot-obstacle clearance over a recorded run, with the offending
/// sample index.
pub fn safety_check(samples: &[(Point2, Vec<Obstacle>)]) -> (f64, usize) {
    let mut min = (f64::INFINITY, 0usize);
    for (i, (robot, obstacles)) in samples.iter().enumerate() {
        for o in obstacles {
            let d = o.distance_to(*robot);
            if d < min.0 {
                min = (d, i);
            }
        }
    }
    min
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
