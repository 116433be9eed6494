//! Intruder motion strategies: the proof-derived worst case, a seeded
//! outward-drifting random walk, and scripted waypoint loops.

use crate::geometry::{Point2, Vec2};
use crate::scenario::StrategySpec;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub enum Strategy {
    WorstCase {
        replan_every: Option<u64>,
        target: Option<Point2>,
        steps_since_plan: u64,
    },
    RandomWalk {
        outward_bias: f64,
    },
    Waypoints {
        points: Vec<Point2>,
        next: usize,
    },
}

impl Strategy {
    pub fn from_spec(spec: &StrategySpec) -> Strategy {
        match spec {
            StrategySpec::WorstCase { replan_every } => Strategy::WorstCase {
                replan_every: *replan_every,
                target: None,
                steps_since_plan: 0,
            },
            StrategySpec::RandomWalk { outward_bias } => Strategy::RandomWalk {
                outward_bias: *outward_bias,
            },
            StrategySpec::Waypoints { points_m } => Strategy::Waypoints {
                points: points_m.iter().map(|p| Point2::new(p[0], p[1])).collect(),
                next: 0,
            },
        }
    }

    /// React to an interception bounce: worst-case adversaries re-plan,
    /// scripted walkers give up on the blocked waypoint and move on.
    pub fn invalidate_plan(&mut self) {
        match self {
            Strategy::WorstCase {
                target,
                steps_since_plan,
                ..
            } => {
                *target = None;
                *steps_since_plan = 0;
            }
            Strategy::Waypoints { points, next } => {
                if !points.is_empty() {
                    *next = (*next + 1) % points.len();
                }
            }
            Strategy::RandomWalk { .. } => {}
        }
    }

    /// Velocity command for the next step, speed-capped at `v_max`.
    ///
    /// `danger_argmax` supplies the boundary point attaining the danger
    /// supremum; `outward` is the unit direction from the intruder to the
    /// nearest guarded boundary point, used by the random walk drift.
    pub fn velocity(
        &mut self,
        pos: Point2,
        v_max: f64,
        dt: f64,
        rng: &mut ChaCha8Rng,
        outward: Vec2,
        danger_argmax: &mut dyn FnMut() -> Point2,
    ) -> Vec2 {
        match self {
            Strategy::WorstCase {
                replan_every,
                target,
                steps_since_plan,
            } => {
                let need_plan = match (target.as_ref(), replan_every) {
                    (None, _) => true,
                    (Some(_), Some(n)) => *steps_since_plan >= *n,
                    (Some(_), None) => false,
                };
                if need_plan {
                    *target = Some(danger_argmax());
                    *steps_since_plan = 0;
                }
                *steps_since_plan += 1;
                let goal = target.expect("planned above");
                let to_goal = Vec2::from_points(pos, goal);
                let dist = to_goal.norm();
                if dist <= v_max * dt {
                    // Final partial step lands exactly on the target.
                    to_goal.scale(1.0 / dt)
                } else {
                    to_goal.normalized().scale(v_max)
                }
            }
            Strategy::RandomWalk { outward_bias } => {
                let angle = rng.random_range(0.0..std::f64::consts::TAU);
                let dir = Vec2::from_angle(angle)
                    .plus(outward.scale(*outward_bias))
                    .normalized();
                dir.scale(v_max)
            }
            Strategy::Waypoints { points, next } => {
                if points.is_empty() {
                    return Vec2::ZERO;
                }
                let goal = points[*next % points.len()];
                let to_goal = Vec2::from_points(pos, goal);
                if to_goal.norm() <= v_max * dt {
                    *next = (*next + 1) % points.len();
                    to_goal.scale(1.0 / dt)
                } else {
                    to_goal.normalized().scale(v_max)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn worst_case_commits_without_replan() {
        let mut s = Strategy::from_spec(&StrategySpec::WorstCase { replan_every: None });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut plans = 0;
        for _ in 0..5 {
            s.velocity(
                Point2::new(0.0, 0.0),
                1.0,
                0.1,
                &mut rng,
                Vec2::new(0.0, -1.0),
                &mut || {
                    plans += 1;
                    Point2::new(10.0, 0.0)
                },
            );
        }
        assert_eq!(plans, 1, "committed adversary plans once");
    }

    #[test]
    fn worst_case_replans_on_schedule() {
        let mut s = Strategy::from_spec(&StrategySpec::WorstCase {
            replan_every: Some(2),
        });
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut plans = 0;
        for _ in 0..6 {
            s.velocity(
                Point2::new(0.0, 0.0),
                1.0,
                0.1,
                &mut rng,
                Vec2::ZERO,
                &mut || {
                    plans += 1;
                    Point2::new(10.0, 0.0)
                },
            );
        }
        assert_eq!(plans, 3);
    }

    #[test]
    fn random_walk_reproducible() {
        let spec = StrategySpec::RandomWalk { outward_bias: 0.5 };
        let run = |seed: u64| {
            let mut s = Strategy::from_spec(&spec);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..10)
                .map(|_| {
                    let v = s.velocity(
                        Point2::new(0.0, 0.0),
                        2.0,
                        0.1,
                        &mut rng,
                        Vec2::new(0.0, 1.0),
                        &mut || Point2::new(0.0, 0.0),
                    );
                    (v.x, v.y)
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
        assert_ne!(run(42), run(43));
    }

    #[test]
    fn waypoints_advance_and_loop() {
        let spec = StrategySpec::Waypoints {
            points_m: vec![[1.0, 0.0], [1.0, 1.0]],
        };
        let mut s = Strategy::from_spec(&spec);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut pos = Point2::new(0.0, 0.0);
        for _ in 0..100 {
            let v = s.velocity(pos, 1.0, 0.1, &mut rng, Vec2::ZERO, &mut || pos);
            pos = pos.add(v.scale(0.1));
        }
        // After enough steps the walker orbits the two waypoints.
        assert!(pos.dist(Point2::new(1.0, 0.5)) < 1.0);
    }
}
