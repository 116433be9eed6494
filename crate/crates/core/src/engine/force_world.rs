//! Force-field world: one robot stepping a sojourn-gated field among moving
//! obstacles, with sticky merging and densely verified clearances.

use super::RunOutcome;
use crate::error::SimError;
use crate::force_field::{field_step, total_force_grouped, ForceParams};
use crate::geometry::{Obstacle, Point2, Vec2};
use crate::scenario::{ForceFieldScenario, ModeSpec, Scenario};
use crate::trace::{AgentRecord, Event, SimTrace, StepRecord, TraceHeader};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CLEARANCE_SAMPLES: usize = 64;

struct MotionScript {
    waypoints: Vec<Point2>,
    speed: f64,
    next: usize,
}

pub struct ForceFieldWorld {
    params: ForceParams,
    robot: Point2,
    arena_radius: f64,
    obstacles: Vec<Obstacle>,
    scripts: Vec<Option<MotionScript>>,
    /// Sticky merged pairs: once fused, always one source.
    merged: std::collections::BTreeSet<(usize, usize)>,
    dump_field: bool,
    t: f64,
    steps: u64,
    max_steps: u64,
    min_clearance: f64,
    trace: SimTrace,
    outcome: RunOutcome,
    done: bool,
}

impl ForceFieldWorld {
    pub fn build(scenario: &Scenario, seed: u64) -> Result<ForceFieldWorld, SimError> {
        let spec: &ForceFieldScenario = match &scenario.spec {
            ModeSpec::ForceField(f) => f,
            _ => return Err(SimError::BadScenario("not a force_field scenario".into())),
        };
        let params = ForceParams {
            epsilon: spec.epsilon_m,
            sojourn_dt: spec.sojourn_dt_s,
            n_sink: spec.n_sink,
            robot_radius: spec.robot_radius_m,
            force_constant: spec.force_constant,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut obstacles = Vec::with_capacity(spec.obstacles.len());
        let mut scripts = Vec::with_capacity(spec.obstacles.len());
        for o in &spec.obstacles {
            let mut obstacle = o.build()?;
            if spec.position_jitter_m > 0.0 {
                let jx: f64 = rng.random_range(-spec.position_jitter_m..=spec.position_jitter_m);
                let jy: f64 = rng.random_range(-spec.position_jitter_m..=spec.position_jitter_m);
                obstacle.position = Point2::new(obstacle.position.x + jx, obstacle.position.y + jy);
            }
            scripts.push(o.waypoints_m.as_ref().map(|w| MotionScript {
                waypoints: w.iter().map(|p| Point2::new(p[0], p[1])).collect(),
                speed: o.waypoint_speed_mps.unwrap_or(0.5),
                next: 0,
            }));
            obstacles.push(obstacle);
        }
        let header = TraceHeader {
            scenario_hash: scenario.hash(),
            seed,
            mode: "force_field".into(),
            dt_s: spec.sojourn_dt_s,
        };
        Ok(ForceFieldWorld {
            params,
            robot: Point2::new(spec.robot_start_m[0], spec.robot_start_m[1]),
            arena_radius: spec.arena_radius_m,
            obstacles,
            scripts,
            merged: Default::default(),
            dump_field: spec.dump_field,
            t: 0.0,
            steps: 0,
            max_steps: (scenario.duration_s / spec.sojourn_dt_s).ceil() as u64,
            min_clearance: f64::INFINITY,
            trace: SimTrace::new(header),
            outcome: RunOutcome {
                mode: "force_field".into(),
                seed,
                ..Default::default()
            },
            done: false,
        })
    }

    /// Update the sticky merge set and return the resulting groups: once two
    /// obstacles violate the disjointness threshold, every later field
    /// sample treats them as one source.
    fn update_merges(&mut self, events: &mut Vec<Event>) -> Vec<Vec<usize>> {
        let n = self.obstacles.len();
        for i in 0..n {
            for j in i + 1..n {
                if self.merged.contains(&(i, j)) {
                    continue;
                }
                if !crate::force_field::obstacles_disjoint(
                    &self.obstacles[i],
                    &self.obstacles[j],
                    self.params.robot_radius,
                ) {
                    self.merged.insert((i, j));
                    events.push(Event::ObstaclesMerged { a: i, b: j });
                }
            }
        }
        // Union-find over the sticky pairs.
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let r = find(parent, parent[i]);
                parent[i] = r;
            }
            parent[i]
        }
        for &(i, j) in &self.merged {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri] = rj;
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..n {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        groups.into_values().collect()
    }

    pub fn step(&mut self) -> Result<bool, SimError> {
        if self.done {
            return Ok(false);
        }
        let mut events: Vec<Event> = Vec::new();
        let groups = self.update_merges(&mut events);

        let prev_robot = self.robot;
        let prev_obstacles = self.obstacles.clone();
        let sample = total_force_grouped(self.robot, &self.obstacles, &groups, &self.params)
            .map_err(SimError::Law)?;
        self.robot = field_step(self.robot, &sample);
        // The region is bounded; its boundary is impenetrable.
        let r = self.robot.norm();
        if r > self.arena_radius {
            self.robot = Point2::new(
                self.robot.x * self.arena_radius / r,
                self.robot.y * self.arena_radius / r,
            );
        }

        // Obstacle motion over the sojourn interval.
        let dt = self.params.sojourn_dt;
        for (o, script) in self.obstacles.iter_mut().zip(&mut self.scripts) {
            if let Some(s) = script {
                if !s.waypoints.is_empty() {
                    let goal = s.waypoints[s.next % s.waypoints.len()];
                    let to_goal = Vec2::from_points(o.position, goal);
                    if to_goal.norm() <= s.speed * dt {
                        s.next = (s.next + 1) % s.waypoints.len();
                    }
                    o.velocity = to_goal.normalized().scale(s.speed);
                }
            }
            o.step_motion(dt);
        }

        // Dense clearance verification across the interval, interpolating
        // robot and obstacle motion.
        let mut min_here = f64::INFINITY;
        for k in 0..=CLEARANCE_SAMPLES {
            let f = k as f64 / CLEARANCE_SAMPLES as f64;
            let rp = Point2::new(
                prev_robot.x + (self.robot.x - prev_robot.x) * f,
                prev_robot.y + (self.robot.y - prev_robot.y) * f,
            );
            for (o_prev, o_now) in prev_obstacles.iter().zip(&self.obstacles) {
                let mut o = o_prev.clone();
                o.position = Point2::new(
                    o_prev.position.x + (o_now.position.x - o_prev.position.x) * f,
                    o_prev.position.y + (o_now.position.y - o_prev.position.y) * f,
                );
                o.rotation = o_prev.rotation + (o_now.rotation - o_prev.rotation) * f;
                min_here = min_here.min(o.distance_to(rp));
            }
        }
        if min_here < self.min_clearance {
            self.min_clearance = min_here;
            events.push(Event::ClearanceMin {
                robot: 0,
                value: min_here,
            });
        }

        self.t += dt;
        self.steps += 1;
        let robot_record = if self.dump_field {
            AgentRecord {
                x: self.robot.x,
                y: self.robot.y,
                theta: Some(sample.heading),
                control: Some(sample.magnitude),
                arc: None,
            }
        } else {
            AgentRecord::at(self.robot)
        };
        let intruders: Vec<AgentRecord> = self
            .obstacles
            .iter()
            .map(|o| AgentRecord::at(o.position))
            .collect();
        self.trace.push(StepRecord {
            t: self.t,
            agents: vec![robot_record],
            intruders,
            events,
            w: None,
            clearance: Some(min_here),
        });

        if self.steps >= self.max_steps {
            self.done = true;
            self.outcome.min_clearance = Some(self.min_clearance);
        }
        self.outcome.steps = self.steps;
        Ok(!self.done)
    }

    pub fn outcome(&self) -> RunOutcome {
        self.outcome.clone()
    }

    pub fn trace(&self) -> &SimTrace {
        &self.trace
    }

    pub fn robot(&self) -> Point2 {
        self.robot
    }
}
