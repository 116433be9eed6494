//! Switching-navigation world: measure-decide-move cycles with blind hops,
//! dense clearance verification, seeded measurement noise, abort-and-halve
//! retries and an instrumented sensing counter.

use super::RunOutcome;
use crate::error::SimError;
use crate::geometry::{Obstacle, Point2, Vec2};
use crate::scenario::{ModeSpec, Scenario, SwitchingScenario};
use crate::switching::{
    dual_step_component, dual_step_resultant, energy_report, follower_update, gap_select,
    pesa_measure, pesa_step, ChainTeam, EnergyParams, PesaMeasurement, SwitchingMode,
    SwitchingParams,
};
use crate::trace::{AgentRecord, Event, SimTrace, StepRecord, TraceHeader};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const HOP_SAMPLES: usize = 64;
const MAX_RETRIES: u32 = 4;

/// A verified hop: destination, heading, travel, and the closed-form
/// magnitude when the mode defines one.
type PlannedHop = Option<(Point2, f64, f64, Option<f64>)>;

pub struct SwitchingWorld {
    params: SwitchingParams,
    obstacles: Vec<Obstacle>,
    chain: ChainTeam,
    /// Independent robot positions in the decentralized variant.
    solo: Vec<Point2>,
    target: Point2,
    target_radius: f64,
    max_steps: u64,
    noise: bool,
    energy_spec: Option<crate::scenario::EnergySpec>,
    /// Executed switching points of robot 1 (the leader or solo robot 0).
    switch_path: Vec<Point2>,
    t: f64,
    steps: u64,
    sensing_calls: u64,
    min_clearance: f64,
    rng: ChaCha8Rng,
    trace: SimTrace,
    outcome: RunOutcome,
    done: bool,
}

impl SwitchingWorld {
    pub fn build(scenario: &Scenario, seed: u64) -> Result<SwitchingWorld, SimError> {
        let spec: &SwitchingScenario = match &scenario.spec {
            ModeSpec::Switching(s) => s,
            _ => return Err(SimError::BadScenario("not a switching scenario".into())),
        };
        let params = SwitchingParams::new(
            spec.epsilon_m,
            spec.mu0_m,
            spec.sensing_radius_m,
            spec.robot_radius_m,
            spec.variant,
        )?;
        let obstacles: Result<Vec<Obstacle>, SimError> =
            spec.obstacles.iter().map(|o| o.build()).collect();
        let positions: Vec<Point2> = spec
            .robots_m
            .iter()
            .map(|p| Point2::new(p[0], p[1]))
            .collect();
        let header = TraceHeader {
            scenario_hash: scenario.hash(),
            seed,
            mode: "switching".into(),
            dt_s: scenario.dt_s,
        };
        let start = positions[0];
        Ok(SwitchingWorld {
            params,
            obstacles: obstacles?,
            chain: ChainTeam::new(positions.clone(), spec.chain_spacing_m),
            solo: positions,
            target: Point2::new(spec.target_m[0], spec.target_m[1]),
            target_radius: spec.target_radius_m,
            max_steps: spec.max_switching_steps,
            noise: spec.measurement_noise,
            energy_spec: spec.energy.clone(),
            switch_path: vec![start],
            t: 0.0,
            steps: 0,
            sensing_calls: 0,
            min_clearance: f64::INFINITY,
            rng: ChaCha8Rng::seed_from_u64(seed),
            trace: SimTrace::new(header),
            outcome: RunOutcome {
                mode: "switching".into(),
                seed,
                ..Default::default()
            },
            done: false,
        })
    }

    /// One sensor snapshot: all obstacles measured from `pos`, each with
    /// seeded noise bounded by mu0 when enabled. Counts sensing calls.
    fn sense(&mut self, pos: Point2) -> Result<Vec<(usize, PesaMeasurement)>, SimError> {
        let mut out = Vec::new();
        for (i, o) in self.obstacles.iter().enumerate() {
            self.sensing_calls += 1;
            if let Some(mut m) = pesa_measure(pos, o, &self.params).map_err(SimError::Law)? {
                if self.noise {
                    let e1: f64 = self.rng.random_range(-self.params.mu0..=self.params.mu0);
                    let e2: f64 = self.rng.random_range(-self.params.mu0..=self.params.mu0);
                    m.chord = (m.chord + e1).max(1e-6);
                    m.clearance = (m.clearance + e2).max(0.0);
                }
                out.push((i, m));
            }
        }
        // Nearest obstacle first.
        out.sort_by(|a, b| a.1.clearance.partial_cmp(&b.1.clearance).unwrap());
        Ok(out)
    }

    /// True minimum clearance to every obstacle over a straight hop,
    /// densely sampled; verification only, not a sensing call.
    fn hop_clearances(&self, from: Point2, to: Point2) -> Vec<f64> {
        let mut mins = vec![f64::INFINITY; self.obstacles.len()];
        for k in 0..=HOP_SAMPLES {
            let f = k as f64 / HOP_SAMPLES as f64;
            let p = Point2::new(from.x + (to.x - from.x) * f, from.y + (to.y - from.y) * f);
            for (i, o) in self.obstacles.iter().enumerate() {
                mins[i] = mins[i].min(o.distance_to(p));
            }
        }
        mins
    }

    /// Plan one hop from `pos`: mode-specific decide step with
    /// abort-and-halve on predicted clearance violation.
    fn plan_hop(
        &mut self,
        pos: Point2,
        events: &mut Vec<Event>,
        robot: usize,
    ) -> Result<PlannedHop, SimError> {
        let sensed = self.sense(pos)?;
        let toward_target = Vec2::from_points(pos, self.target).normalized();
        // A straight hop with full epsilon comfort wins outright; the gap
        // machinery only engages when the direct run is obstructed.
        if !sensed.is_empty() {
            let travel = (0.5 * self.params.sensing_radius).min(pos.dist(self.target));
            let to = pos.add(toward_target.scale(travel));
            let clear = self
                .hop_clearances(pos, to)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if clear >= self.params.epsilon {
                return Ok(Some((to, toward_target.angle(), travel, None)));
            }
        }
        let (to, heading, travel, closed_form) = if sensed.is_empty() {
            // Nothing in range: straight travel toward the target, half the
            // sensing horizon.
            let travel = (0.5 * self.params.sensing_radius).min(pos.dist(self.target));
            (
                pos.add(toward_target.scale(travel)),
                toward_target.angle(),
                travel,
                None,
            )
        } else if sensed.len() == 1 {
            let (next, heading, travel) = pesa_step(pos, &sensed[0].1, &self.params, toward_target);
            (next, heading, travel, None)
        } else {
            // Candidate gaps between measured obstacle pairs, ahead of the
            // robot where possible.
            let mut gaps: Vec<(f64, f64, usize, usize, Point2)> = Vec::new();
            for a in 0..sensed.len() {
                for b in a + 1..sensed.len() {
                    let (ia, ib) = (sensed[a].0, sensed[b].0);
                    if let Ok((width, (pa, pb))) =
                        crate::geometry::obstacle_gap(&self.obstacles[ia], &self.obstacles[ib])
                    {
                        let mid = Point2::new(0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y));
                        let heading = Vec2::from_points(pos, mid).angle();
                        gaps.push((width, heading, a, b, mid));
                    }
                }
            }
            // Only gaps ahead and not already occupied are worth threading;
            // with every gap behind, the passage is done and the robot
            // wall-follows or runs straight for the target.
            let ahead: Vec<&(f64, f64, usize, usize, Point2)> = gaps
                .iter()
                .filter(|(_, h, _, _, mid)| {
                    Vec2::from_angle(*h).dot(toward_target) > 0.0
                        && pos.dist(*mid) > self.params.epsilon
                })
                .collect();
            if ahead.is_empty() {
                let nearest = &sensed[0].1;
                let (next, heading, travel) =
                    if nearest.clearance < self.params.epsilon + 2.0 * self.params.mu0 {
                        pesa_step(pos, nearest, &self.params, toward_target)
                    } else {
                        let travel = (0.5 * self.params.sensing_radius).min(pos.dist(self.target));
                        (
                            pos.add(toward_target.scale(travel)),
                            toward_target.angle(),
                            travel,
                        )
                    };
                return self.verify_hop(pos, next, heading, travel, None, events, robot);
            }
            let pool: Vec<(f64, f64)> = ahead.iter().map(|(w, h, _, _, _)| (*w, *h)).collect();
            let chosen = match gap_select(&pool, toward_target.angle(), &self.params) {
                Ok(c) => c,
                Err(_) => {
                    events.push(Event::Blocked { robot });
                    self.outcome.blocked = true;
                    return Ok(None);
                }
            };
            let (_, _, a, b, _) = *ahead[chosen.index];
            let (near, far) = if sensed[a].1.clearance <= sensed[b].1.clearance {
                (&sensed[a].1, &sensed[b].1)
            } else {
                (&sensed[b].1, &sensed[a].1)
            };
            let (next, heading, travel, cf) = match self.params.mode {
                SwitchingMode::MultiObstacle => {
                    let (next, heading, travel, cf) =
                        dual_step_resultant(pos, near, far, &self.params, toward_target);
                    (next, heading, travel, Some(cf))
                }
                SwitchingMode::Decentralized => {
                    let (next, heading, travel) = dual_step_component(pos, near, far, &self.params);
                    (next, heading, travel, None)
                }
                SwitchingMode::SingleObstacle => {
                    let (next, heading, travel) = pesa_step(pos, near, &self.params, toward_target);
                    (next, heading, travel, None)
                }
            };
            // Progress guard: a constructed hop pointing backward means the
            // pair is effectively passed; wall-follow or run straight
            // instead of threading in reverse.
            if Vec2::from_angle(heading).dot(toward_target) < 0.0 {
                let nearest = &sensed[0].1;
                let (next, heading, travel) =
                    if nearest.clearance < self.params.epsilon + 2.0 * self.params.mu0 {
                        pesa_step(pos, nearest, &self.params, toward_target)
                    } else {
                        let travel = (0.5 * self.params.sensing_radius).min(pos.dist(self.target));
                        (
                            pos.add(toward_target.scale(travel)),
                            toward_target.angle(),
                            travel,
                        )
                    };
                (next, heading, travel, None)
            } else {
                (next, heading, travel, cf)
            }
        };

        self.verify_hop(pos, to, heading, travel, closed_form, events, robot)
    }

    /// Abort-and-halve with a wall-follow detour: the planned hop halves
    /// until its predicted clearance clears the band floor epsilon - mu0;
    /// when retries run out the robot tries the station step along its
    /// nearest obstacle before declaring itself blocked.
    #[allow(clippy::too_many_arguments)]
    fn verify_hop(
        &mut self,
        pos: Point2,
        to: Point2,
        heading: f64,
        travel: f64,
        closed_form: Option<f64>,
        events: &mut Vec<Event>,
        robot: usize,
    ) -> Result<PlannedHop, SimError> {
        if let Some(hop) = self.halve_until_safe(pos, to, heading, travel) {
            return Ok(Some((hop.0, hop.1, hop.2, closed_form)));
        }
        // Detour: ride the nearest obstacle's wall station toward the
        // target instead.
        let toward_target = Vec2::from_points(pos, self.target).normalized();
        let mut best: Option<(f64, PesaMeasurement)> = None;
        for i in 0..self.obstacles.len() {
            self.sensing_calls += 1;
            if let Some(m) =
                pesa_measure(pos, &self.obstacles[i], &self.params).map_err(SimError::Law)?
            {
                if best.as_ref().is_none_or(|(c, _)| m.clearance < *c) {
                    best = Some((m.clearance, m));
                }
            }
        }
        if let Some((_, m)) = best {
            let (next, heading, travel) = pesa_step(pos, &m, &self.params, toward_target);
            if let Some(hop) = self.halve_until_safe(pos, next, heading, travel) {
                return Ok(Some((hop.0, hop.1, hop.2, None)));
            }
        }
        events.push(Event::Blocked { robot });
        self.outcome.blocked = true;
        Ok(None)
    }

    fn halve_until_safe(
        &self,
        pos: Point2,
        to: Point2,
        heading: f64,
        travel: f64,
    ) -> Option<(Point2, f64, f64)> {
        // Standing at (or below) the floor must not freeze the robot: the
        // hop is judged against the floor or the current clearance,
        // whichever is already lower.
        let start_clear = self
            .obstacles
            .iter()
            .map(|o| o.distance_to(pos))
            .fold(f64::INFINITY, f64::min);
        let threshold = (self.params.epsilon - self.params.mu0).min(start_clear);
        let mut to = to;
        let mut travel = travel;
        let mut retries = 0u32;
        loop {
            let predicted = self
                .hop_clearances(pos, to)
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            if predicted >= threshold - 1e-12 || travel < 1e-9 {
                return Some((to, heading, travel));
            }
            retries += 1;
            if retries > MAX_RETRIES {
                return None;
            }
            travel *= 0.5;
            let dir = Vec2::from_angle(heading);
            to = pos.add(dir.scale(travel));
        }
    }

    pub fn step(&mut self) -> Result<bool, SimError> {
        if self.done {
            return Ok(false);
        }
        let mut events: Vec<Event> = Vec::new();
        self.steps += 1;
        let index = self.steps;

        match self.params.mode {
            SwitchingMode::SingleObstacle | SwitchingMode::MultiObstacle => {
                let leader_prev = self.chain.positions[0];
                match self.plan_hop(leader_prev, &mut events, 0)? {
                    None => {
                        self.done = true;
                    }
                    Some((to, heading, travel, closed_form)) => {
                        let clearances = self.hop_clearances(leader_prev, to);
                        let min_here = clearances.iter().fold(f64::INFINITY, |a, b| a.min(*b));
                        if min_here < self.min_clearance {
                            self.min_clearance = min_here;
                            events.push(Event::ClearanceMin {
                                robot: 0,
                                value: min_here,
                            });
                        }
                        let calls = self.sensing_calls;
                        events.push(Event::SwitchingPoint {
                            robot: 0,
                            index,
                            chord: 2.0 * travel,
                            heading,
                            travel,
                            clearances,
                            sensing_calls: calls,
                            closed_form,
                        });
                        self.chain.positions[0] = to;
                        follower_update(&mut self.chain, leader_prev, travel);
                        self.switch_path.push(to);
                    }
                }
            }
            SwitchingMode::Decentralized => {
                for r in 0..self.solo.len() {
                    if self.solo[r].dist(self.target) <= self.target_radius {
                        continue;
                    }
                    let prev = self.solo[r];
                    match self.plan_hop(prev, &mut events, r)? {
                        None => {}
                        Some((to, heading, travel, closed_form)) => {
                            let clearances = self.hop_clearances(prev, to);
                            let min_here = clearances.iter().fold(f64::INFINITY, |a, b| a.min(*b));
                            if min_here < self.min_clearance {
                                self.min_clearance = min_here;
                                events.push(Event::ClearanceMin {
                                    robot: r,
                                    value: min_here,
                                });
                            }
                            let calls = self.sensing_calls;
                            events.push(Event::SwitchingPoint {
                                robot: r,
                                index,
                                chord: 2.0 * travel,
                                heading,
                                travel,
                                clearances,
                                sensing_calls: calls,
                                closed_form,
                            });
                            self.solo[r] = to;
                            if r == 0 {
                                self.switch_path.push(to);
                            }
                        }
                    }
                }
            }
        }

        self.t += 1.0; // event-driven: one unit per switching step
        let positions: Vec<Point2> = match self.params.mode {
            SwitchingMode::Decentralized => self.solo.clone(),
            _ => self.chain.positions.clone(),
        };
        let agents: Vec<AgentRecord> = positions.iter().map(|p| AgentRecord::at(*p)).collect();
        self.trace.push(StepRecord {
            t: self.t,
            agents: agents.clone(),
            intruders: vec![],
            events,
            w: None,
            clearance: if self.min_clearance.is_finite() {
                Some(self.min_clearance)
            } else {
                None
            },
        });

        let arrived = match self.params.mode {
            SwitchingMode::Decentralized => self
                .solo
                .iter()
                .all(|p| p.dist(self.target) <= self.target_radius),
            _ => self.chain.positions[0].dist(self.target) <= self.target_radius,
        };
        if arrived || self.steps >= self.max_steps || self.done {
            self.done = true;
            self.outcome.switching_points = Some(self.switch_path.len() as u64 - 1);
            self.outcome.sensing_calls = Some(self.sensing_calls);
            self.outcome.min_clearance = if self.min_clearance.is_finite() {
                Some(self.min_clearance)
            } else {
                None
            };
            if let Some(e) = &self.energy_spec {
                self.outcome.energy = Some(energy_report(
                    &self.switch_path,
                    &EnergyParams {
                        speed: e.speed_mps,
                        packet_period: e.packet_period_s,
                        c_s0: e.c_s0,
                        c_s1: e.c_s1,
                        reference_baseline: e.reference_baseline,
                    },
                ));
            }
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

    pub fn positions(&self) -> Vec<Point2> {
        match self.params.mode {
            SwitchingMode::Decentralized => self.solo.clone(),
            _ => self.chain.positions.clone(),
        }
    }
}
