//! Boundary-interception world: robots on an open curve segment against one
//! planar intruder.

use super::strategy::Strategy;
use super::RunOutcome;
use crate::boundary::{
    control_law, feasibility, intercept_check_at, lyapunov_w, worst_case_intruder_target,
    BoundaryTeam, IntruderState,
};
use crate::error::SimError;
use crate::geometry::{ParamCurve, Point2, Vec2};
use crate::scenario::{BoundaryScenario, BoundaryShape, ModeSpec, Scenario};
use crate::trace::{AgentRecord, Event, SimTrace, StepRecord, TraceHeader};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct BoundaryWorld {
    team: BoundaryTeam,
    v_i_max: f64,
    visible_from: f64,
    intruder: Point2,
    strategy: Strategy,
    t: f64,
    dt: f64,
    duration: f64,
    steps: u64,
    rng: ChaCha8Rng,
    trace: SimTrace,
    /// Record the danger certificate every step.
    pub record_w: bool,
    tie_streak: Vec<u64>,
    max_crossings: u64,
    outcome: RunOutcome,
    margin_evaluated: bool,
    done: bool,
}

pub(super) fn build_curve(shape: &BoundaryShape) -> Result<ParamCurve, SimError> {
    match shape {
        BoundaryShape::Straight { from_m, to_m } => ParamCurve::line(
            Point2::new(from_m[0], from_m[1]),
            Point2::new(to_m[0], to_m[1]),
        )
        .map_err(SimError::Geom),
        BoundaryShape::Arc {
            center_m,
            radius_m,
            start_angle_rad,
            end_angle_rad,
        } => ParamCurve::circle_arc(
            Point2::new(center_m[0], center_m[1]),
            *radius_m,
            *start_angle_rad,
            *end_angle_rad,
        )
        .map_err(SimError::Geom),
    }
}

impl BoundaryWorld {
    pub fn build(scenario: &Scenario, seed: u64) -> Result<BoundaryWorld, SimError> {
        let spec: &BoundaryScenario = match &scenario.spec {
            ModeSpec::Boundary(b) => b,
            _ => return Err(SimError::BadScenario("not a boundary scenario".into())),
        };
        let curve = build_curve(&spec.boundary)?;
        let team = BoundaryTeam::new(
            curve,
            spec.robots_arc_m.clone(),
            spec.v_r_max_mps,
            spec.k,
            spec.epsilon_m,
        )?;
        let n = team.n();
        let header = TraceHeader {
            scenario_hash: scenario.hash(),
            seed,
            mode: "boundary".into(),
            dt_s: scenario.dt_s,
        };
        Ok(BoundaryWorld {
            team,
            v_i_max: spec.intruder.v_i_max_mps,
            visible_from: spec.intruder.visible_from_s,
            intruder: Point2::new(spec.intruder.start_m[0], spec.intruder.start_m[1]),
            strategy: Strategy::from_spec(&spec.intruder.strategy),
            t: 0.0,
            dt: scenario.dt_s,
            duration: scenario.duration_s,
            steps: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            trace: SimTrace::new(header),
            record_w: true,
            tie_streak: vec![0; n],
            max_crossings: spec.max_crossings.max(1),
            outcome: RunOutcome {
                mode: "boundary".into(),
                seed,
                ..Default::default()
            },
            margin_evaluated: false,
            done: false,
        })
    }

    fn intruder_state(&self) -> IntruderState {
        IntruderState {
            pos: self.intruder,
            v_i_max: self.v_i_max,
            visible_since: self.visible_from,
        }
    }

    pub fn step(&mut self) -> Result<bool, SimError> {
        if self.done {
            return Ok(false);
        }
        let visible = self.t >= self.visible_from;
        let mut events: Vec<Event> = Vec::new();

        if visible && !self.margin_evaluated {
            let (ok, margin) = feasibility(&self.team, &self.intruder_state());
            self.outcome.feasible = Some(ok);
            self.outcome.margin = Some(margin);
            self.margin_evaluated = true;
        }

        // Robot controls and integration with order clamping.
        let controls = if visible {
            control_law(&self.team, &self.intruder_state())?
        } else {
            vec![0.0; self.team.n()]
        };
        let l = self.team.length();
        let prev_coords = self.team.coords.clone();
        let mut new_coords: Vec<f64> = prev_coords
            .iter()
            .zip(&controls)
            .map(|(c, u)| (c + u * self.dt).clamp(0.0, l))
            .collect();
        // Midpoint-contact clamp preserves the labeling order.
        for _ in 0..new_coords.len() {
            let mut clean = true;
            for i in 0..new_coords.len().saturating_sub(1) {
                if new_coords[i] > new_coords[i + 1] {
                    let m = 0.5 * (new_coords[i] + new_coords[i + 1]);
                    new_coords[i] = m;
                    new_coords[i + 1] = m;
                    events.push(Event::OrderClamp { a: i, b: i + 1 });
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        self.team.coords = new_coords;

        // Tie bookkeeping: a persistent zero control on an interior robot
        // means the danger pair keeps tying.
        for (i, u) in controls.iter().enumerate() {
            let idx = i + 1;
            let interior = idx >= self.team.k && idx <= self.team.n() - self.team.k + 1;
            if visible && interior && *u == 0.0 {
                self.tie_streak[i] += 1;
                if self.tie_streak[i] == 11 {
                    events.push(Event::TiePersist {
                        robot: i,
                        steps: self.tie_streak[i],
                    });
                }
            } else {
                self.tie_streak[i] = 0;
            }
        }

        // Intruder motion.
        let prev_pos = self.intruder;
        let (_, nearest_curve_pt, _) = self.team.curve.nearest_point(prev_pos);
        let outward = Vec2::from_points(prev_pos, nearest_curve_pt).normalized();
        let team_ref = &self.team;
        let state = self.intruder_state();
        let v = self.strategy.velocity(
            prev_pos,
            self.v_i_max,
            self.dt,
            &mut self.rng,
            outward,
            &mut || worst_case_intruder_target(team_ref, &state),
        );
        if v.norm() > self.v_i_max + 1e-9 {
            return Err(SimError::InvariantFault {
                step: self.steps,
                what: format!("intruder speed {} exceeds cap {}", v.norm(), self.v_i_max),
            });
        }
        let new_pos = prev_pos.add(v.scale(self.dt));
        self.intruder = new_pos;

        // Crossing detection with sub-step interpolation. Crossing means
        // membership of the curve, so both transversal intersections and
        // on-curve landings (grazing approaches, slides along the boundary)
        // count. A met crossing bounces the intruder back; an unmet one ends
        // the run with an escape.
        let crossing = self
            .team
            .curve
            .segment_crossing(prev_pos, new_pos)
            .or_else(|| {
                let (_, point, dist) = self.team.curve.nearest_point(new_pos);
                if dist <= 1e-7 * self.team.length().max(1.0) {
                    Some((1.0, point))
                } else {
                    None
                }
            });
        if let Some((frac, point)) = crossing {
            self.outcome.crossings += 1;
            events.push(Event::Crossing {
                intruder: 0,
                x: point.x,
                y: point.y,
                arc: None,
                frac,
            });
            let s_cross = self.team.curve.arc_coord(point).map_err(SimError::Geom)?;
            // Robot coordinates interpolated to the crossing instant.
            let interp: Vec<f64> = prev_coords
                .iter()
                .zip(&self.team.coords)
                .map(|(a, b)| a + (b - a) * frac)
                .collect();
            let mut team_at = self.team.clone();
            team_at.coords = interp;
            let (ok, witnesses) = intercept_check_at(&team_at, s_cross);
            if ok {
                self.outcome.intercepts += 1;
                events.push(Event::Intercept {
                    intruder: 0,
                    witnesses,
                });
                // Repelled: back off a little before the next attempt, off
                // the curve when possible. A large backoff would let the
                // adversary mine the guards' recovery time at the segment
                // ends.
                let off_curve = Vec2::from_points(point, prev_pos);
                let back = if off_curve.norm() > 1e-9 {
                    off_curve.normalized().scale(0.1 * self.team.epsilon)
                } else {
                    v.normalized().scale(-0.1 * self.team.epsilon)
                };
                self.intruder = prev_pos.add(back);
                self.strategy.invalidate_plan();
            } else {
                self.outcome.escapes += 1;
                events.push(Event::Escape { intruder: 0 });
                self.done = true;
            }
            if self.outcome.crossings >= self.max_crossings {
                self.done = true;
            }
        }

        self.t += self.dt;
        self.steps += 1;
        let w = if self.record_w && visible {
            Some(lyapunov_w(&self.team, &self.intruder_state()))
        } else {
            None
        };
        let agents: Vec<AgentRecord> = self
            .team
            .coords
            .iter()
            .zip(&controls)
            .map(|(c, u)| {
                let p = self.team.curve.arc_point(*c).expect("on curve");
                AgentRecord {
                    x: p.x,
                    y: p.y,
                    theta: None,
                    control: Some(*u),
                    arc: Some(*c),
                }
            })
            .collect();
        self.trace.push(StepRecord {
            t: self.t,
            agents,
            intruders: vec![AgentRecord::at(self.intruder)],
            events,
            w,
            clearance: None,
        });

        if self.t >= self.duration {
            self.done = true;
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

    /// Current robot coordinates, for tests.
    pub fn coords(&self) -> &[f64] {
        &self.team.coords
    }
}
