//! Siege-ring world: two guarded arcs against one or more trapped intruders.

use super::strategy::Strategy;
use super::RunOutcome;
use crate::error::SimError;
use crate::geometry::{Point2, Vec2};
use crate::scenario::{ModeSpec, Scenario, SiegeScenario};
use crate::siege::{
    escape_check_at, ring_control_law, ring_feasibility, ArcId, EtaNormalization, IntruderSet,
    SiegeRing, SiegeTeam,
};
use crate::trace::{AgentRecord, Event, SimTrace, StepRecord, TraceHeader};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct SiegeWorld {
    ring: SiegeRing,
    team: SiegeTeam,
    v_i_max: f64,
    intruders: Vec<Point2>,
    alive: Vec<bool>,
    strategies: Vec<Strategy>,
    norm: EtaNormalization,
    max_crossings: Option<u64>,
    t: f64,
    dt: f64,
    duration: f64,
    steps: u64,
    rng: ChaCha8Rng,
    trace: SimTrace,
    outcome: RunOutcome,
    done: bool,
}

impl SiegeWorld {
    pub fn build(scenario: &Scenario, seed: u64) -> Result<SiegeWorld, SimError> {
        let spec: &SiegeScenario = match &scenario.spec {
            ModeSpec::Siege(s) => s,
            _ => return Err(SimError::BadScenario("not a siege scenario".into())),
        };
        let mut ring = SiegeRing::circle(
            Point2::new(spec.center_m[0], spec.center_m[1]),
            spec.radius_m,
        )?;
        if let Some(d) = spec.approx_diameter_m {
            ring.approx_diameter = d;
        }
        let team = SiegeTeam::new(
            spec.robots_s1_arc_m.clone(),
            spec.robots_s2_arc_m.clone(),
            spec.v_r_max_mps,
            spec.epsilon_m,
        )?;
        let intruders: Vec<Point2> = spec
            .intruders
            .iter()
            .map(|i| Point2::new(i.start_m[0], i.start_m[1]))
            .collect();
        for p in &intruders {
            if !ring.region.contains(*p) {
                return Err(SimError::BadScenario(format!(
                    "intruder at ({}, {}) starts outside the ring",
                    p.x, p.y
                )));
            }
        }
        let strategies = spec
            .intruders
            .iter()
            .map(|i| Strategy::from_spec(&i.strategy))
            .collect();
        let header = TraceHeader {
            scenario_hash: scenario.hash(),
            seed,
            mode: "siege".into(),
            dt_s: scenario.dt_s,
        };
        let n = intruders.len();
        Ok(SiegeWorld {
            ring,
            team,
            v_i_max: spec.v_i_max_mps,
            intruders,
            alive: vec![true; n],
            strategies,
            norm: spec.eta_normalization,
            max_crossings: spec.max_crossings,
            t: 0.0,
            dt: scenario.dt_s,
            duration: scenario.duration_s,
            steps: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
            trace: SimTrace::new(header),
            outcome: RunOutcome {
                mode: "siege".into(),
                seed,
                ..Default::default()
            },
            done: false,
        })
    }

    fn active_set(&self) -> IntruderSet {
        IntruderSet {
            positions: self
                .intruders
                .iter()
                .zip(&self.alive)
                .filter(|(_, a)| **a)
                .map(|(p, _)| *p)
                .collect(),
            v_i_max: self.v_i_max,
        }
    }

    /// Boundary point attaining the single-intruder danger supremum for the
    /// adversary at `pos`, searched over both arcs.
    fn danger_argmax(ring: &SiegeRing, team: &SiegeTeam, pos: Point2, v_i: f64) -> Point2 {
        let ratio = team.v_r_max / v_i;
        let mut best = (f64::NEG_INFINITY, ring.arc1.start());
        for arc in [ArcId::S1, ArcId::S2] {
            let l = ring.len(arc);
            let coords = team.coords(arc);
            let n = 2048;
            for i in 0..=n {
                let s = l * i as f64 / n as f64;
                let p = ring.arc(arc).arc_point(s).expect("in range");
                let xi = coords
                    .iter()
                    .map(|c| (c - s).abs())
                    .fold(f64::INFINITY, f64::min);
                let v = xi - pos.dist(p) * ratio;
                if v > best.0 {
                    best = (v, p);
                }
            }
        }
        best.1
    }

    pub fn step(&mut self) -> Result<bool, SimError> {
        if self.done {
            return Ok(false);
        }
        let mut events: Vec<Event> = Vec::new();
        let set = self.active_set();
        let any_alive = !set.positions.is_empty();

        if self.steps == 0 {
            let (ok, margin) = ring_feasibility(&self.ring, &self.team, &set, self.norm);
            self.outcome.feasible = Some(ok);
            self.outcome.margin = Some(margin);
        }

        // Robot controls; the S2 integrator flips the sign so a positive
        // control moves toward P2.
        let controls = if any_alive {
            ring_control_law(&self.ring, &self.team, &set, self.norm)
        } else {
            vec![0.0; self.team.n()]
        };
        let m1 = self.team.coords_s1.len();
        let l1 = self.ring.len(ArcId::S1);
        let l2 = self.ring.len(ArcId::S2);
        let prev_s1 = self.team.coords_s1.clone();
        let prev_s2 = self.team.coords_s2.clone();
        for (i, c) in self.team.coords_s1.iter_mut().enumerate() {
            *c = (*c + controls[i] * self.dt).clamp(0.0, l1);
        }
        for (i, c) in self.team.coords_s2.iter_mut().enumerate() {
            *c = (*c - controls[m1 + i] * self.dt).clamp(0.0, l2);
        }
        for (arc_coords, offset) in [
            (&mut self.team.coords_s1, 0usize),
            (&mut self.team.coords_s2, m1),
        ] {
            for _ in 0..arc_coords.len() {
                let mut clean = true;
                for i in 0..arc_coords.len().saturating_sub(1) {
                    if arc_coords[i] > arc_coords[i + 1] {
                        let mid = 0.5 * (arc_coords[i] + arc_coords[i + 1]);
                        arc_coords[i] = mid;
                        arc_coords[i + 1] = mid;
                        events.push(Event::OrderClamp {
                            a: offset + i,
                            b: offset + i + 1,
                        });
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
        }

        // Intruder motion and crossing handling.
        let center = {
            let p1 = self.ring.arc1.start();
            let opposite = self.ring.arc2.start();
            Point2::new(0.5 * (p1.x + opposite.x), 0.5 * (p1.y + opposite.y))
        };
        for idx in 0..self.intruders.len() {
            if !self.alive[idx] {
                continue;
            }
            let prev = self.intruders[idx];
            let outward = Vec2::from_points(center, prev).normalized();
            let ring_ref = &self.ring;
            let team_ref = &self.team;
            let v_i = self.v_i_max;
            let v = self.strategies[idx].velocity(
                prev,
                self.v_i_max,
                self.dt,
                &mut self.rng,
                outward,
                &mut || Self::danger_argmax(ring_ref, team_ref, prev, v_i),
            );
            let next = prev.add(v.scale(self.dt));
            // Check both arcs for a crossing: transversal intersection or an
            // on-ring landing (crossing is membership of the boundary).
            let mut crossing: Option<(ArcId, f64, Point2)> = None;
            for arc in [ArcId::S1, ArcId::S2] {
                if let Some((frac, point)) = self.ring.arc(arc).segment_crossing(prev, next) {
                    if crossing.as_ref().is_none_or(|(_, f, _)| frac < *f) {
                        crossing = Some((arc, frac, point));
                    }
                }
            }
            if crossing.is_none() {
                for arc in [ArcId::S1, ArcId::S2] {
                    let (_, point, dist) = self.ring.arc(arc).nearest_point(next);
                    if dist <= 1e-6 * self.ring.len(arc) {
                        crossing = Some((arc, 1.0, point));
                        break;
                    }
                }
            }
            match crossing {
                None => {
                    self.intruders[idx] = next;
                }
                Some((arc, frac, point)) => {
                    self.outcome.crossings += 1;
                    events.push(Event::Crossing {
                        intruder: idx,
                        x: point.x,
                        y: point.y,
                        arc: Some(match arc {
                            ArcId::S1 => "s1".into(),
                            ArcId::S2 => "s2".into(),
                        }),
                        frac,
                    });
                    let s = self
                        .ring
                        .arc(arc)
                        .arc_coord(point)
                        .map_err(SimError::Geom)?;
                    // Robot coordinates at the crossing instant.
                    let mut team_at = self.team.clone();
                    for (c, p) in team_at.coords_s1.iter_mut().zip(&prev_s1) {
                        *c = p + (*c - p) * frac;
                    }
                    for (c, p) in team_at.coords_s2.iter_mut().zip(&prev_s2) {
                        *c = p + (*c - p) * frac;
                    }
                    if escape_check_at(&self.ring, &team_at, arc, s) {
                        self.outcome.intercepts += 1;
                        events.push(Event::Intercept {
                            intruder: idx,
                            witnesses: vec![],
                        });
                        // Barricaded: fall back a little toward the interior
                        // and pick a new target. A deep retreat would let
                        // the intruder mine the guards' regrouping time.
                        let inward = Vec2::from_points(prev, center).normalized();
                        self.intruders[idx] = prev.add(inward.scale(0.1 * self.team.epsilon));
                        self.strategies[idx].invalidate_plan();
                    } else {
                        self.outcome.escapes += 1;
                        events.push(Event::Escape { intruder: idx });
                        self.alive[idx] = false;
                        self.intruders[idx] = next;
                    }
                }
            }
        }

        self.t += self.dt;
        self.steps += 1;
        let agents: Vec<AgentRecord> = self
            .team
            .coords_s1
            .iter()
            .map(|c| (ArcId::S1, *c))
            .chain(self.team.coords_s2.iter().map(|c| (ArcId::S2, *c)))
            .zip(&controls)
            .map(|((arc, c), u)| {
                let p = self.ring.arc(arc).arc_point(c).expect("on arc");
                AgentRecord {
                    x: p.x,
                    y: p.y,
                    theta: None,
                    control: Some(*u),
                    arc: Some(c),
                }
            })
            .collect();
        let intruders: Vec<AgentRecord> =
            self.intruders.iter().map(|p| AgentRecord::at(*p)).collect();
        self.trace.push(StepRecord {
            t: self.t,
            agents,
            intruders,
            events,
            w: None,
            clearance: None,
        });

        let exhausted = self
            .max_crossings
            .map(|m| self.outcome.crossings >= m)
            .unwrap_or(false);
        if self.t >= self.duration || exhausted || self.alive.iter().all(|a| !a) {
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

    pub fn team(&self) -> &SiegeTeam {
        &self.team
    }
}
