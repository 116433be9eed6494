//! Coverage world: one seeded patrol-vs-intruder trial with a recorded
//! trace.

use super::RunOutcome;
use crate::coverage::{run_coverage_trial_recorded, CoverageTrialConfig, TrialOutcome};
use crate::error::SimError;
use crate::scenario::{CoverageScenario, ModeSpec, Scenario};
use crate::trace::{AgentRecord, Event, SimTrace, StepRecord, TraceHeader};

pub struct CoverageWorld {
    scenario_cfg: CoverageTrialConfig,
    mode: crate::coverage::CoverageMode,
    seed: u64,
    trace: SimTrace,
    outcome: RunOutcome,
    ran: bool,
}

impl CoverageWorld {
    pub fn build(scenario: &Scenario, seed: u64) -> Result<CoverageWorld, SimError> {
        let spec: &CoverageScenario = match &scenario.spec {
            ModeSpec::Coverage(c) => c,
            _ => return Err(SimError::BadScenario("not a coverage scenario".into())),
        };
        let cfg = CoverageTrialConfig {
            sensing_radius: spec.sensing_radius_m,
            extension_factor: spec.extension_factor,
            n_agents: spec.n_agents,
            agent_speed: spec.agent_speed_mps,
            intruder_speed: spec.intruder_speed_mps,
            mission: spec.mission,
            substeps: spec.substeps,
        };
        let header = TraceHeader {
            scenario_hash: scenario.hash(),
            seed,
            mode: "coverage".into(),
            dt_s: scenario.dt_s,
        };
        Ok(CoverageWorld {
            scenario_cfg: cfg,
            mode: spec.method,
            seed,
            trace: SimTrace::new(header),
            outcome: RunOutcome {
                mode: "coverage".into(),
                seed,
                ..Default::default()
            },
            ran: false,
        })
    }

    /// The whole trial runs in one engine step; the recorded substeps land
    /// in the trace.
    pub fn step(&mut self) -> Result<bool, SimError> {
        if self.ran {
            return Ok(false);
        }
        let mut steps: Vec<StepRecord> = Vec::new();
        let outcome: TrialOutcome = run_coverage_trial_recorded(
            &self.scenario_cfg,
            self.mode,
            self.seed,
            &mut |t, sensors, intruder| {
                steps.push(StepRecord {
                    t,
                    agents: sensors
                        .iter()
                        .map(|s| AgentRecord {
                            x: s.0,
                            y: s.1,
                            theta: None,
                            control: None,
                            arc: None,
                        })
                        .collect(),
                    intruders: vec![AgentRecord {
                        x: intruder.0,
                        y: intruder.1,
                        theta: None,
                        control: None,
                        arc: None,
                    }],
                    events: vec![],
                    w: None,
                    clearance: None,
                });
            },
        );
        for s in steps {
            if self.trace.steps.last().is_none_or(|prev| s.t > prev.t) {
                self.trace.push(s);
            }
        }
        if outcome.detected {
            if let Some(last) = self.trace.steps.last_mut() {
                last.events.push(Event::Detection {
                    intruder: 0,
                    agent: 0,
                });
            }
        }
        self.outcome.detected = Some(outcome.detected);
        self.outcome.steps = outcome.steps;
        self.ran = true;
        Ok(false)
    }

    pub fn outcome(&self) -> RunOutcome {
        self.outcome.clone()
    }

    pub fn trace(&self) -> &SimTrace {
        &self.trace
    }
}
