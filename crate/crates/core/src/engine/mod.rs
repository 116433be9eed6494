//! Deterministic fixed-step world simulator: advances all agents, enforces
//! speed and arena constraints, runs intruder/obstacle strategies, detects
//! events and records traces. One world per run; batches fan out across
//! seeds with per-seed determinism.

mod boundary_world;
mod coverage_world;
mod force_world;
mod siege_world;
mod strategy;
mod switching_world;

pub use boundary_world::BoundaryWorld;
pub use coverage_world::CoverageWorld;
pub use force_world::ForceFieldWorld;
pub use siege_world::SiegeWorld;
pub use strategy::Strategy;
pub use switching_world::SwitchingWorld;

use crate::error::SimError;
use crate::scenario::{ModeSpec, Scenario};
use crate::switching::EnergyReport;
use crate::trace::SimTrace;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Aggregated result of one simulation run.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunOutcome {
    pub mode: String,
    pub seed: u64,
    pub steps: u64,
    /// Feasibility verdict at first visibility, interception modes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feasible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    pub crossings: u64,
    pub intercepts: u64,
    pub escapes: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_clearance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub switching_points: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sensing_calls: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<EnergyReport>,
    pub blocked: bool,
}

/// A mode-specific world behind the common engine contract.
pub enum World {
    Boundary(Box<BoundaryWorld>),
    Siege(Box<SiegeWorld>),
    Coverage(Box<CoverageWorld>),
    Switching(Box<SwitchingWorld>),
    ForceField(Box<ForceFieldWorld>),
}

impl World {
    pub fn build(scenario: &Scenario, seed: u64) -> Result<World, SimError> {
        Ok(match &scenario.spec {
            ModeSpec::Boundary(_) => {
                World::Boundary(Box::new(BoundaryWorld::build(scenario, seed)?))
            }
            ModeSpec::Siege(_) => World::Siege(Box::new(SiegeWorld::build(scenario, seed)?)),
            ModeSpec::Coverage(_) => {
                World::Coverage(Box::new(CoverageWorld::build(scenario, seed)?))
            }
            ModeSpec::Switching(_) => {
                World::Switching(Box::new(SwitchingWorld::build(scenario, seed)?))
            }
            ModeSpec::ForceField(_) => {
                World::ForceField(Box::new(ForceFieldWorld::build(scenario, seed)?))
            }
        })
    }

    /// Advance one step. Returns false once the run has concluded.
    pub fn step(&mut self) -> Result<bool, SimError> {
        match self {
            World::Boundary(w) => w.step(),
            World::Siege(w) => w.step(),
            World::Coverage(w) => w.step(),
            World::Switching(w) => w.step(),
            World::ForceField(w) => w.step(),
        }
    }

    /// Run to completion and return the outcome.
    pub fn run(&mut self) -> Result<RunOutcome, SimError> {
        while self.step()? {}
        Ok(self.outcome())
    }

    pub fn outcome(&self) -> RunOutcome {
        match self {
            World::Boundary(w) => w.outcome(),
            World::Siege(w) => w.outcome(),
            World::Coverage(w) => w.outcome(),
            World::Switching(w) => w.outcome(),
            World::ForceField(w) => w.outcome(),
        }
    }

    pub fn trace(&self) -> &SimTrace {
        match self {
            World::Boundary(w) => w.trace(),
            World::Siege(w) => w.trace(),
            World::Coverage(w) => w.trace(),
            World::Switching(w) => w.trace(),
            World::ForceField(w) => w.trace(),
        }
    }
}

/// Run one seeded simulation end to end.
pub fn run_once(scenario: &Scenario, seed: u64) -> Result<(RunOutcome, SimTrace), SimError> {
    let mut world = World::build(scenario, seed)?;
    let outcome = world.run()?;
    let trace = world.trace().clone();
    Ok((outcome, trace))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchSummary {
    pub rows: Vec<RunOutcome>,
    pub runs: usize,
    pub intercept_rate: f64,
    pub escape_rate: f64,
    pub detection_rate: f64,
    pub min_clearance: Option<f64>,
}

/// Seed-parallel batch with per-seed deterministic outcomes; row order
/// follows the seed order regardless of scheduling.
pub fn run_batch(scenario: &Scenario, seeds: &[u64]) -> Result<BatchSummary, SimError> {
    let rows: Result<Vec<RunOutcome>, SimError> = seeds
        .par_iter()
        .map(|&seed| run_once(scenario, seed).map(|(outcome, _)| outcome))
        .collect();
    let rows = rows?;
    let runs = rows.len();
    let crossings: u64 = rows.iter().map(|r| r.crossings).sum();
    let intercepts: u64 = rows.iter().map(|r| r.intercepts).sum();
    let escapes: u64 = rows.iter().map(|r| r.escapes).sum();
    let detections = rows.iter().filter(|r| r.detected == Some(true)).count();
    let detect_known = rows.iter().filter(|r| r.detected.is_some()).count();
    let min_clearance = rows
        .iter()
        .filter_map(|r| r.min_clearance)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.min(v)))
        });
    Ok(BatchSummary {
        runs,
        intercept_rate: if crossings > 0 {
            intercepts as f64 / crossings as f64
        } else {
            0.0
        },
        escape_rate: if crossings > 0 {
            escapes as f64 / crossings as f64
        } else {
            0.0
        },
        detection_rate: if detect_known > 0 {
            detections as f64 / detect_known as f64
        } else {
            0.0
        },
        min_clearance,
        rows,
    })
}
