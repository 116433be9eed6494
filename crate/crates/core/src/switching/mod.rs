//! Sojourn-time switching navigation: measure, decide, then move blind.
//!
//! A robot (or a leader-follower chain) pauses at a switching point, takes
//! one sensor snapshot of the visible obstacles, computes a safe heading and
//! hop from the tangent-chord construction, and travels the whole hop with
//! the sensors off. Three modes share the machinery: single-obstacle
//! leader-follower, multi-obstacle leader-follower with gap selection, and
//! the fully decentralized per-robot variant.

mod chain;
mod energy;
mod measure;

pub use chain::{follower_update, ChainTeam};
pub use energy::{energy_report, sensing_power, EnergyParams, EnergyReport};
pub use measure::{
    dual_step_component, dual_step_resultant, gap_admissible, gap_select, pesa_measure, pesa_step,
    GapChoice, PesaMeasurement, SwitchingMode, SwitchingStep,
};

use crate::error::LawError;
use serde::{Deserialize, Serialize};

/// Shared switching-navigation parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SwitchingParams {
    /// Minimum allowed robot-obstacle clearance, meters.
    pub epsilon: f64,
    /// Measurement tolerance on the clearance guarantee.
    pub mu0: f64,
    /// Sensing radius.
    pub sensing_radius: f64,
    /// Robot circumradius.
    pub robot_radius: f64,
    /// Strictness factor operationalizing the "much greater" in the gap
    /// admissibility test.
    pub gap_strictness: f64,
    pub mode: SwitchingMode,
}

impl SwitchingParams {
    pub fn new(
        epsilon: f64,
        mu0: f64,
        sensing_radius: f64,
        robot_radius: f64,
        mode: SwitchingMode,
    ) -> Result<SwitchingParams, LawError> {
        if epsilon <= mu0 || mu0 < 0.0 {
            return Err(LawError::NonPositive {
                what: "epsilon > mu0 >= 0",
                value: epsilon,
            });
        }
        if sensing_radius <= epsilon {
            return Err(LawError::NonPositive {
                what: "sensing_radius > epsilon",
                value: sensing_radius,
            });
        }
        if robot_radius <= 0.0 {
            return Err(LawError::NonPositive {
                what: "robot_radius",
                value: robot_radius,
            });
        }
        Ok(SwitchingParams {
            epsilon,
            mu0,
            sensing_radius,
            robot_radius,
            gap_strictness: 1.5,
            mode,
        })
    }

    /// Mid-chord perpendicular offset of the triangle construction: epsilon
    /// in the leader-follower modes, doubled in the decentralized mode.
    pub fn l2(&self) -> f64 {
        match self.mode {
            SwitchingMode::SingleObstacle | SwitchingMode::MultiObstacle => self.epsilon,
            SwitchingMode::Decentralized => 2.0 * self.epsilon,
        }
    }

    /// Far-end perpendicular offset, twice the mid-chord one.
    pub fn l3(&self) -> f64 {
        2.0 * self.l2()
    }
}
