//! Game-based patrol and decision-making for a sensor team maximizing
//! intrusion-detection probability in a bounded corridor.
//!
//! The corridor is a square of nine sub-squares whose side equals
//! `sqrt(2) * R`, so a robot parked at a cell center covers the whole cell
//! with its sensing disk. Robots move on the 8-connected cell graph; the
//! intrusion process is Poisson with density `lambda` per unit area.

mod game;
mod trial;

pub use game::{
    condition_eval, degraded_mode, nash_select, payoff, plan_period, predict_best_move,
    AgentKnowledge, ConditionSet, DegradedAction, GameConfig, GameWeights, PayoffForm, Strategy,
};
pub use trial::{
    patrol_cycle_steps, run_coverage_trial, run_coverage_trial_recorded, CoverageMode,
    CoverageTrialConfig, IntruderMission, TrialOutcome,
};

use crate::error::LawError;
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Unicycle pose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

/// Patrolling sensor robot: unicycle kinematics, bounded speed, disk-shaped
/// sensing footprint of radius `sensing_radius`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensorAgent {
    pub pose: Pose,
    pub v: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub omega: f64,
    pub sensing_radius: f64,
}

impl SensorAgent {
    pub fn new(
        pose: Pose,
        v: f64,
        v_min: f64,
        v_max: f64,
        sensing_radius: f64,
    ) -> Result<Self, LawError> {
        if !(v_min < v && v < v_max) || v_min < 0.0 {
            return Err(LawError::NonPositive {
                what: "speed bounds",
                value: v,
            });
        }
        if sensing_radius <= 0.0 {
            return Err(LawError::NonPositive {
                what: "sensing_radius",
                value: sensing_radius,
            });
        }
        Ok(SensorAgent {
            pose,
            v,
            v_min,
            v_max,
            omega: 0.0,
            sensing_radius,
        })
    }
}

/// Forward-Euler unicycle update with the heading wrapped to `(0, 2*pi]`.
pub fn unicycle_step(
    agent: &SensorAgent,
    v: f64,
    omega: f64,
    dt: f64,
) -> Result<SensorAgent, LawError> {
    if dt <= 0.0 {
        return Err(LawError::NonPositive {
            what: "dt",
            value: dt,
        });
    }
    if v != 0.0 && !(agent.v_min < v && v < agent.v_max) {
        return Err(LawError::NonPositive {
            what: "v outside bounds",
            value: v,
        });
    }
    let mut out = agent.clone();
    out.pose.x += v * agent.pose.theta.cos() * dt;
    out.pose.y += v * agent.pose.theta.sin() * dt;
    out.pose.theta = wrap_heading(agent.pose.theta + omega * dt);
    out.v = if v == 0.0 { agent.v } else { v };
    out.omega = omega;
    Ok(out)
}

/// Wrap to the half-open interval `(0, 2*pi]`.
pub fn wrap_heading(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut t = theta % tau;
    if t <= 0.0 {
        t += tau;
    }
    t
}

/// Grid cell, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    pub fn is_neighbor8(&self, other: Cell) -> bool {
        let dr = self.row.abs_diff(other.row);
        let dc = self.col.abs_diff(other.col);
        dr <= 1 && dc <= 1 && (dr + dc) > 0
    }
}

/// Square surveillance corridor of nine sub-squares (extension factor k
/// widens it to `2k` blocks), with per-cell scan timestamps for the current
/// monitoring period.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Corridor {
    /// Sensing radius of the homogeneous team.
    pub sensing_radius: f64,
    /// Cell side, always `sqrt(2) * sensing_radius`.
    pub cell_side: f64,
    pub rows: usize,
    pub cols: usize,
    pub extension_factor: usize,
    scanned: Vec<Option<u64>>,
}

impl Corridor {
    pub fn new(sensing_radius: f64, extension_factor: usize) -> Result<Corridor, LawError> {
        if sensing_radius <= 0.0 {
            return Err(LawError::NonPositive {
                what: "sensing_radius",
                value: sensing_radius,
            });
        }
        let rows = 3;
        let cols = 3 * if extension_factor == 0 {
            1
        } else {
            2 * extension_factor
        };
        Ok(Corridor {
            sensing_radius,
            cell_side: SQRT_2 * sensing_radius,
            rows,
            cols,
            extension_factor,
            scanned: vec![None; rows * cols],
        })
    }

    pub fn width(&self) -> f64 {
        self.cols as f64 * self.cell_side
    }

    pub fn height(&self) -> f64 {
        self.rows as f64 * self.cell_side
    }

    /// Total area of interest: the base square for k = 0, `2k` squares
    /// otherwise.
    pub fn area(&self) -> f64 {
        let base = (3.0 * self.cell_side).powi(2);
        if self.extension_factor == 0 {
            base
        } else {
            2.0 * self.extension_factor as f64 * base
        }
    }

    pub fn cell_center(&self, c: Cell) -> (f64, f64) {
        (
            (c.col as f64 + 0.5) * self.cell_side,
            (c.row as f64 + 0.5) * self.cell_side,
        )
    }

    pub fn cell_of(&self, x: f64, y: f64) -> Option<Cell> {
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let col = (x / self.cell_side) as usize;
        let row = (y / self.cell_side) as usize;
        if row < self.rows && col < self.cols {
            Some(Cell::new(row, col))
        } else {
            None
        }
    }

    pub fn contains_cell(&self, c: Cell) -> bool {
        c.row < self.rows && c.col < self.cols
    }

    pub fn neighbors8(&self, c: Cell) -> Vec<Cell> {
        let mut out = Vec::with_capacity(8);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let r = c.row as i64 + dr;
                let k = c.col as i64 + dc;
                if r >= 0 && k >= 0 {
                    let cell = Cell::new(r as usize, k as usize);
                    if self.contains_cell(cell) {
                        out.push(cell);
                    }
                }
            }
        }
        out
    }

    pub fn mark_scanned(&mut self, c: Cell, step: u64) {
        let idx = c.row * self.cols + c.col;
        if self.scanned[idx].is_none() {
            self.scanned[idx] = Some(step);
        }
    }

    pub fn scanned_at(&self, c: Cell) -> Option<u64> {
        self.scanned[c.row * self.cols + c.col]
    }

    pub fn all_scanned(&self) -> bool {
        self.scanned.iter().all(|s| s.is_some())
    }

    pub fn reset_period(&mut self) {
        self.scanned.fill(None);
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| Cell::new(r, c)))
    }
}

/// Probability outcome of the Poisson intrusion model at one query point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntrusionProb {
    pub p: f64,
    /// Query point already inside the sensing disk.
    pub inside: bool,
}

/// Probability that an intrusion occurred in the swept slab between the
/// sensor and the target: `1 - exp(-lambda * (dist - R) * 2R)`.
pub fn p_intrusion(agent: (f64, f64), target: (f64, f64), r: f64, lambda: f64) -> IntrusionProb {
    let dist = ((agent.0 - target.0).powi(2) + (agent.1 - target.1).powi(2)).sqrt();
    if dist < r {
        return IntrusionProb {
            p: 0.0,
            inside: true,
        };
    }
    let swept = (dist - r) * 2.0 * r;
    IntrusionProb {
        p: 1.0 - (-lambda * swept).exp(),
        inside: false,
    }
}

/// Probability of first detection at relative offset `(x, y)`:
/// `exp(-lambda * (sqrt(x^2+y^2) - R) * 2R)`.
pub fn p_first_detection(rel: (f64, f64), r: f64, lambda: f64) -> IntrusionProb {
    let dist = (rel.0 * rel.0 + rel.1 * rel.1).sqrt();
    if dist < r {
        return IntrusionProb {
            p: 0.0,
            inside: true,
        };
    }
    IntrusionProb {
        p: (-lambda * (dist - r) * 2.0 * r).exp(),
        inside: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormationKind {
    Diagonal,
    Orthogonal,
}

/// Worst-point standoff distance of each formation, in sensing radii: the
/// diagonal deployment leaves a 3R reach, the orthogonal line (1 + 2*sqrt2)R.
pub fn formation_standoff(kind: FormationKind, r: f64) -> f64 {
    match kind {
        FormationKind::Diagonal => 3.0 * r,
        FormationKind::Orthogonal => (1.0 + 2.0 * SQRT_2) * r,
    }
}

/// First-detection probability of a whole formation at its worst entry
/// point. Diagonal gives `exp(-4 lambda R^2)`, orthogonal
/// `exp(-4 sqrt2 lambda R^2)`.
pub fn formation_first_detection(kind: FormationKind, lambda: f64, r: f64) -> f64 {
    let d = formation_standoff(kind, r);
    p_first_detection((d, 0.0), r, lambda).p
}

/// Station cells of a formation. The diagonal deployment spreads the agents
/// equally between the two long edges; the orthogonal baseline lines them up
/// against the first column.
pub fn formation_align(corridor: &Corridor, n_agents: usize, kind: FormationKind) -> Vec<Cell> {
    match n_agents {
        0 => Vec::new(),
        1 => vec![Cell::new(corridor.rows / 2, corridor.cols / 2)],
        _ => {
            let n = n_agents.min(corridor.rows);
            (0..n)
                .map(|i| {
                    let row = i * (corridor.rows - 1) / (n - 1).max(1);
                    match kind {
                        FormationKind::Diagonal => {
                            let col = (i as f64 * (corridor.cols - 1) as f64 / (n - 1) as f64)
                                .round() as usize;
                            Cell::new(row, col)
                        }
                        FormationKind::Orthogonal => Cell::new(row, 0),
                    }
                })
                .filter(|c| corridor.contains_cell(*c))
                .collect()
        }
    }
}

/// Balanced column blocks around the diagonal stations: each column belongs
/// to the station with the nearest column index (ties to the lower station).
pub fn station_blocks(corridor: &Corridor, stations: &[Cell]) -> Vec<(usize, usize)> {
    let n = stations.len();
    let mut blocks = vec![(usize::MAX, 0usize); n];
    for col in 0..corridor.cols {
        let owner = (0..n)
            .min_by_key(|i| (stations[*i].col.abs_diff(col), *i))
            .unwrap_or(0);
        let b = &mut blocks[owner];
        b.0 = b.0.min(col);
        b.1 = b.1.max(col);
    }
    blocks
}

/// `lambda * R^2` making the diagonal/orthogonal first-detection ratio equal
/// exactly 5.
pub fn lambda_r2_for_ratio_5() -> f64 {
    (5.0f64).ln() / (4.0 * (SQRT_2 - 1.0))
}
