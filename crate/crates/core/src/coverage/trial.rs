//! Seeded coverage trials: the game-based patrol against the standard
//! sweeping baseline, with an informed intruder picking the least dangerous
//! boundary entry.

use super::game::plan_period;
use super::{formation_align, station_blocks, Cell, Corridor, FormationKind};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    Igd,
    Sweep,
}

/// What the informed intruder tries to do after entering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntruderMission {
    /// Cross the corridor on a straight line through the entry point.
    #[default]
    CrossStraight,
    /// Dash straight for the corridor midpoint.
    DashToCenter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageTrialConfig {
    pub sensing_radius: f64,
    /// Corridor extension factor; the detection-rate comparison runs on the
    /// extended corridor where the sweeping barrier leaves the interior
    /// unguarded for most of its long cycle.
    pub extension_factor: usize,
    pub n_agents: usize,
    pub agent_speed: f64,
    /// Intruder speed; the informed adversary moves at robot-comparable
    /// speed.
    pub intruder_speed: f64,
    pub mission: IntruderMission,
    /// Substeps per patrol move for continuous detection checks.
    pub substeps: usize,
}

impl Default for CoverageTrialConfig {
    fn default() -> Self {
        CoverageTrialConfig {
            sensing_radius: 1.0,
            extension_factor: 1,
            n_agents: 3,
            agent_speed: 1.0,
            intruder_speed: 0.8,
            mission: IntruderMission::CrossStraight,
            substeps: 48,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub detected: bool,
    /// Patrol moves elapsed from intruder entry to detection or exit.
    pub steps: u64,
}

/// Patrol cycle of one mode: per-agent cell paths, one entry per move.
fn patrol_cycle(corridor: &Corridor, mode: CoverageMode, n_agents: usize) -> Vec<Vec<Cell>> {
    match mode {
        CoverageMode::Sweep => {
            // Lawnmower: a column formation sweeps to the far column and
            // retraces to its start.
            let stations = formation_align(corridor, n_agents, FormationKind::Orthogonal);
            let cols = corridor.cols;
            stations
                .iter()
                .map(|&s| {
                    let mut path = Vec::new();
                    for c in 1..cols {
                        path.push(Cell::new(s.row, c));
                    }
                    for c in (0..cols - 1).rev() {
                        path.push(Cell::new(s.row, c));
                    }
                    path
                })
                .collect()
        }
        CoverageMode::Igd => {
            let stations = formation_align(corridor, n_agents, FormationKind::Diagonal);
            if corridor.cols <= 3 {
                return joint_igd_plan(corridor, &stations);
            }
            // Wide corridor: the formation meeting partitions the columns
            // into per-agent blocks; each agent runs a greedy covering beat
            // over its block and returns to its station.
            let blocks = station_blocks(corridor, &stations);
            stations
                .iter()
                .zip(blocks.iter())
                .map(|(&station, &block)| block_beat(corridor, station, block))
                .collect()
        }
    }
}

/// Greedy covering cycle over a column block: step to the neighbor closest
/// to the nearest unvisited block cell until the block is covered, then walk
/// back to the station. Deterministic.
fn block_beat(corridor: &Corridor, station: Cell, (c0, c1): (usize, usize)) -> Vec<Cell> {
    let in_block = |c: Cell| c.col >= c0 && c.col <= c1;
    let mut unvisited: std::collections::BTreeSet<Cell> = corridor
        .cells()
        .filter(|c| in_block(*c) && *c != station)
        .collect();
    let mut path = Vec::new();
    let mut here = station;
    let cheb = |a: Cell, b: Cell| a.row.abs_diff(b.row).max(a.col.abs_diff(b.col));
    let guard = 4 * corridor.rows * (c1 - c0 + 1);
    while !unvisited.is_empty() && path.len() < guard {
        let next = corridor
            .neighbors8(here)
            .into_iter()
            .filter(|c| in_block(*c))
            .min_by_key(|c| {
                let d = unvisited.iter().map(|u| cheb(*c, *u)).min().unwrap_or(0);
                let fresh = !unvisited.contains(c) as usize;
                (fresh, d, c.row, c.col)
            })
            .unwrap_or(here);
        path.push(next);
        unvisited.remove(&next);
        here = next;
    }
    // Chebyshev walk home closes the cycle.
    while here != station {
        let next = Cell::new(
            step_to(here.row, station.row),
            step_to(here.col, station.col),
        );
        path.push(next);
        here = next;
    }
    path
}

fn step_to(from: usize, to: usize) -> usize {
    use std::cmp::Ordering::*;
    match from.cmp(&to) {
        Less => from + 1,
        Greater => from - 1,
        Equal => from,
    }
}

/// Joint cooperative plan on the base square: the shortest period whose
/// full-team plan still covers the grid.
fn joint_igd_plan(corridor: &Corridor, stations: &[Cell]) -> Vec<Vec<Cell>> {
    let mut scanned = corridor.clone();
    for &s in stations {
        scanned.mark_scanned(s, 0);
    }
    let cells = corridor.rows * corridor.cols;
    let min_len = (cells - stations.len()).div_ceil(stations.len()).max(1);
    for len in min_len..=min_len + 4 {
        if let Some(plan) = plan_period(&scanned, stations, stations, len) {
            let mut seen: std::collections::BTreeSet<Cell> = stations.iter().copied().collect();
            for p in &plan {
                seen.extend(p.iter().copied());
            }
            if seen.len() == cells {
                return plan;
            }
        }
    }
    plan_period(&scanned, stations, stations, min_len).unwrap_or_default()
}

/// Moves needed to scan every sub-square at least once and have every agent
/// back on a station.
pub fn patrol_cycle_steps(corridor: &Corridor, mode: CoverageMode, n_agents: usize) -> usize {
    let stations = match mode {
        CoverageMode::Igd => formation_align(corridor, n_agents, FormationKind::Diagonal),
        CoverageMode::Sweep => formation_align(corridor, n_agents, FormationKind::Orthogonal),
    };
    let cycle = patrol_cycle(corridor, mode, n_agents);
    let mut scanned = corridor.clone();
    for s in &stations {
        scanned.mark_scanned(*s, 0);
    }
    let len = cycle.iter().map(Vec::len).max().unwrap_or(0);
    for t in 0..len {
        for path in &cycle {
            if t < path.len() {
                scanned.mark_scanned(path[t], t as u64 + 1);
            }
        }
        let positions: Vec<Cell> = cycle.iter().map(|p| p[t.min(p.len() - 1)]).collect();
        let back = positions.iter().all(|c| stations.contains(c));
        if scanned.all_scanned() && back {
            return t + 1;
        }
    }
    len
}

/// Continuous agent position at time `t` while looping over its cycle:
/// travels cell-center to cell-center at `speed`, then dwells until the next
/// move boundary.
fn agent_position(
    corridor: &Corridor,
    start: Cell,
    path: &[Cell],
    t: f64,
    t_step: f64,
    speed: f64,
) -> (f64, f64) {
    if path.is_empty() {
        return corridor.cell_center(start);
    }
    let cycle_time = path.len() as f64 * t_step;
    let tau = t.rem_euclid(cycle_time);
    let idx = (tau / t_step) as usize;
    let idx = idx.min(path.len() - 1);
    let from = if idx == 0 {
        *path.last().unwrap()
    } else {
        path[idx - 1]
    };
    // On the very first lap the agent departs from its station; afterwards
    // the cycle closes on itself because plans end on a station.
    let from = if t < cycle_time && idx == 0 {
        start
    } else {
        from
    };
    let to = path[idx];
    let (x0, y0) = corridor.cell_center(from);
    let (x1, y1) = corridor.cell_center(to);
    let dist = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();
    let local = tau - idx as f64 * t_step;
    let travel = (speed * local).min(dist);
    let f = if dist > 0.0 { travel / dist } else { 0.0 };
    (x0 + (x1 - x0) * f, y0 + (y1 - y0) * f)
}

/// One seeded trial: the intruder becomes active at a seeded phase of the
/// patrol, spawns at the boundary point whose straight mission path stays
/// farthest from every sensor (its stated knowledge of the true positions),
/// and executes the mission at robot-comparable speed. Detection means
/// entering any sensing disk before the mission completes.
pub fn run_coverage_trial(
    cfg: &CoverageTrialConfig,
    mode: CoverageMode,
    seed: u64,
) -> TrialOutcome {
    run_coverage_trial_recorded(cfg, mode, seed, &mut |_, _, _| {})
}

/// Trial variant that reports every substep to `record`:
/// `(time since intruder entry, sensor positions, intruder position)`.
pub type TrialRecorder<'a> = &'a mut dyn FnMut(f64, &[(f64, f64)], (f64, f64));

pub fn run_coverage_trial_recorded(
    cfg: &CoverageTrialConfig,
    mode: CoverageMode,
    seed: u64,
    record: TrialRecorder,
) -> TrialOutcome {
    let corridor = Corridor::new(cfg.sensing_radius, cfg.extension_factor).expect("valid corridor");
    let stations = match mode {
        CoverageMode::Igd => formation_align(&corridor, cfg.n_agents, FormationKind::Diagonal),
        CoverageMode::Sweep => formation_align(&corridor, cfg.n_agents, FormationKind::Orthogonal),
    };
    let cycle = patrol_cycle(&corridor, mode, cfg.n_agents);
    let t_step = corridor.cell_side * std::f64::consts::SQRT_2 / cfg.agent_speed;
    let cycle_len = cycle.iter().map(Vec::len).max().unwrap_or(1);
    let cycle_time = cycle_len as f64 * t_step;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t0 = rng.random_range(0.0..cycle_time);

    // Informed entry: densely sample the boundary, maximize distance to the
    // nearest sensor at spawn time.
    let w = corridor.width();
    let h = corridor.height();
    let positions_at = |t: f64| -> Vec<(f64, f64)> {
        stations
            .iter()
            .zip(cycle.iter())
            .map(|(&s, path)| agent_position(&corridor, s, path, t, t_step, cfg.agent_speed))
            .collect()
    };
    // The informed adversary scores each candidate entry by the worst
    // proximity its straight mission path would come to any sensor, using
    // the position snapshot it has at spawn time, and picks the least
    // dangerous one.
    let sensors = positions_at(t0);
    type Dir = (f64, f64);
    let path_of = |entry: Dir, inward: Dir| -> (Dir, f64) {
        match cfg.mission {
            IntruderMission::CrossStraight => {
                let len = if inward.0 != 0.0 { w } else { h };
                (inward, len)
            }
            IntruderMission::DashToCenter => {
                let goal = (0.5 * w, 0.5 * h);
                let d = ((goal.0 - entry.0).powi(2) + (goal.1 - entry.1).powi(2)).sqrt();
                (((goal.0 - entry.0) / d, (goal.1 - entry.1) / d), d)
            }
        }
    };
    let mut best: Option<(f64, Dir, (Dir, f64))> = None;
    let per_edge = 100;
    for i in 0..per_edge {
        let f = (i as f64 + 0.5) / per_edge as f64;
        // (entry point, inward unit normal) per edge
        for (p, inward) in [
            ((f * w, 0.0), (0.0, 1.0)),
            ((f * w, h), (0.0, -1.0)),
            ((0.0, f * h), (1.0, 0.0)),
            ((w, f * h), (-1.0, 0.0)),
        ] {
            let (dir, len) = path_of(p, inward);
            let mut clearance = f64::INFINITY;
            for k in 0..=60 {
                let t = len * k as f64 / 60.0;
                let (x, y) = (p.0 + dir.0 * t, p.1 + dir.1 * t);
                for s in &sensors {
                    let d = ((s.0 - x).powi(2) + (s.1 - y).powi(2)).sqrt();
                    clearance = clearance.min(d);
                }
            }
            if best.as_ref().is_none_or(|(b, _, _)| clearance > *b) {
                best = Some((clearance, p, (dir, len)));
            }
        }
    }
    let (_, entry, (dir, dist)) = best.expect("boundary sampled");
    let total_time = dist / cfg.intruder_speed;
    let dt = t_step / cfg.substeps as f64;
    let mut t = 0.0;
    while t <= total_time {
        let ix = entry.0 + dir.0 * cfg.intruder_speed * t;
        let iy = entry.1 + dir.1 * cfg.intruder_speed * t;
        let sensors_now = positions_at(t0 + t);
        record(t, &sensors_now, (ix, iy));
        for s in &sensors_now {
            let d = ((s.0 - ix).powi(2) + (s.1 - iy).powi(2)).sqrt();
            if d <= cfg.sensing_radius {
                return TrialOutcome {
                    detected: true,
                    steps: (t / t_step).ceil() as u64,
                };
            }
        }
        t += dt;
    }
    TrialOutcome {
        detected: false,
        steps: (total_time / t_step).ceil() as u64,
    }
}
