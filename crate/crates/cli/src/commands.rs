//! Subcommand implementations. Summary lines are machine-parseable
//! `key=value` pairs; file formats are JSON (scenarios), JSON Lines
//! (traces) and CSV (sweep summaries and plot exports), all UTF-8 with LF
//! line endings.

use anyhow::{bail, Context, Result};
use pursuit_guard_core::boundary::{
    feasibility, worst_case_intruder_target, BoundaryTeam, IntruderState,
};
use pursuit_guard_core::coverage::{patrol_cycle_steps, Corridor, CoverageMode};
use pursuit_guard_core::engine::{run_batch, run_once};
use pursuit_guard_core::geometry::{obstacle_gap, ParamCurve, Point2};
use pursuit_guard_core::scenario::{BoundaryShape, ModeSpec, Scenario};
use pursuit_guard_core::siege::{
    ring_danger_argmax, ring_feasibility, IntruderSet, SiegeRing, SiegeTeam,
};
use pursuit_guard_core::switching::{gap_admissible, SwitchingMode, SwitchingParams};
use pursuit_guard_core::trace::{Event, SimTrace};
use std::path::Path;

use crate::EXIT_INFEASIBLE;

/// Thread cap for seed sweeps, from the environment.
pub const THREADS_ENV: &str = "PURSUIT_GUARD_THREADS";

fn load_scenario(path: &Path, mode_override: Option<&str>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))?;
    let mut scenario = Scenario::from_json(&text).context("parsing scenario")?;
    if let Some(m) = mode_override {
        match (&mut scenario.spec, m) {
            (ModeSpec::Coverage(c), "igd") => c.method = CoverageMode::Igd,
            (ModeSpec::Coverage(c), "sweep") => c.method = CoverageMode::Sweep,
            _ => bail!(
                "--mode-override {m} not applicable to a {} scenario",
                scenario.spec.mode_name()
            ),
        }
    }
    Ok(scenario)
}

fn build_boundary_curve(shape: &BoundaryShape) -> Result<ParamCurve> {
    Ok(match shape {
        BoundaryShape::Straight { from_m, to_m } => ParamCurve::line(
            Point2::new(from_m[0], from_m[1]),
            Point2::new(to_m[0], to_m[1]),
        )?,
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
        )?,
    })
}

pub fn cmd_check(path: &Path, mode_override: Option<&str>) -> Result<u8> {
    let scenario = load_scenario(path, mode_override)?;
    match &scenario.spec {
        ModeSpec::Boundary(b) => {
            let curve = build_boundary_curve(&b.boundary)?;
            let team = BoundaryTeam::new(
                curve,
                b.robots_arc_m.clone(),
                b.v_r_max_mps,
                b.k,
                b.epsilon_m,
            )?;
            let intruder = IntruderState {
                pos: Point2::new(b.intruder.start_m[0], b.intruder.start_m[1]),
                v_i_max: b.intruder.v_i_max_mps,
                visible_since: b.intruder.visible_from_s,
            };
            let (ok, margin) = feasibility(&team, &intruder);
            let p = worst_case_intruder_target(&team, &intruder);
            println!(
                "check mode=boundary feasible={ok} margin={margin:.6} epsilon={} sup_point=({:.4},{:.4})",
                b.epsilon_m, p.x, p.y
            );
            Ok(if ok { 0 } else { EXIT_INFEASIBLE })
        }
        ModeSpec::Siege(s) => {
            let mut ring =
                SiegeRing::circle(Point2::new(s.center_m[0], s.center_m[1]), s.radius_m)?;
            if let Some(d) = s.approx_diameter_m {
                ring.approx_diameter = d;
            }
            let team = SiegeTeam::new(
                s.robots_s1_arc_m.clone(),
                s.robots_s2_arc_m.clone(),
                s.v_r_max_mps,
                s.epsilon_m,
            )?;
            let set = IntruderSet {
                positions: s
                    .intruders
                    .iter()
                    .map(|i| Point2::new(i.start_m[0], i.start_m[1]))
                    .collect(),
                v_i_max: s.v_i_max_mps,
            };
            let (ok, margin) = ring_feasibility(&ring, &team, &set, s.eta_normalization);
            let (arc, p) = ring_danger_argmax(&ring, &team, &set, s.eta_normalization);
            println!(
                "check mode=siege feasible={ok} margin={margin:.6} epsilon={} intruders={} sup_point=({:.4},{:.4}) sup_arc={arc:?}",
                s.epsilon_m,
                set.positions.len(),
                p.x,
                p.y
            );
            Ok(if ok { 0 } else { EXIT_INFEASIBLE })
        }
        ModeSpec::Coverage(c) => {
            let corridor = Corridor::new(c.sensing_radius_m, c.extension_factor)?;
            let cycle = patrol_cycle_steps(&corridor, c.method, c.n_agents);
            println!(
                "check mode=coverage feasible=true method={:?} grid={}x{} cycle_steps={cycle}",
                c.method, corridor.rows, corridor.cols
            );
            Ok(0)
        }
        ModeSpec::Switching(sw) => {
            let params = SwitchingParams::new(
                sw.epsilon_m,
                sw.mu0_m,
                sw.sensing_radius_m,
                sw.robot_radius_m,
                sw.variant,
            )?;
            let obstacles: Vec<_> = sw
                .obstacles
                .iter()
                .map(|o| o.build())
                .collect::<Result<Vec<_>, _>>()?;
            let mut admissible = 0usize;
            let mut pairs = 0usize;
            for i in 0..obstacles.len() {
                for j in i + 1..obstacles.len() {
                    pairs += 1;
                    if let Ok((gap, _)) = obstacle_gap(&obstacles[i], &obstacles[j]) {
                        if gap_admissible(gap, &params) {
                            admissible += 1;
                        }
                    }
                }
            }
            let feasible = obstacles.len() < 2
                || sw.variant == SwitchingMode::SingleObstacle
                || admissible > 0;
            println!(
                "check mode=switching feasible={feasible} variant={:?} obstacle_pairs={pairs} admissible_gaps={admissible}",
                sw.variant
            );
            Ok(if feasible { 0 } else { EXIT_INFEASIBLE })
        }
        ModeSpec::ForceField(ff) => {
            let robot = Point2::new(ff.robot_start_m[0], ff.robot_start_m[1]);
            let obstacles: Vec<_> = ff
                .obstacles
                .iter()
                .map(|o| o.build())
                .collect::<Result<Vec<_>, _>>()?;
            let clearance = obstacles
                .iter()
                .map(|o| o.distance_to(robot))
                .fold(f64::INFINITY, f64::min);
            let feasible = clearance >= ff.epsilon_m;
            println!(
                "check mode=force_field feasible={feasible} initial_clearance={clearance:.6} epsilon={}",
                ff.epsilon_m
            );
            Ok(if feasible { 0 } else { EXIT_INFEASIBLE })
        }
    }
}

pub fn cmd_run(
    path: &Path,
    seed: u64,
    out: Option<&Path>,
    mode_override: Option<&str>,
) -> Result<u8> {
    let scenario = load_scenario(path, mode_override)?;
    let (outcome, trace) = run_once(&scenario, seed)?;
    let out_path = match out {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
            path.with_file_name(format!("{stem}_seed{seed}.jsonl"))
        }
    };
    std::fs::write(&out_path, trace.to_jsonl())
        .with_context(|| format!("writing trace {}", out_path.display()))?;
    let events: usize = trace.steps.iter().map(|s| s.events.len()).sum();
    println!(
        "run mode={} seed={seed} steps={} events={events} crossings={} intercepts={} escapes={} detected={} min_clearance={} blocked={} trace={}",
        outcome.mode,
        outcome.steps,
        outcome.crossings,
        outcome.intercepts,
        outcome.escapes,
        outcome.detected.map(|d| d.to_string()).unwrap_or_else(|| "n/a".into()),
        outcome.min_clearance.map(|c| format!("{c:.6}")).unwrap_or_else(|| "n/a".into()),
        outcome.blocked,
        out_path.display()
    );
    if let Some(e) = &outcome.energy {
        println!(
            "energy switching_points={} baseline_samples={} reference_baseline={} reference_disagrees={} reduction_factor={:.2} power_switching={:.4} power_baseline={:.4}",
            e.switching_points,
            e.baseline_samples,
            e.reference_baseline.map(|r| r.to_string()).unwrap_or_else(|| "n/a".into()),
            e.reference_disagrees,
            e.reduction_factor,
            e.power_switching,
            e.power_baseline
        );
    }
    Ok(0)
}

pub fn cmd_sweep(
    path: &Path,
    n_seeds: u64,
    out: Option<&Path>,
    mode_override: Option<&str>,
) -> Result<u8> {
    let scenario = load_scenario(path, mode_override)?;
    if let Ok(threads) = std::env::var(THREADS_ENV) {
        let n: usize = threads
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a positive integer"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    let seeds: Vec<u64> = (0..n_seeds).collect();
    let summary = run_batch(&scenario, &seeds)?;
    let out_path = match out {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
            path.with_file_name(format!("{stem}_sweep.csv"))
        }
    };
    let mut w = csv::Writer::from_path(&out_path)
        .with_context(|| format!("writing sweep csv {}", out_path.display()))?;
    w.write_record([
        "seed",
        "mode",
        "steps",
        "feasible",
        "margin",
        "crossings",
        "intercepts",
        "escapes",
        "detected",
        "min_clearance",
        "switching_points",
        "sensing_calls",
        "blocked",
    ])?;
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in &summary.rows {
        w.write_record([
            r.seed.to_string(),
            r.mode.clone(),
            r.steps.to_string(),
            opt(r.feasible.map(|b| b.to_string())),
            opt(r.margin.map(|m| format!("{m:.9}"))),
            r.crossings.to_string(),
            r.intercepts.to_string(),
            r.escapes.to_string(),
            opt(r.detected.map(|d| d.to_string())),
            opt(r.min_clearance.map(|c| format!("{c:.9}"))),
            opt(r.switching_points.map(|s| s.to_string())),
            opt(r.sensing_calls.map(|s| s.to_string())),
            r.blocked.to_string(),
        ])?;
    }
    w.flush()?;
    println!(
        "sweep mode={} runs={} intercept_rate={:.4} escape_rate={:.4} detection_rate={:.4} min_clearance={} csv={}",
        scenario.spec.mode_name(),
        summary.runs,
        summary.intercept_rate,
        summary.escape_rate,
        summary.detection_rate,
        summary.min_clearance.map(|c| format!("{c:.6}")).unwrap_or_else(|| "n/a".into()),
        out_path.display()
    );
    Ok(0)
}

pub fn cmd_plot_data(path: &Path, kind: &str, out: Option<&Path>) -> Result<u8> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading trace {}", path.display()))?;
    let trace = SimTrace::from_jsonl(&text).context("parsing trace")?;
    let out_path = match out {
        Some(p) => p.to_path_buf(),
        None => path.with_extension(format!("{kind}.csv")),
    };
    let mut w = csv::Writer::from_path(&out_path)
        .with_context(|| format!("writing csv {}", out_path.display()))?;
    let n_agents = trace.steps.first().map_or(0, |s| s.agents.len());
    let n_intruders = trace.steps.first().map_or(0, |s| s.intruders.len());
    match kind {
        "trajectories" => {
            let mut header = vec!["t".to_string()];
            for i in 0..n_agents {
                header.push(format!("agent{i}_x"));
                header.push(format!("agent{i}_y"));
            }
            for i in 0..n_intruders {
                header.push(format!("intruder{i}_x"));
                header.push(format!("intruder{i}_y"));
            }
            w.write_record(&header)?;
            for s in &trace.steps {
                let mut row = vec![format!("{:.6}", s.t)];
                for a in &s.agents {
                    row.push(format!("{:.6}", a.x));
                    row.push(format!("{:.6}", a.y));
                }
                for i in &s.intruders {
                    row.push(format!("{:.6}", i.x));
                    row.push(format!("{:.6}", i.y));
                }
                w.write_record(&row)?;
            }
        }
        "y-evolution" => {
            let mut header = vec!["t".to_string()];
            for i in 0..n_agents {
                header.push(format!("agent{i}_y"));
            }
            for i in 0..n_intruders {
                header.push(format!("intruder{i}_y"));
            }
            w.write_record(&header)?;
            for s in &trace.steps {
                let mut row = vec![format!("{:.6}", s.t)];
                for a in &s.agents {
                    row.push(format!("{:.6}", a.y));
                }
                for i in &s.intruders {
                    row.push(format!("{:.6}", i.y));
                }
                w.write_record(&row)?;
            }
        }
        "distances" => {
            let mut header = vec!["t".to_string()];
            for i in 0..n_agents {
                for j in 0..n_intruders {
                    header.push(format!("agent{i}_to_intruder{j}"));
                }
            }
            w.write_record(&header)?;
            for s in &trace.steps {
                let mut row = vec![format!("{:.6}", s.t)];
                for a in &s.agents {
                    for i in &s.intruders {
                        let d = ((a.x - i.x).powi(2) + (a.y - i.y).powi(2)).sqrt();
                        row.push(format!("{:.6}", d));
                    }
                }
                w.write_record(&row)?;
            }
        }
        "clearance" => {
            // Switching traces export per-step obstacle minima; continuous
            // traces export the per-step clearance column.
            let switching: Vec<(&f64, &Event)> = trace
                .steps
                .iter()
                .flat_map(|s| s.events.iter().map(move |e| (&s.t, e)))
                .filter(|(_, e)| matches!(e, Event::SwitchingPoint { .. }))
                .collect();
            if switching.is_empty() {
                w.write_record(["t", "clearance"])?;
                for s in &trace.steps {
                    if let Some(c) = s.clearance {
                        w.write_record([format!("{:.6}", s.t), format!("{c:.6}")])?;
                    }
                }
            } else {
                let n_obs = switching
                    .iter()
                    .map(|(_, e)| match e {
                        Event::SwitchingPoint { clearances, .. } => clearances.len(),
                        _ => 0,
                    })
                    .max()
                    .unwrap_or(0);
                let mut header = vec!["step".to_string(), "robot".to_string(), "travel".to_string(), "heading".to_string()];
                for i in 0..n_obs {
                    header.push(format!("clearance_obstacle{i}"));
                }
                w.write_record(&header)?;
                for (_, e) in switching {
                    if let Event::SwitchingPoint { robot, index, heading, travel, clearances, .. } = e {
                        let mut row = vec![
                            index.to_string(),
                            robot.to_string(),
                            format!("{travel:.6}"),
                            format!("{heading:.6}"),
                        ];
                        for i in 0..n_obs {
                            row.push(
                                clearances
                                    .get(i)
                                    .map(|c| format!("{c:.6}"))
                                    .unwrap_or_default(),
                            );
                        }
                        w.write_record(&row)?;
                    }
                }
            }
        }
        other => bail!("unknown plot kind '{other}'; expected trajectories | y-evolution | distances | clearance"),
    }
    w.flush()?;
    println!(
        "plot-data kind={kind} rows={} csv={}",
        trace.steps.len(),
        out_path.display()
    );
    Ok(0)
}
