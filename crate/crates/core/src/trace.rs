//! Simulation traces: time-ordered step records with typed events,
//! serialized as JSON Lines with a self-describing header record.

use crate::geometry::Point2;
use serde::{Deserialize, Serialize};

/// Events the engine can emit during a step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    /// An intruder's motion segment crossed the guarded curve.
    Crossing {
        intruder: usize,
        x: f64,
        y: f64,
        arc: Option<String>,
        frac: f64,
    },
    /// Crossing met by the required interceptors.
    Intercept {
        intruder: usize,
        witnesses: Vec<usize>,
    },
    /// Crossing left unmet; the intruder escaped.
    Escape { intruder: usize },
    /// A measure-decide-move switching point with its measured values.
    SwitchingPoint {
        robot: usize,
        index: u64,
        chord: f64,
        heading: f64,
        travel: f64,
        /// Minimum clearance to each obstacle over the executed hop.
        clearances: Vec<f64>,
        /// Cumulative sensing calls at this switching point.
        sensing_calls: u64,
        /// Closed-form resultant magnitude, when the mode defines one.
        closed_form: Option<f64>,
    },
    /// Sensing-disk detection of an intruder.
    Detection { intruder: usize, agent: usize },
    /// Two agents exchanged knowledge.
    Meeting { a: usize, b: usize },
    /// Adjacent robots were clamped to midpoint contact to preserve order.
    OrderClamp { a: usize, b: usize },
    /// A danger tie persisted unusually long.
    TiePersist { robot: usize, steps: u64 },
    /// Navigation halted: no admissible gap or retries exhausted.
    Blocked { robot: usize },
    /// New minimum clearance along the run.
    ClearanceMin { robot: usize, value: f64 },
    /// Obstacles fused into one source.
    ObstaclesMerged { a: usize, b: usize },
}

/// Pose and control of one agent at one step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentRecord {
    pub x: f64,
    pub y: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// Commanded control for the step (law-specific units).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub control: Option<f64>,
    /// Curvilinear coordinate, for on-curve robots.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arc: Option<f64>,
}

impl AgentRecord {
    pub fn at(p: Point2) -> AgentRecord {
        AgentRecord {
            x: p.x,
            y: p.y,
            theta: None,
            control: None,
            arc: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub agents: Vec<AgentRecord>,
    pub intruders: Vec<AgentRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<Event>,
    /// Danger certificate along interception runs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<f64>,
    /// Minimum robot-obstacle clearance this step, in obstacle modes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clearance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub scenario_hash: String,
    pub seed: u64,
    pub mode: String,
    pub dt_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimTrace {
    pub header: TraceHeader,
    pub steps: Vec<StepRecord>,
}

impl SimTrace {
    pub fn new(header: TraceHeader) -> SimTrace {
        SimTrace {
            header,
            steps: Vec::new(),
        }
    }

    pub fn push(&mut self, step: StepRecord) {
        debug_assert!(
            self.steps.last().is_none_or(|prev| step.t > prev.t),
            "trace time must strictly increase"
        );
        self.steps.push(step);
    }

    pub fn events(&self) -> impl Iterator<Item = (&StepRecord, &Event)> {
        self.steps
            .iter()
            .flat_map(|s| s.events.iter().map(move |e| (s, e)))
    }

    /// Serialize as JSON Lines: one header record, then one record per step.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        out.push_str(&serde_json::to_string(&self.header).expect("header serializes"));
        out.push('\n');
        for step in &self.steps {
            out.push_str(&serde_json::to_string(step).expect("step serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<SimTrace, serde_json::Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: TraceHeader = serde_json::from_str(lines.next().unwrap_or("{}"))?;
        let mut steps = Vec::new();
        for line in lines {
            steps.push(serde_json::from_str(line)?);
        }
        Ok(SimTrace { header, steps })
    }
}

/// FNV-1a 64-bit hash, hex-encoded; used to stamp traces with the scenario
/// that produced them.
pub fn fnv1a64(bytes: &[u8]) -> String {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}
