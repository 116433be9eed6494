//! Scenario files: JSON schema with explicit units in field names, a
//! normalizing loader (distances may be declared in meters or decimeters)
//! and a stable content hash.

use crate::coverage::{CoverageMode, IntruderMission, PayoffForm};
use crate::error::SimError;
use crate::geometry::{Obstacle, Point2, Vec2};
use crate::siege::EtaNormalization;
use crate::switching::SwitchingMode;
use crate::trace::fnv1a64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceUnit {
    #[default]
    M,
    Dm,
}

impl DistanceUnit {
    pub fn to_meters(self) -> f64 {
        match self {
            DistanceUnit::M => 1.0,
            DistanceUnit::Dm => 0.1,
        }
    }
}

/// Top-level scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    /// Unit of every `*_m` and `*_mps` field in the file; the loader
    /// normalizes everything to meters and remembers the original.
    #[serde(default)]
    pub distance_unit: DistanceUnit,
    pub dt_s: f64,
    pub duration_s: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(flatten)]
    pub spec: ModeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum ModeSpec {
    Boundary(BoundaryScenario),
    Siege(SiegeScenario),
    Coverage(CoverageScenario),
    Switching(SwitchingScenario),
    ForceField(ForceFieldScenario),
}

impl ModeSpec {
    pub fn mode_name(&self) -> &'static str {
        match self {
            ModeSpec::Boundary(_) => "boundary",
            ModeSpec::Siege(_) => "siege",
            ModeSpec::Coverage(_) => "coverage",
            ModeSpec::Switching(_) => "switching",
            ModeSpec::ForceField(_) => "force_field",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryShape {
    Straight {
        from_m: [f64; 2],
        to_m: [f64; 2],
    },
    Arc {
        center_m: [f64; 2],
        radius_m: f64,
        start_angle_rad: f64,
        end_angle_rad: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryScenario {
    pub boundary: BoundaryShape,
    /// Robot arc coordinates at t = 0, ascending.
    pub robots_arc_m: Vec<f64>,
    pub k: usize,
    pub v_r_max_mps: f64,
    pub epsilon_m: f64,
    pub intruder: IntruderSpec,
    /// Crossing attempts before the run ends; met crossings bounce the
    /// intruder back for another try. Defaults to the single attempt of the
    /// interception game.
    #[serde(default = "default_max_crossings")]
    pub max_crossings: u64,
}

fn default_max_crossings() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntruderSpec {
    pub start_m: [f64; 2],
    pub v_i_max_mps: f64,
    #[serde(default)]
    pub visible_from_s: f64,
    pub strategy: StrategySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategySpec {
    /// Head straight for the point attaining the danger supremum.
    WorstCase {
        /// Re-evaluate the target every this many steps; omit to commit at
        /// first visibility.
        #[serde(default)]
        replan_every: Option<u64>,
    },
    /// Seeded random heading with an outward drift.
    RandomWalk {
        #[serde(default = "default_outward_bias")]
        outward_bias: f64,
    },
    /// Scripted waypoint loop.
    Waypoints { points_m: Vec<[f64; 2]> },
}

fn default_outward_bias() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegeScenario {
    pub center_m: [f64; 2],
    pub radius_m: f64,
    /// Local arc coordinates from P1 along S1.
    pub robots_s1_arc_m: Vec<f64>,
    /// Local arc coordinates from P2 along S2.
    pub robots_s2_arc_m: Vec<f64>,
    pub v_r_max_mps: f64,
    pub epsilon_m: f64,
    /// Defaults to the true ring diameter.
    #[serde(default)]
    pub approx_diameter_m: Option<f64>,
    pub v_i_max_mps: f64,
    pub intruders: Vec<SiegeIntruderSpec>,
    #[serde(default)]
    pub eta_normalization: EtaNormalization,
    /// Total crossing attempts before the run ends; omit for unbounded
    /// sustained play.
    #[serde(default)]
    pub max_crossings: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiegeIntruderSpec {
    pub start_m: [f64; 2],
    pub strategy: StrategySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageScenario {
    pub method: CoverageMode,
    pub sensing_radius_m: f64,
    #[serde(default)]
    pub extension_factor: usize,
    pub n_agents: usize,
    pub agent_speed_mps: f64,
    pub intruder_speed_mps: f64,
    #[serde(default)]
    pub mission: IntruderMission,
    /// Poisson intrusion density; defaults to the value realizing the 5x
    /// formation ratio at the configured sensing radius.
    #[serde(default)]
    pub lambda_per_m2: Option<f64>,
    #[serde(default)]
    pub weights: Option<[f64; 4]>,
    #[serde(default)]
    pub payoff_form: PayoffForm,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
}

fn default_substeps() -> usize {
    48
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum ObstacleSpec {
    Disk {
        center_m: [f64; 2],
        radius_m: f64,
    },
    Polygon {
        center_m: [f64; 2],
        vertices_m: Vec<[f64; 2]>,
    },
    Ellipse {
        center_m: [f64; 2],
        a_m: f64,
        b_m: f64,
        #[serde(default = "default_sides")]
        sides: usize,
    },
}

fn default_sides() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovingObstacleSpec {
    #[serde(flatten)]
    pub shape: ObstacleSpec,
    #[serde(default)]
    pub velocity_mps: Option<[f64; 2]>,
    #[serde(default)]
    pub angular_velocity_rad_s: Option<f64>,
    /// Waypoint loop overriding the constant velocity, if present.
    #[serde(default)]
    pub waypoints_m: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub waypoint_speed_mps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchingScenario {
    pub variant: SwitchingMode,
    pub epsilon_m: f64,
    pub mu0_m: f64,
    pub sensing_radius_m: f64,
    pub robot_radius_m: f64,
    pub obstacles: Vec<ObstacleSpec>,
    /// Robot start positions; index 0 is the leader in chain variants.
    pub robots_m: Vec<[f64; 2]>,
    pub chain_spacing_m: f64,
    pub target_m: [f64; 2],
    pub target_radius_m: f64,
    pub max_switching_steps: u64,
    /// Inject seeded measurement noise bounded by mu0.
    #[serde(default)]
    pub measurement_noise: bool,
    #[serde(default)]
    pub energy: Option<EnergySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySpec {
    pub speed_mps: f64,
    pub packet_period_s: f64,
    pub c_s0: f64,
    pub c_s1: f64,
    #[serde(default)]
    pub reference_baseline: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceFieldScenario {
    pub robot_start_m: [f64; 2],
    pub robot_radius_m: f64,
    pub epsilon_m: f64,
    /// Radius of the bounded region the robot moves in, centered at the
    /// origin; the region boundary is impenetrable.
    pub arena_radius_m: f64,
    pub sojourn_dt_s: f64,
    pub obstacles: Vec<MovingObstacleSpec>,
    #[serde(default = "default_n_sink")]
    pub n_sink: usize,
    /// Shared force constant of the repulsive and attractive families.
    #[serde(default = "default_force_constant")]
    pub force_constant: f64,
    #[serde(default)]
    pub dump_field: bool,
    /// Seeded jitter applied to obstacle initial positions in batch runs.
    #[serde(default)]
    pub position_jitter_m: f64,
}

fn default_n_sink() -> usize {
    8
}

fn default_force_constant() -> f64 {
    1.0
}

impl Scenario {
    /// Parse, normalize to meters, and validate.
    pub fn from_json(text: &str) -> Result<Scenario, SimError> {
        let mut scenario: Scenario =
            serde_json::from_str(text).map_err(|e| SimError::BadScenario(e.to_string()))?;
        let f = scenario.distance_unit.to_meters();
        if f != 1.0 {
            scenario.scale_lengths(f);
        }
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Stable content hash of the normalized scenario.
    pub fn hash(&self) -> String {
        fnv1a64(
            serde_json::to_string(self)
                .expect("scenario serializes")
                .as_bytes(),
        )
    }

    fn scale_lengths(&mut self, f: f64) {
        let s2 = |v: &mut [f64; 2]| {
            v[0] *= f;
            v[1] *= f;
        };
        match &mut self.spec {
            ModeSpec::Boundary(b) => {
                match &mut b.boundary {
                    BoundaryShape::Straight { from_m, to_m } => {
                        s2(from_m);
                        s2(to_m);
                    }
                    BoundaryShape::Arc {
                        center_m, radius_m, ..
                    } => {
                        s2(center_m);
                        *radius_m *= f;
                    }
                }
                for c in &mut b.robots_arc_m {
                    *c *= f;
                }
                b.v_r_max_mps *= f;
                b.epsilon_m *= f;
                scale_intruder(&mut b.intruder, f);
            }
            ModeSpec::Siege(s) => {
                s2(&mut s.center_m);
                s.radius_m *= f;
                for c in s
                    .robots_s1_arc_m
                    .iter_mut()
                    .chain(s.robots_s2_arc_m.iter_mut())
                {
                    *c *= f;
                }
                s.v_r_max_mps *= f;
                s.epsilon_m *= f;
                s.v_i_max_mps *= f;
                if let Some(d) = &mut s.approx_diameter_m {
                    *d *= f;
                }
                for i in &mut s.intruders {
                    s2(&mut i.start_m);
                    scale_strategy(&mut i.strategy, f);
                }
            }
            ModeSpec::Coverage(c) => {
                c.sensing_radius_m *= f;
                c.agent_speed_mps *= f;
                c.intruder_speed_mps *= f;
                if let Some(l) = &mut c.lambda_per_m2 {
                    // Density scales inversely with area.
                    *l /= f * f;
                }
            }
            ModeSpec::Switching(sw) => {
                sw.epsilon_m *= f;
                sw.mu0_m *= f;
                sw.sensing_radius_m *= f;
                sw.robot_radius_m *= f;
                sw.chain_spacing_m *= f;
                s2(&mut sw.target_m);
                sw.target_radius_m *= f;
                for r in &mut sw.robots_m {
                    s2(r);
                }
                for o in &mut sw.obstacles {
                    scale_obstacle(o, f);
                }
                if let Some(e) = &mut sw.energy {
                    e.speed_mps *= f;
                }
            }
            ModeSpec::ForceField(ff) => {
                s2(&mut ff.robot_start_m);
                ff.robot_radius_m *= f;
                ff.epsilon_m *= f;
                ff.arena_radius_m *= f;
                ff.position_jitter_m *= f;
                for o in &mut ff.obstacles {
                    scale_obstacle(&mut o.shape, f);
                    if let Some(v) = &mut o.velocity_mps {
                        s2(v);
                    }
                    if let Some(w) = &mut o.waypoints_m {
                        for p in w {
                            s2(p);
                        }
                    }
                    if let Some(v) = &mut o.waypoint_speed_mps {
                        *v *= f;
                    }
                }
            }
        }
    }

    fn validate(&self) -> Result<(), SimError> {
        if self.dt_s <= 0.0 {
            return Err(SimError::BadScenario("dt_s must be positive".into()));
        }
        if self.duration_s <= 0.0 {
            return Err(SimError::BadScenario("duration_s must be positive".into()));
        }
        match &self.spec {
            ModeSpec::Boundary(b) => {
                if b.epsilon_m <= 0.0 {
                    return Err(SimError::BadScenario("epsilon_m must be positive".into()));
                }
                if b.robots_arc_m.windows(2).any(|w| w[0] > w[1]) {
                    return Err(SimError::BadScenario(
                        "robots_arc_m must be ascending".into(),
                    ));
                }
                if b.k == 0 || (b.k >= 2 && 2 * b.k > b.robots_arc_m.len()) {
                    return Err(SimError::BadScenario(format!(
                        "k = {} invalid for {} robots",
                        b.k,
                        b.robots_arc_m.len()
                    )));
                }
            }
            ModeSpec::Siege(s) => {
                if s.epsilon_m <= 0.0 {
                    return Err(SimError::BadScenario("epsilon_m must be positive".into()));
                }
                if s.radius_m <= 0.0 {
                    return Err(SimError::BadScenario("radius_m must be positive".into()));
                }
                if s.intruders.is_empty() {
                    return Err(SimError::BadScenario(
                        "at least one intruder required".into(),
                    ));
                }
            }
            ModeSpec::Coverage(c) => {
                if c.n_agents == 0 {
                    return Err(SimError::BadScenario("n_agents must be positive".into()));
                }
                if c.sensing_radius_m <= 0.0 {
                    return Err(SimError::BadScenario(
                        "sensing_radius_m must be positive".into(),
                    ));
                }
            }
            ModeSpec::Switching(sw) => {
                if sw.epsilon_m <= sw.mu0_m {
                    return Err(SimError::BadScenario("epsilon_m must exceed mu0_m".into()));
                }
                if sw.robots_m.is_empty() {
                    return Err(SimError::BadScenario("robots_m must not be empty".into()));
                }
            }
            ModeSpec::ForceField(ff) => {
                if ff.epsilon_m <= 0.0 {
                    return Err(SimError::BadScenario("epsilon_m must be positive".into()));
                }
                if ff.sojourn_dt_s <= 0.0 {
                    return Err(SimError::BadScenario(
                        "sojourn_dt_s must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn scale_intruder(i: &mut IntruderSpec, f: f64) {
    i.start_m[0] *= f;
    i.start_m[1] *= f;
    i.v_i_max_mps *= f;
    scale_strategy(&mut i.strategy, f);
}

fn scale_strategy(s: &mut StrategySpec, f: f64) {
    if let StrategySpec::Waypoints { points_m } = s {
        for p in points_m {
            p[0] *= f;
            p[1] *= f;
        }
    }
}

fn scale_obstacle(o: &mut ObstacleSpec, f: f64) {
    match o {
        ObstacleSpec::Disk { center_m, radius_m } => {
            center_m[0] *= f;
            center_m[1] *= f;
            *radius_m *= f;
        }
        ObstacleSpec::Polygon {
            center_m,
            vertices_m,
        } => {
            center_m[0] *= f;
            center_m[1] *= f;
            for v in vertices_m {
                v[0] *= f;
                v[1] *= f;
            }
        }
        ObstacleSpec::Ellipse {
            center_m, a_m, b_m, ..
        } => {
            center_m[0] *= f;
            center_m[1] *= f;
            *a_m *= f;
            *b_m *= f;
        }
    }
}

impl ObstacleSpec {
    pub fn build(&self) -> Result<Obstacle, SimError> {
        let obstacle = match self {
            ObstacleSpec::Disk { center_m, radius_m } => {
                Obstacle::disk(Point2::new(center_m[0], center_m[1]), *radius_m)
            }
            ObstacleSpec::Polygon {
                center_m,
                vertices_m,
            } => Obstacle::polygon(
                vertices_m.iter().map(|v| Point2::new(v[0], v[1])).collect(),
                Point2::new(center_m[0], center_m[1]),
            ),
            ObstacleSpec::Ellipse {
                center_m,
                a_m,
                b_m,
                sides,
            } => Obstacle::ellipse(Point2::new(center_m[0], center_m[1]), *a_m, *b_m, *sides),
        };
        obstacle.map_err(SimError::Geom)
    }
}

impl MovingObstacleSpec {
    pub fn build(&self) -> Result<Obstacle, SimError> {
        let mut o = self.shape.build()?;
        if let Some(v) = self.velocity_mps {
            o.velocity = Vec2::new(v[0], v[1]);
        }
        if let Some(w) = self.angular_velocity_rad_s {
            o.angular_velocity = w;
        }
        Ok(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boundary_json() -> String {
        r#"{
            "mode": "boundary",
            "dt_s": 0.05,
            "duration_s": 60.0,
            "boundary": { "kind": "straight", "from_m": [0, 0], "to_m": [10, 0] },
            "robots_arc_m": [1, 3, 5, 7, 9],
            "k": 1,
            "v_r_max_mps": 3.0,
            "epsilon_m": 0.5,
            "intruder": {
                "start_m": [5, 6],
                "v_i_max_mps": 4.2,
                "strategy": { "kind": "worst_case" }
            }
        }"#
        .to_string()
    }

    #[test]
    fn load_serialize_round_trip() {
        let s = Scenario::from_json(&boundary_json()).unwrap();
        let text = s.to_json();
        let back = Scenario::from_json(&text).unwrap();
        assert_eq!(s, back);
        assert_eq!(s.hash(), back.hash());
    }

    #[test]
    fn missing_field_error_names_it() {
        let bad = boundary_json().replace("\"epsilon_m\": 0.5,", "");
        let err = Scenario::from_json(&bad).unwrap_err();
        assert!(err.to_string().contains("epsilon_m"), "{err}");
    }

    #[test]
    fn decimeters_normalize_to_meters() {
        let dm = boundary_json().replace(
            "\"mode\": \"boundary\",",
            "\"mode\": \"boundary\", \"distance_unit\": \"dm\",",
        );
        let s = Scenario::from_json(&dm).unwrap();
        match &s.spec {
            ModeSpec::Boundary(b) => {
                assert!((b.epsilon_m - 0.05).abs() < 1e-12);
                assert!((b.robots_arc_m[4] - 0.9).abs() < 1e-12);
                assert!((b.v_r_max_mps - 0.3).abs() < 1e-12);
            }
            _ => panic!("wrong mode"),
        }
        assert_eq!(s.distance_unit, DistanceUnit::Dm);
    }

    #[test]
    fn invalid_k_rejected() {
        let bad = boundary_json().replace("\"k\": 1,", "\"k\": 4,");
        assert!(Scenario::from_json(&bad).is_err());
    }

    #[test]
    fn hash_changes_with_content() {
        let a = Scenario::from_json(&boundary_json()).unwrap();
        let b_json = boundary_json().replace("\"k\": 1", "\"k\": 2");
        let b = Scenario::from_json(&b_json).unwrap();
        assert_ne!(a.hash(), b.hash());
    }
}
