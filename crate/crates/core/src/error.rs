use thiserror::Error;

/// Errors raised by the geometric kernel and the navigation laws.
#[derive(Debug, Error)]
pub enum GeomError {
    #[error("arc coordinate {s} outside [0, {len}]")]
    ArcOutOfRange { s: f64, len: f64 },
    #[error("point ({x}, {y}) is {dist} away from the curve (tolerance {tol})")]
    OffCurve { x: f64, y: f64, dist: f64, tol: f64 },
    #[error("polyline must have at least two distinct points")]
    DegenerateCurve,
    #[error("polygon is not convex at vertex {index}")]
    NotConvex { index: usize },
    #[error("disk radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("query point is inside or on the obstacle")]
    InsideObstacle,
    #[error("obstacles overlap, no separating gap")]
    OverlappingObstacles,
    #[error("non-finite value in numeric integration")]
    NonFinite,
}

#[derive(Debug, Error)]
pub enum LawError {
    #[error("robot index {index} out of range for team of {n}")]
    BadRobotIndex { index: usize, n: usize },
    #[error("k = {k} violates 1 <= k <= n/2 for n = {n}")]
    BadK { k: usize, n: usize },
    #[error("robot coordinates are not sorted ascending")]
    UnsortedCoords,
    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("intruder is outside the siege ring")]
    IntruderOutsideRing,
    #[error("no admissible gap between visible obstacles")]
    Blocked,
    #[error("clearance prediction failed after {retries} halvings")]
    ClearanceRetriesExhausted { retries: u32 },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Faults raised by the simulation engine when a world invariant breaks.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("invariant violated at step {step}: {what}")]
    InvariantFault { step: u64, what: String },
    #[error("scenario invalid: {0}")]
    BadScenario(String),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
