//! Deterministic 2D multi-agent simulation library for decentralized
//! interception, containment, coverage and obstacle-avoidance laws, plus a
//! fixed-step world simulator and a seeded batch harness.

pub mod boundary;
pub mod coverage;
pub mod engine;
pub mod error;
pub mod force_field;
pub mod geometry;
pub mod scenario;
pub mod siege;
pub mod switching;
pub mod trace;

pub use error::{GeomError, LawError, SimError};
pub use geometry::{chord_length, Obstacle, ObstacleShape, ParamCurve, Point2, Vec2};
