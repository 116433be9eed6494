//! Leader-follower chain: each robot knows only its predecessor and heads
//! for the predecessor's previous switching point, travel-capped by the
//! predecessor's last hop.

use crate::geometry::{Point2, Vec2};
use serde::{Deserialize, Serialize};

/// Ordered chain: index 0 is the leader.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainTeam {
    pub positions: Vec<Point2>,
    /// Previous switching point of every robot, the follower targets.
    pub previous: Vec<Point2>,
    /// Hop length each robot executed at the last switching step.
    pub last_hop: Vec<f64>,
    /// Nominal inter-robot spacing, > 2 robot radii.
    pub spacing: f64,
    /// Per-link flags; a broken link freezes the follower behind it.
    pub link_ok: Vec<bool>,
}

impl ChainTeam {
    pub fn new(positions: Vec<Point2>, spacing: f64) -> ChainTeam {
        let n = positions.len();
        ChainTeam {
            previous: positions.clone(),
            last_hop: vec![0.0; n],
            link_ok: vec![true; n],
            positions,
            spacing,
        }
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }
}

/// Move every follower toward its predecessor's previous switching point,
/// capped by the predecessor's hop. The leader (index 0) is assumed already
/// advanced by the caller; `leader_prev` is where it stood before that and
/// `leader_hop` how far it hopped.
///
/// A follower with a broken link holds position. Returns the headings the
/// followers adopted.
pub fn follower_update(chain: &mut ChainTeam, leader_prev: Point2, leader_hop: f64) -> Vec<f64> {
    let n = chain.n();
    let mut headings = vec![0.0; n];
    chain.previous[0] = leader_prev;
    chain.last_hop[0] = leader_hop;
    #[allow(clippy::needless_range_loop)]
    for k in 1..n {
        if !chain.link_ok[k] {
            chain.previous[k] = chain.positions[k];
            chain.last_hop[k] = 0.0;
            continue;
        }
        let target = chain.previous[k - 1];
        let here = chain.positions[k];
        let to_target = Vec2::from_points(here, target);
        let dist = to_target.norm();
        headings[k] = to_target.angle();
        // Cap by the predecessor's hop so a follower can never overtake.
        let cap = chain.last_hop[k - 1];
        let travel = dist.min(cap);
        let next = if dist > 0.0 {
            here.add(to_target.normalized().scale(travel))
        } else {
            here
        };
        chain.previous[k] = here;
        chain.last_hop[k] = travel;
        chain.positions[k] = next;
    }
    headings
}
