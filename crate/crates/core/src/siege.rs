//! Dynamic-intercepting laws on a closed siege ring split into two arcs.
//!
//! The ring is a closed convex boundary cut at P1 and P2 into arcs S1
//! (P1 -> P2, counter-clockwise) and S2 (P2 -> P1, counter-clockwise). A
//! fixed subgroup of robots guards each arc and never leaves it; each arc
//! uses its own local curvilinear coordinate measured from its anchor point
//! (P1 for S1, P2 for S2).
//!
//! Control signs: a positive control moves an S1 robot toward P2 and an S2
//! robot also toward P2 (decreasing its local coordinate), which is why the
//! S2 comparison is inverted relative to S1.

use crate::boundary::{sup_on_interval, ArcInterval, TIE_TOL};
use crate::error::LawError;
use crate::geometry::{chord_length, ConvexRegion, ParamCurve, Point2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcId {
    S1,
    S2,
}

/// Closed convex siege boundary split at P1/P2 into two guarded arcs.
#[derive(Debug, Clone)]
pub struct SiegeRing {
    pub arc1: ParamCurve,
    pub arc2: ParamCurve,
    pub region: ConvexRegion,
    /// Approximate ring diameter used to normalize intruder weights.
    pub approx_diameter: f64,
}

impl SiegeRing {
    /// Circular ring of radius `r` centered at `center`; P1 sits at angle 0
    /// and P2 at angle pi, so both arcs are half circles.
    pub fn circle(center: Point2, r: f64) -> Result<SiegeRing, LawError> {
        use std::f64::consts::PI;
        let arc1 = ParamCurve::circle_arc(center, r, 0.0, PI)?;
        let arc2 = ParamCurve::circle_arc(center, r, PI, 2.0 * PI)?;
        let region = ConvexRegion::circle(center, r)?;
        Ok(SiegeRing {
            arc1,
            arc2,
            region,
            approx_diameter: 2.0 * r,
        })
    }

    pub fn arc(&self, id: ArcId) -> &ParamCurve {
        match id {
            ArcId::S1 => &self.arc1,
            ArcId::S2 => &self.arc2,
        }
    }

    pub fn len(&self, id: ArcId) -> f64 {
        self.arc(id).total_length()
    }
}

/// Robots split between the two arcs: `coords_s1` are local coordinates from
/// P1 along S1, `coords_s2` local coordinates from P2 along S2. Per-arc
/// ordering is preserved for the whole run and robots never change arcs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiegeTeam {
    pub coords_s1: Vec<f64>,
    pub coords_s2: Vec<f64>,
    pub v_r_max: f64,
    pub epsilon: f64,
}

impl SiegeTeam {
    pub fn new(
        coords_s1: Vec<f64>,
        coords_s2: Vec<f64>,
        v_r_max: f64,
        epsilon: f64,
    ) -> Result<SiegeTeam, LawError> {
        if coords_s1.windows(2).any(|w| w[0] > w[1]) || coords_s2.windows(2).any(|w| w[0] > w[1]) {
            return Err(LawError::UnsortedCoords);
        }
        if v_r_max <= 0.0 {
            return Err(LawError::NonPositive {
                what: "v_r_max",
                value: v_r_max,
            });
        }
        if epsilon <= 0.0 {
            return Err(LawError::NonPositive {
                what: "epsilon",
                value: epsilon,
            });
        }
        Ok(SiegeTeam {
            coords_s1,
            coords_s2,
            v_r_max,
            epsilon,
        })
    }

    pub fn coords(&self, id: ArcId) -> &[f64] {
        match id {
            ArcId::S1 => &self.coords_s1,
            ArcId::S2 => &self.coords_s2,
        }
    }

    pub fn n(&self) -> usize {
        self.coords_s1.len() + self.coords_s2.len()
    }
}

/// Trapped intruders with a shared speed cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntruderSet {
    pub positions: Vec<Point2>,
    pub v_i_max: f64,
}

/// How the multi-intruder mean distance is normalized: divide the weighted
/// sum by the intruder count, or by the weight sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaNormalization {
    #[default]
    MeanOverCount,
    MeanOverWeights,
}

/// Nearest ring point to an interior intruder position: which arc holds it
/// and the projected point. Center ties break toward S1 at the smallest arc
/// coordinate.
pub fn ring_projection(ring: &SiegeRing, pos: Point2) -> Result<(ArcId, Point2), LawError> {
    if !ring.region.contains(pos) {
        return Err(LawError::IntruderOutsideRing);
    }
    let (s1, p1, d1) = ring.arc1.nearest_point(pos);
    let (s2, p2, d2) = ring.arc2.nearest_point(pos);
    let tie = TIE_TOL * (ring.len(ArcId::S1) + ring.len(ArcId::S2));
    if d1 <= d2 + tie {
        // Prefer S1 on ties; within S1 the nearest-point scan already picks
        // the smallest coordinate among equal minima.
        let _ = (s1, s2);
        Ok((ArcId::S1, p1))
    } else {
        Ok((ArcId::S2, p2))
    }
}

/// Voronoi-midpoint responsibility intervals of a robot on its own arc, in
/// that arc's local coordinates. The first robot's minus-interval reaches the
/// arc anchor; the last robot's plus-interval reaches the far end.
pub fn ring_segments(
    ring: &SiegeRing,
    team: &SiegeTeam,
    arc: ArcId,
    i: usize,
) -> Result<(ArcInterval, ArcInterval), LawError> {
    let coords = team.coords(arc);
    let m = coords.len();
    if i >= m {
        return Err(LawError::BadRobotIndex { index: i, n: m });
    }
    let l = ring.len(arc);
    let minus = if i == 0 {
        ArcInterval {
            lo: 0.0,
            hi: coords[0],
        }
    } else {
        ArcInterval {
            lo: 0.5 * (coords[i - 1] + coords[i]),
            hi: coords[i],
        }
    };
    let plus = if i + 1 == m {
        ArcInterval {
            lo: coords[i],
            hi: l,
        }
    } else {
        ArcInterval {
            lo: coords[i],
            hi: 0.5 * (coords[i] + coords[i + 1]),
        }
    };
    Ok((minus, plus))
}

/// Per-intruder escape likelihood at point `p` and the complementary weight:
/// an intruder a full ring diameter away weighs nothing.
pub fn intruder_weights(
    ring: &SiegeRing,
    intruders: &IntruderSet,
    p: Point2,
) -> (Vec<f64>, Vec<f64>) {
    let mut raw = Vec::with_capacity(intruders.positions.len());
    let mut psi = Vec::with_capacity(intruders.positions.len());
    for &q in &intruders.positions {
        let frac = (chord_length(q, p) / ring.approx_diameter).clamp(0.0, 1.0);
        raw.push(frac);
        psi.push(1.0 - frac);
    }
    (raw, psi)
}

/// Weighted mean chord distance from the intruder set to boundary point `p`.
pub fn eta(ring: &SiegeRing, intruders: &IntruderSet, p: Point2, norm: EtaNormalization) -> f64 {
    let (_, psi) = intruder_weights(ring, intruders, p);
    let m = intruders.positions.len();
    if m == 0 {
        return f64::INFINITY;
    }
    let weighted: f64 = intruders
        .positions
        .iter()
        .zip(&psi)
        .map(|(&q, &w)| w * chord_length(q, p))
        .sum();
    match norm {
        EtaNormalization::MeanOverCount => weighted / m as f64,
        EtaNormalization::MeanOverWeights => {
            let wsum: f64 = psi.iter().sum();
            if wsum > 0.0 {
                weighted / wsum
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Closest-robot arc distance on one arc, local coordinates.
fn xi(team: &SiegeTeam, arc: ArcId, s: f64) -> f64 {
    team.coords(arc)
        .iter()
        .map(|c| (c - s).abs())
        .fold(f64::INFINITY, f64::min)
}

fn arc_kernel(
    ring: &SiegeRing,
    team: &SiegeTeam,
    intruders: &IntruderSet,
    arc: ArcId,
    s: f64,
    norm: EtaNormalization,
) -> f64 {
    let p = ring.arc(arc).arc_point(s).expect("s within arc");
    let dist = if intruders.positions.len() == 1 {
        chord_length(intruders.positions[0], p)
    } else {
        eta(ring, intruders, p, norm)
    };
    xi(team, arc, s) - dist * team.v_r_max / intruders.v_i_max
}

/// Endpoint danger values for one arc, single- or multi-intruder. Matches
/// the sampled supremum whenever the intruders are at least as fast as the
/// robots.
pub fn ring_endpoint_danger_set(
    ring: &SiegeRing,
    team: &SiegeTeam,
    intruders: &IntruderSet,
    arc: ArcId,
    norm: EtaNormalization,
) -> Vec<(f64, f64)> {
    let coords = team.coords(arc);
    let m = coords.len();
    let l = ring.len(arc);
    let ratio = team.v_r_max / intruders.v_i_max;
    let dist_at = |s: f64| {
        let p = ring.arc(arc).arc_point(s.clamp(0.0, l)).expect("in range");
        if intruders.positions.len() == 1 {
            chord_length(intruders.positions[0], p)
        } else {
            eta(ring, intruders, p, norm)
        }
    };
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let h_minus = if i == 0 {
            coords[0] - dist_at(0.0) * ratio
        } else {
            0.5 * (coords[i] - coords[i - 1]) - dist_at(0.5 * (coords[i] + coords[i - 1])) * ratio
        };
        let h_plus = if i + 1 == m {
            (l - coords[i]) - dist_at(l) * ratio
        } else {
            0.5 * (coords[i + 1] - coords[i]) - dist_at(0.5 * (coords[i] + coords[i + 1])) * ratio
        };
        out.push((h_minus, h_plus));
    }
    out
}

/// Per-robot bang/zero controls, S1 robots first, then S2 robots.
///
/// A positive control moves an S1 robot toward P2 and an S2 robot toward P2
/// as well (i.e. decreasing S2-local coordinate); the integrator applies the
/// sign flip for S2.
pub fn ring_control_law(
    ring: &SiegeRing,
    team: &SiegeTeam,
    intruders: &IntruderSet,
    norm: EtaNormalization,
) -> Vec<f64> {
    let mut u = Vec::with_capacity(team.n());
    let tie1 = TIE_TOL * ring.len(ArcId::S1);
    let tie2 = TIE_TOL * ring.len(ArcId::S2);
    let fast_ok = intruders.v_i_max >= team.v_r_max;
    for (arc, tie) in [(ArcId::S1, tie1), (ArcId::S2, tie2)] {
        let pairs: Vec<(f64, f64)> = if fast_ok {
            ring_endpoint_danger_set(ring, team, intruders, arc, norm)
        } else {
            let m = team.coords(arc).len();
            (0..m)
                .map(|i| {
                    let (minus, plus) = ring_segments(ring, team, arc, i).expect("valid index");
                    let f = |s: f64| arc_kernel(ring, team, intruders, arc, s, norm);
                    (
                        sup_on_interval(minus, f, ring.len(arc)),
                        sup_on_interval(plus, f, ring.len(arc)),
                    )
                })
                .collect()
        };
        for (h_minus, h_plus) in pairs {
            let sign = if (h_minus - h_plus).abs() <= tie {
                0.0
            } else if h_minus < h_plus {
                1.0
            } else {
                -1.0
            };
            // S2 sign convention: positive moves toward P2.
            let sign = match arc {
                ArcId::S1 => sign,
                ArcId::S2 => -sign,
            };
            u.push(sign * team.v_r_max);
        }
    }
    u
}

/// Containment feasibility: per-arc supremum of the danger kernel must stay
/// within epsilon on both arcs.
pub fn ring_feasibility(
    ring: &SiegeRing,
    team: &SiegeTeam,
    intruders: &IntruderSet,
    norm: EtaNormalization,
) -> (bool, f64) {
    let mut margin = f64::NEG_INFINITY;
    for arc in [ArcId::S1, ArcId::S2] {
        let m = if intruders.v_i_max >= team.v_r_max {
            ring_endpoint_danger_set(ring, team, intruders, arc, norm)
                .into_iter()
                .flat_map(|(a, b)| [a, b])
                .fold(f64::NEG_INFINITY, f64::max)
        } else {
            sup_on_interval(
                ArcInterval {
                    lo: 0.0,
                    hi: ring.len(arc),
                },
                |s| arc_kernel(ring, team, intruders, arc, s, norm),
                ring.len(arc),
            )
        };
        margin = margin.max(m);
    }
    (margin <= team.epsilon, margin)
}

/// Boundary point attaining the containment danger supremum, with its arc.
pub fn ring_danger_argmax(
    ring: &SiegeRing,
    team: &SiegeTeam,
    intruders: &IntruderSet,
    norm: EtaNormalization,
) -> (ArcId, Point2) {
    let mut best = (f64::NEG_INFINITY, ArcId::S1, ring.arc1.start());
    for arc in [ArcId::S1, ArcId::S2] {
        let l = ring.len(arc);
        let n = 2048;
        for i in 0..=n {
            let s = l * i as f64 / n as f64;
            let v = arc_kernel(ring, team, intruders, arc, s, norm);
            if v > best.0 {
                best = (v, arc, ring.arc(arc).arc_point(s).expect("in range"));
            }
        }
    }
    (best.1, best.2)
}

/// Is some robot within ring distance epsilon of the crossing point? The
/// boundary coordinate runs around the whole ring, so robots of either arc
/// count: the arcs share their endpoints and a crossing at a seam is met by
/// whoever guards it from either side.
pub fn escape_check(
    ring: &SiegeRing,
    team: &SiegeTeam,
    arc: ArcId,
    crossing: Point2,
) -> Result<bool, LawError> {
    let s = ring.arc(arc).arc_coord(crossing)?;
    Ok(escape_check_at(ring, team, arc, s))
}

pub fn escape_check_at(ring: &SiegeRing, team: &SiegeTeam, arc: ArcId, s: f64) -> bool {
    let l1 = ring.len(ArcId::S1);
    let l2 = ring.len(ArcId::S2);
    let total = l1 + l2;
    // Global ring coordinate, counter-clockwise from P1: S1 locals map
    // directly; S2 locals continue from P2.
    let global = |arc: ArcId, local: f64| match arc {
        ArcId::S1 => local,
        ArcId::S2 => l1 + local,
    };
    let g_cross = global(arc, s);
    let ring_dist = |g: f64| {
        let d = (g - g_cross).abs();
        d.min(total - d)
    };
    team.coords_s1
        .iter()
        .map(|c| ring_dist(global(ArcId::S1, *c)))
        .chain(
            team.coords_s2
                .iter()
                .map(|c| ring_dist(global(ArcId::S2, *c))),
        )
        .any(|d| d <= team.epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn unit_ring() -> SiegeRing {
        SiegeRing::circle(Point2::new(0.0, 0.0), 1.0).unwrap()
    }

    fn team_of(s1: Vec<f64>, s2: Vec<f64>) -> SiegeTeam {
        SiegeTeam::new(s1, s2, 3.0, 0.3).unwrap()
    }

    #[test]
    fn projection_radial() {
        // Tolerance tracks the polyline sampling resolution: projecting a
        // deep interior point amplifies the angular quantization.
        let ring = unit_ring();
        let (arc, p) = ring_projection(&ring, Point2::new(0.5, 0.0)).unwrap();
        assert_eq!(arc, ArcId::S1);
        assert!(p.dist(Point2::new(1.0, 0.0)) < 5e-3);
    }

    #[test]
    fn projection_center_tie_breaks_to_s1() {
        let ring = unit_ring();
        let (arc, _) = ring_projection(&ring, Point2::new(0.0, 0.0)).unwrap();
        assert_eq!(arc, ArcId::S1);
    }

    #[test]
    fn projection_top() {
        let ring = unit_ring();
        let (arc, p) = ring_projection(&ring, Point2::new(0.0, 0.9)).unwrap();
        assert_eq!(arc, ArcId::S1);
        assert!(p.dist(Point2::new(0.0, 1.0)) < 5e-3);
    }

    #[test]
    fn projection_outside_errors() {
        let ring = unit_ring();
        assert!(ring_projection(&ring, Point2::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn segments_single_robot_splits_arc() {
        let ring = unit_ring();
        let l1 = ring.len(ArcId::S1);
        let team = team_of(vec![l1 / 2.0], vec![l1 / 2.0]);
        let (minus, plus) = ring_segments(&ring, &team, ArcId::S1, 0).unwrap();
        assert_eq!((minus.lo, minus.hi), (0.0, l1 / 2.0));
        assert_eq!((plus.lo, plus.hi), (l1 / 2.0, l1));
    }

    #[test]
    fn segments_two_robots_substitution() {
        // Straight-line check of the midpoint construction with local
        // coordinates 2 and 8 on an arc of length ~pi (scaled to 10 here by
        // using a big ring).
        let ring = SiegeRing::circle(Point2::new(0.0, 0.0), 10.0 / PI).unwrap();
        let team = team_of(vec![2.0, 8.0], vec![5.0]);
        let (m1, p1) = ring_segments(&ring, &team, ArcId::S1, 0).unwrap();
        let (m2, p2) = ring_segments(&ring, &team, ArcId::S1, 1).unwrap();
        assert_eq!((m1.lo, m1.hi), (0.0, 2.0));
        assert_eq!((p1.lo, p1.hi), (2.0, 5.0));
        assert_eq!((m2.lo, m2.hi), (5.0, 8.0));
        assert!((p2.hi - ring.len(ArcId::S1)).abs() < 1e-9);
    }

    #[test]
    fn segments_s2_anchored_at_p2() {
        // First S2 robot's minus interval starts at the P2 anchor (local 0).
        let ring = unit_ring();
        let team = team_of(vec![1.0], vec![0.7, 2.0]);
        let (minus, _) = ring_segments(&ring, &team, ArcId::S2, 0).unwrap();
        assert_eq!((minus.lo, minus.hi), (0.0, 0.7));
        let (_, plus) = ring_segments(&ring, &team, ArcId::S2, 1).unwrap();
        assert!(
            (plus.hi - ring.len(ArcId::S2)).abs() < 1e-9,
            "last robot reaches P1"
        );
    }

    #[test]
    fn weights_zero_distance() {
        let ring = unit_ring();
        let p = Point2::new(1.0, 0.0);
        let set = IntruderSet {
            positions: vec![p],
            v_i_max: 4.2,
        };
        let (raw, psi) = intruder_weights(&ring, &set, p);
        assert_eq!(raw[0], 0.0);
        assert_eq!(psi[0], 1.0);
    }

    #[test]
    fn weights_full_diameter() {
        let ring = unit_ring();
        let set = IntruderSet {
            positions: vec![Point2::new(-1.0, 0.0)],
            v_i_max: 4.2,
        };
        let (raw, psi) = intruder_weights(&ring, &set, Point2::new(1.0, 0.0));
        assert!((raw[0] - 1.0).abs() < 1e-12);
        assert!(psi[0].abs() < 1e-12);
    }

    #[test]
    fn weights_half_diameter() {
        let ring = unit_ring();
        let set = IntruderSet {
            positions: vec![Point2::new(0.0, 0.0)],
            v_i_max: 4.2,
        };
        let (_, psi) = intruder_weights(&ring, &set, Point2::new(1.0, 0.0));
        assert!((psi[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn control_symmetric_team_holds() {
        // Intruder at the center (all chord distances equal to the sampled
        // radius), robots spaced so every danger pair ties analytically: end
        // gaps count full, interior gaps half, hence [l/6, l/2, 5l/6]. The
        // middle robot's tie is exact even on the sampled boundary; the
        // outer pair must mirror each other, and the S2 pattern mirrors S1.
        let ring = unit_ring();
        let l = ring.len(ArcId::S1);
        let team = team_of(
            vec![l / 6.0, l / 2.0, 5.0 * l / 6.0],
            vec![l / 6.0, l / 2.0, 5.0 * l / 6.0],
        );
        let set = IntruderSet {
            positions: vec![Point2::new(0.0, 0.0)],
            v_i_max: 4.2,
        };
        let u = ring_control_law(&ring, &team, &set, EtaNormalization::MeanOverCount);
        assert_eq!(u[1], 0.0, "middle S1 robot holds: {u:?}");
        assert_eq!(u[4], 0.0, "middle S2 robot holds: {u:?}");
        assert_eq!(u[0], -u[2], "outer S1 robots mirror: {u:?}");
        assert_eq!(u[3], -u[5], "outer S2 robots mirror: {u:?}");
        assert_eq!(u[0], -u[3], "S2 sign convention mirrors S1: {u:?}");
    }

    #[test]
    fn escape_check_cases() {
        let ring = unit_ring();
        let team = team_of(vec![1.0], vec![2.0]);
        assert!(escape_check_at(&ring, &team, ArcId::S1, 1.0));
        assert!(!escape_check_at(
            &ring,
            &team,
            ArcId::S1,
            1.0 + team.epsilon + 0.01
        ));
        assert!(escape_check_at(
            &ring,
            &team,
            ArcId::S1,
            1.0 + 0.5 * team.epsilon
        ));
    }

    #[test]
    fn escape_check_covers_the_seams() {
        // A crossing at the P1 seam is met by the last S2 robot even though
        // it administratively belongs to the other arc.
        let ring = unit_ring();
        let l2 = ring.len(ArcId::S2);
        let team = team_of(vec![2.0], vec![l2 - 0.1]);
        assert!(
            escape_check_at(&ring, &team, ArcId::S1, 0.05),
            "S2 guard covers P1"
        );
        // And the P2 seam is covered by the last S1 robot.
        let l1 = ring.len(ArcId::S1);
        let team2 = team_of(vec![l1 - 0.1], vec![2.0]);
        assert!(
            escape_check_at(&ring, &team2, ArcId::S2, 0.05),
            "S1 guard covers P2"
        );
    }

    #[test]
    fn feasibility_dense_vs_sparse() {
        let ring = unit_ring();
        let l = ring.len(ArcId::S1);
        let dense: Vec<f64> = (0..8).map(|i| l * (i as f64 + 0.5) / 8.0).collect();
        let team = team_of(dense.clone(), dense);
        let set = IntruderSet {
            positions: vec![Point2::new(0.3, 0.2)],
            v_i_max: 4.2,
        };
        let (ok, _) = ring_feasibility(&ring, &team, &set, EtaNormalization::MeanOverCount);
        assert!(ok);

        let big = SiegeRing::circle(Point2::new(0.0, 0.0), 60.0).unwrap();
        let lone = team_of(
            vec![big.len(ArcId::S1) / 2.0],
            vec![big.len(ArcId::S2) / 2.0],
        );
        let set2 = IntruderSet {
            positions: vec![Point2::new(59.0, 0.0)],
            v_i_max: 4.2,
        };
        let (ok2, margin2) = ring_feasibility(&big, &lone, &set2, EtaNormalization::MeanOverCount);
        assert!(!ok2, "margin {margin2}");
    }

    #[test]
    fn endpoint_matches_sampled_on_arc() {
        let ring = unit_ring();
        let l = ring.len(ArcId::S1);
        let team = team_of(vec![l * 0.3, l * 0.7], vec![l * 0.5]);
        let set = IntruderSet {
            positions: vec![Point2::new(0.2, 0.4)],
            v_i_max: 4.2,
        };
        let fast = ring_endpoint_danger_set(
            &ring,
            &team,
            &set,
            ArcId::S1,
            EtaNormalization::MeanOverCount,
        )
        .into_iter()
        .flat_map(|(a, b)| [a, b])
        .fold(f64::NEG_INFINITY, f64::max);
        let sampled = sup_on_interval(
            ArcInterval { lo: 0.0, hi: l },
            |s| {
                arc_kernel(
                    &ring,
                    &team,
                    &set,
                    ArcId::S1,
                    s,
                    EtaNormalization::MeanOverCount,
                )
            },
            l,
        );
        assert!(
            (fast - sampled).abs() < 1e-3 * l,
            "fast {fast} sampled {sampled}"
        );
    }

    #[test]
    fn single_intruder_reduction_sign_match() {
        // The multi-intruder entry point with a one-element intruder set
        // must select the same control signs as an independent transcription
        // of the single-intruder law, on random configurations.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let ring = SiegeRing::circle(Point2::new(0.0, 0.0), 5.0).unwrap();
        let l1 = ring.len(ArcId::S1);
        let l2 = ring.len(ArcId::S2);
        for _ in 0..100 {
            let mut s1: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..l1)).collect();
            let mut s2: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..l2)).collect();
            s1.sort_by(|a, b| a.partial_cmp(b).unwrap());
            s2.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let team = SiegeTeam::new(s1, s2, 3.0, 0.3).unwrap();
            let r = rng.random_range(0.0..4.0);
            let th = rng.random_range(0.0..std::f64::consts::TAU);
            let pos = Point2::new(r * th.cos(), r * th.sin());
            let single = IntruderSet {
                positions: vec![pos],
                v_i_max: 4.2,
            };
            let u = ring_control_law(&ring, &team, &single, EtaNormalization::MeanOverCount);
            let reference = single_law_reference(&ring, &team, pos, single.v_i_max);
            assert_eq!(u, reference, "pos ({}, {})", pos.x, pos.y);
        }
    }

    // Literal transcription of the single-intruder endpoint law, kept
    // independent of the production code path it checks.
    fn single_law_reference(ring: &SiegeRing, team: &SiegeTeam, pos: Point2, v_i: f64) -> Vec<f64> {
        let ratio = team.v_r_max / v_i;
        let mut u = Vec::with_capacity(team.n());
        for arc in [ArcId::S1, ArcId::S2] {
            let coords = team.coords(arc);
            let m = coords.len();
            let l = ring.len(arc);
            let alpha = |s: f64| ring.arc(arc).arc_point(s).unwrap().dist(pos);
            let tie = TIE_TOL * l;
            for i in 0..m {
                let h_minus = if i == 0 {
                    coords[0] - alpha(0.0) * ratio
                } else {
                    0.5 * (coords[i] - coords[i - 1])
                        - alpha(0.5 * (coords[i] + coords[i - 1])) * ratio
                };
                let h_plus = if i + 1 == m {
                    (l - coords[i]) - alpha(l) * ratio
                } else {
                    0.5 * (coords[i + 1] - coords[i])
                        - alpha(0.5 * (coords[i] + coords[i + 1])) * ratio
                };
                let sign = if (h_minus - h_plus).abs() <= tie {
                    0.0
                } else if h_minus < h_plus {
                    1.0
                } else {
                    -1.0
                };
                let sign = if arc == ArcId::S2 { -sign } else { sign };
                u.push(sign * team.v_r_max);
            }
        }
        u
    }
}
