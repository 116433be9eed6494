//! Unified k-interceptor boundary-defense law, with the single-interceptor
//! law as the special case k = 1.
//!
//! A team of robots moves along a boundary segment S (arc coordinates
//! `0 <= c_1 <= ... <= c_n <= L`) to meet an intruder wherever it crosses.
//! Each robot compares the worst-case "danger" of the sub-segments it is
//! responsible for and moves at full speed toward the worse one. Feasibility
//! of interception is decided by the supremum of the danger kernel at first
//! visibility.

use crate::error::LawError;
use crate::geometry::{chord_length, ParamCurve, Point2};
use serde::{Deserialize, Serialize};

/// Relative tolerance used to call two danger values a tie.
pub const TIE_TOL: f64 = 1e-9;

/// Samples per segment for the numeric supremum before refinement.
pub const SUP_SAMPLES: usize = 512;

/// Ordered robot arc coordinates on a boundary segment with a shared speed
/// cap, the interception multiplicity k and the intercept radius epsilon.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryTeam {
    pub curve: ParamCurve,
    /// Arc coordinates, ascending. Order never changes during a run.
    pub coords: Vec<f64>,
    pub v_r_max: f64,
    pub k: usize,
    pub epsilon: f64,
}

impl BoundaryTeam {
    pub fn new(
        curve: ParamCurve,
        coords: Vec<f64>,
        v_r_max: f64,
        k: usize,
        epsilon: f64,
    ) -> Result<BoundaryTeam, LawError> {
        let n = coords.len();
        // k = 1 is the single-interceptor law and works for any team size;
        // k >= 2 requires enough robots on both flanks.
        if k == 0 || n == 0 || (k >= 2 && 2 * k > n) {
            return Err(LawError::BadK { k, n });
        }
        if coords.windows(2).any(|w| w[0] > w[1]) {
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
        Ok(BoundaryTeam {
            curve,
            coords,
            v_r_max,
            k,
            epsilon,
        })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn length(&self) -> f64 {
        self.curve.total_length()
    }
}

/// Point intruder with a speed cap; visible to the team from `visible_since`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IntruderState {
    pub pos: Point2,
    pub v_i_max: f64,
    pub visible_since: f64,
}

/// Signed danger values for the two sides of a robot's responsibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DangerPair {
    pub m_minus: f64,
    pub m_plus: f64,
}

/// Closed arc interval `[lo, hi]` in curvilinear coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcInterval {
    pub lo: f64,
    pub hi: f64,
}

impl ArcInterval {
    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

/// Responsibility of one robot: interior robots own two sub-segments, edge
/// robots (i < k or i > n-k+1, one-based) are driven by the fixed edge rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Responsibility {
    Segments {
        minus: ArcInterval,
        plus: ArcInterval,
    },
    /// Index below k: always pushes toward the far endpoint.
    LowerEdge,
    /// Index above n-k+1: always pushes toward the start.
    UpperEdge,
}

/// k-th smallest arc distance from the team to the point `p` on the curve.
pub fn kth_arc_distance(team: &BoundaryTeam, p: Point2) -> Result<f64, LawError> {
    if team.k > team.n() {
        return Err(LawError::BadK {
            k: team.k,
            n: team.n(),
        });
    }
    let s = team.curve.arc_coord(p)?;
    Ok(kth_arc_distance_at(team, s))
}

/// Same as [`kth_arc_distance`] for a point given by its arc coordinate.
pub fn kth_arc_distance_at(team: &BoundaryTeam, s: f64) -> f64 {
    let mut d: Vec<f64> = team.coords.iter().map(|c| (c - s).abs()).collect();
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d[team.k - 1]
}

/// Responsibility sub-segments of robot `i` (zero-based index).
///
/// Interior robots `k <= i+1 <= n-k+1` get the midpoint construction; the
/// reduction at k = 1 is the plain Voronoi split of the segment.
pub fn responsibility_segments(team: &BoundaryTeam, i: usize) -> Result<Responsibility, LawError> {
    let n = team.n();
    let k = team.k;
    if i >= n {
        return Err(LawError::BadRobotIndex { index: i, n });
    }
    let idx = i + 1; // one-based
    if idx < k {
        return Ok(Responsibility::LowerEdge);
    }
    if idx > n - k + 1 {
        return Ok(Responsibility::UpperEdge);
    }
    let c = &team.coords;
    let l = team.length();
    let minus = if idx == k {
        ArcInterval {
            lo: 0.0,
            hi: 0.5 * (c[i] + c[idx - k]),
        } // c_{i-k+1}, zero-based idx-k
    } else {
        ArcInterval {
            lo: 0.5 * (c[i] + c[idx - k - 1]),
            hi: 0.5 * (c[i] + c[idx - k]),
        }
    };
    let plus = if idx == n - k + 1 {
        ArcInterval {
            lo: 0.5 * (c[i] + c[idx + k - 2]),
            hi: l,
        }
    } else {
        ArcInterval {
            lo: 0.5 * (c[i] + c[idx + k - 2]),
            hi: 0.5 * (c[i] + c[idx + k - 1]),
        }
    };
    Ok(Responsibility::Segments { minus, plus })
}

/// Danger kernel at arc coordinate `s`: k-th robot reach minus the intruder
/// reach scaled by the speed ratio.
fn kernel(team: &BoundaryTeam, intruder: &IntruderState, s: f64) -> f64 {
    let p = team.curve.arc_point(s).expect("s within curve");
    let alpha = chord_length(intruder.pos, p);
    kth_arc_distance_at(team, s) - alpha * team.v_r_max / intruder.v_i_max
}

/// Numeric supremum of the danger kernel over an arc interval: dense sampling
/// with golden-section refinement around the best bracket.
///
/// Empty intervals yield negative infinity.
pub fn danger_sup(team: &BoundaryTeam, intruder: &IntruderState, seg: ArcInterval) -> f64 {
    sup_on_interval(seg, |s| kernel(team, intruder, s), team.length())
}

pub(crate) fn sup_on_interval<F: Fn(f64) -> f64>(seg: ArcInterval, f: F, scale: f64) -> f64 {
    if seg.is_empty() {
        return f64::NEG_INFINITY;
    }
    if seg.hi == seg.lo {
        return f(seg.lo);
    }
    let n = SUP_SAMPLES;
    let mut best = (f(seg.lo), 0usize);
    for i in 1..=n {
        let s = seg.lo + (seg.hi - seg.lo) * (i as f64) / (n as f64);
        let v = f(s);
        if v > best.0 {
            best = (v, i);
        }
    }
    // Golden-section refinement in the bracket around the best sample.
    let h = (seg.hi - seg.lo) / n as f64;
    let mut a = seg.lo + h * best.1.saturating_sub(1) as f64;
    let mut b = (seg.lo + h * (best.1 + 1) as f64).min(seg.hi);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let tol = 1e-6 * scale.max(1e-12);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    best.0.max(f1).max(f2)
}

/// Argmax companion of [`sup_on_interval`]: ties within tolerance break to
/// the smaller arc coordinate.
fn argmax_on_interval<F: Fn(f64) -> f64>(seg: ArcInterval, f: F, scale: f64) -> (f64, f64) {
    let n = 4 * SUP_SAMPLES;
    let mut best_v = f64::NEG_INFINITY;
    let mut best_s = seg.lo;
    let tie = TIE_TOL * scale.max(1.0);
    for i in 0..=n {
        let s = seg.lo + (seg.hi - seg.lo) * (i as f64) / (n as f64);
        let v = f(s);
        if v > best_v + tie {
            best_v = v;
            best_s = s;
        }
    }
    // One golden pass around the winner sharpens the location.
    let h = (seg.hi - seg.lo) / n as f64;
    let a = (best_s - h).max(seg.lo);
    let b = (best_s + h).min(seg.hi);
    let phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    while b - a > 1e-9 * scale.max(1e-12) {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if f(x1) < f(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    let s = 0.5 * (a + b);
    let v = f(s);
    if v >= best_v {
        (s, v)
    } else {
        (best_s, best_v)
    }
}

/// Endpoint ("fast") danger values for an interior robot, valid whenever the
/// intruder is at least as fast as the robots: the supremum over each
/// sub-segment is attained at its outer endpoint.
pub fn endpoint_danger(
    team: &BoundaryTeam,
    intruder: &IntruderState,
    i: usize,
) -> Result<DangerPair, LawError> {
    let n = team.n();
    let k = team.k;
    let idx = i + 1;
    if idx < k || idx > n - k + 1 {
        return Err(LawError::BadRobotIndex { index: i, n });
    }
    let c = &team.coords;
    let l = team.length();
    let ratio = team.v_r_max / intruder.v_i_max;
    let alpha_at = |s: f64| -> f64 {
        let p = team.curve.arc_point(s.clamp(0.0, l)).expect("in range");
        chord_length(intruder.pos, p)
    };
    let m_minus = if idx == k {
        c[i] - alpha_at(0.0) * ratio
    } else {
        0.5 * (c[i] - c[idx - k - 1]) - alpha_at(0.5 * (c[i] + c[idx - k - 1])) * ratio
    };
    let m_plus = if idx == n - k + 1 {
        (l - c[i]) - alpha_at(l) * ratio
    } else {
        0.5 * (c[idx + k - 1] - c[i]) - alpha_at(0.5 * (c[i] + c[idx + k - 1])) * ratio
    };
    Ok(DangerPair { m_minus, m_plus })
}

/// The finite set of endpoint danger values whose maximum decides
/// feasibility under the fast-intruder assumption.
pub fn endpoint_danger_set(team: &BoundaryTeam, intruder: &IntruderState) -> Vec<f64> {
    let n = team.n();
    let k = team.k;
    let mut h = Vec::with_capacity(2 * n);
    for idx in k..=(n - k + 1) {
        if let Ok(pair) = endpoint_danger(team, intruder, idx - 1) {
            h.push(pair.m_minus);
            h.push(pair.m_plus);
        }
    }
    h
}

/// Per-robot danger pair: endpoint formula when the intruder is at least as
/// fast as the robots, sampled supremum otherwise.
pub fn danger_pair(
    team: &BoundaryTeam,
    intruder: &IntruderState,
    i: usize,
) -> Result<DangerPair, LawError> {
    match responsibility_segments(team, i)? {
        Responsibility::Segments { minus, plus } => {
            if intruder.v_i_max >= team.v_r_max {
                endpoint_danger(team, intruder, i)
            } else {
                Ok(DangerPair {
                    m_minus: danger_sup(team, intruder, minus),
                    m_plus: danger_sup(team, intruder, plus),
                })
            }
        }
        Responsibility::LowerEdge | Responsibility::UpperEdge => Err(LawError::BadRobotIndex {
            index: i,
            n: team.n(),
        }),
    }
}

/// Bang/zero decentralized control: every robot outputs one of
/// `{-v_r_max, 0, +v_r_max}`.
///
/// Interior robots move toward the more dangerous of their two
/// sub-segments, and hold when the two dangers tie within tolerance. Edge
/// robots shadow the decision of the interior robot whose block they
/// complete (the flanking members of a k-interception must travel with it;
/// a constant inward push would deadlock against the block at the midpoint
/// clamp and leave the segment ends undefendable).
pub fn control_law(team: &BoundaryTeam, intruder: &IntruderState) -> Result<Vec<f64>, LawError> {
    let n = team.n();
    let k = team.k;
    let mut u = vec![0.0; n];
    let tie = TIE_TOL * team.length();
    let decide = |i: usize| -> Result<f64, LawError> {
        let pair = danger_pair(team, intruder, i)?;
        Ok(if (pair.m_minus - pair.m_plus).abs() <= tie {
            0.0
        } else if pair.m_minus < pair.m_plus {
            team.v_r_max
        } else {
            -team.v_r_max
        })
    };
    for (i, u_i) in u.iter_mut().enumerate() {
        *u_i = match responsibility_segments(team, i)? {
            Responsibility::LowerEdge => decide(k - 1)?,
            Responsibility::UpperEdge => decide(n - k)?,
            Responsibility::Segments { .. } => decide(i)?,
        };
    }
    Ok(u)
}

/// Feasibility verdict at first visibility: `margin <= epsilon` guarantees
/// an intercepting strategy exists; the margin is the supremum of the danger
/// kernel over the whole segment.
pub fn feasibility(team: &BoundaryTeam, intruder: &IntruderState) -> (bool, f64) {
    let margin = if intruder.v_i_max >= team.v_r_max {
        endpoint_danger_set(team, intruder)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    } else {
        lyapunov_w(team, intruder)
    };
    (margin <= team.epsilon, margin)
}

/// Sampled supremum of the danger kernel over the full segment. At first
/// visibility this equals the feasibility margin; along a run it is the
/// Lyapunov-style certificate the guarantee proof tracks.
pub fn lyapunov_w(team: &BoundaryTeam, intruder: &IntruderState) -> f64 {
    danger_sup(
        team,
        intruder,
        ArcInterval {
            lo: 0.0,
            hi: team.length(),
        },
    )
}

/// Did at least k robots sit within arc distance epsilon of the crossing?
pub fn intercept_check(
    team: &BoundaryTeam,
    crossing: Point2,
) -> Result<(bool, Vec<usize>), LawError> {
    let s = team.curve.arc_coord(crossing)?;
    Ok(intercept_check_at(team, s))
}

/// Intercept test for a crossing given by its arc coordinate.
pub fn intercept_check_at(team: &BoundaryTeam, s: f64) -> (bool, Vec<usize>) {
    let witnesses: Vec<usize> = team
        .coords
        .iter()
        .enumerate()
        .filter(|(_, c)| (*c - s).abs() <= team.epsilon)
        .map(|(i, _)| i)
        .collect();
    (witnesses.len() >= team.k, witnesses)
}

/// Boundary point the worst-case adversary heads for: the argmax of the
/// danger kernel, ties broken toward the smaller arc coordinate.
pub fn worst_case_intruder_target(team: &BoundaryTeam, intruder: &IntruderState) -> Point2 {
    let (s, _) = argmax_on_interval(
        ArcInterval {
            lo: 0.0,
            hi: team.length(),
        },
        |s| kernel(team, intruder, s),
        team.length(),
    );
    team.curve.arc_point(s).expect("argmax in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ParamCurve;

    fn straight_team(coords: Vec<f64>, l: f64, k: usize, eps: f64) -> BoundaryTeam {
        let curve = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(l, 0.0)).unwrap();
        BoundaryTeam::new(curve, coords, 3.0, k, eps).unwrap()
    }

    fn intruder_at(x: f64, y: f64) -> IntruderState {
        IntruderState {
            pos: Point2::new(x, y),
            v_i_max: 4.2,
            visible_since: 0.0,
        }
    }

    #[test]
    fn kth_distance_robot_on_point() {
        let team = straight_team(vec![1.0, 2.0, 3.0], 10.0, 1, 0.5);
        let d = kth_arc_distance(&team, Point2::new(2.0, 0.0)).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn kth_distance_second_smallest() {
        // distances from s=0 are 0, 5, 10; with k=2 the answer is 5
        let mut t = straight_team(vec![0.0, 5.0, 10.0], 10.0, 1, 0.5);
        t.k = 2; // distance query alone, outside the team k bound
        assert_eq!(kth_arc_distance_at(&t, 0.0), 5.0);
    }

    #[test]
    fn kth_distance_sorted_pick() {
        // distances from s=5 are {4, 1, 1, 4}; 2nd smallest is 1
        let mut t = straight_team(vec![1.0, 4.0, 6.0, 9.0], 10.0, 1, 0.5);
        t.k = 2;
        assert_eq!(kth_arc_distance_at(&t, 5.0), 1.0);
    }

    #[test]
    fn segments_k1_tile_the_segment() {
        let team = straight_team(vec![2.0, 8.0], 10.0, 1, 0.5);
        match responsibility_segments(&team, 0).unwrap() {
            Responsibility::Segments { minus, plus } => {
                assert_eq!((minus.lo, minus.hi), (0.0, 2.0));
                assert_eq!((plus.lo, plus.hi), (2.0, 5.0));
            }
            _ => panic!("interior robot expected"),
        }
        match responsibility_segments(&team, 1).unwrap() {
            Responsibility::Segments { minus, plus } => {
                assert_eq!((minus.lo, minus.hi), (5.0, 8.0));
                assert_eq!((plus.lo, plus.hi), (8.0, 10.0));
            }
            _ => panic!("interior robot expected"),
        }
    }

    #[test]
    fn segments_k2_midpoint_construction() {
        // Direct substitution for n=4, k=2, c=[1,3,7,9], i=2 (one-based):
        // minus = [P1, (3+1)/2], plus = [(3+7)/2, (3+9)/2].
        let team = straight_team(vec![1.0, 3.0, 7.0, 9.0], 10.0, 2, 0.5);
        match responsibility_segments(&team, 1).unwrap() {
            Responsibility::Segments { minus, plus } => {
                assert_eq!((minus.lo, minus.hi), (0.0, 2.0));
                assert_eq!((plus.lo, plus.hi), (5.0, 6.0));
            }
            _ => panic!("interior robot expected"),
        }
    }

    #[test]
    fn edge_robot_markers() {
        let team = straight_team(vec![1.0, 3.0, 5.0, 7.0, 9.0], 10.0, 2, 0.5);
        assert_eq!(
            responsibility_segments(&team, 0).unwrap(),
            Responsibility::LowerEdge
        );
        assert_eq!(
            responsibility_segments(&team, 4).unwrap(),
            Responsibility::UpperEdge
        );
    }

    #[test]
    fn danger_zero_when_everything_coincides() {
        let team = straight_team(vec![5.0], 10.0, 1, 0.5);
        let intr = IntruderState {
            pos: Point2::new(5.0, 0.0),
            v_i_max: 4.2,
            visible_since: 0.0,
        };
        let v = danger_sup(&team, &intr, ArcInterval { lo: 5.0, hi: 5.0 });
        assert!(v.abs() < 1e-9);
    }

    #[test]
    fn danger_sup_endpoint_oracle_equal_speeds() {
        // One robot at 0, intruder on the far end of a straight [0, 10]
        // boundary at equal speeds: kernel(s) = s - (10 - s), maximized at
        // s = 10 with value 10.
        let curve = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(10.0, 0.0)).unwrap();
        let team = BoundaryTeam::new(curve, vec![0.0], 3.0, 1, 0.5).unwrap();
        let intr = IntruderState {
            pos: Point2::new(10.0, 0.0),
            v_i_max: 3.0,
            visible_since: 0.0,
        };
        let sup = danger_sup(&team, &intr, ArcInterval { lo: 0.0, hi: 10.0 });
        // Brute-force oracle over 1e5 samples.
        let mut oracle = f64::NEG_INFINITY;
        for i in 0..=100_000 {
            let s = 10.0 * i as f64 / 100_000.0;
            oracle = oracle.max(s - (10.0 - s));
        }
        assert!((sup - oracle).abs() < 1e-6, "sup {sup} oracle {oracle}");
        assert!((sup - 10.0).abs() < 1e-6);
    }

    #[test]
    fn danger_far_intruder_is_very_negative() {
        let team = straight_team(vec![5.0], 10.0, 1, 0.5);
        let intr = IntruderState {
            pos: Point2::new(5.0, 1e6),
            v_i_max: 4.2,
            visible_since: 0.0,
        };
        let v = danger_sup(&team, &intr, ArcInterval { lo: 0.0, hi: 10.0 });
        assert!(v < -1e5);
    }

    #[test]
    fn danger_empty_segment_sentinel() {
        let team = straight_team(vec![5.0], 10.0, 1, 0.5);
        let intr = intruder_at(5.0, 1.0);
        let v = danger_sup(&team, &intr, ArcInterval { lo: 3.0, hi: 2.0 });
        assert_eq!(v, f64::NEG_INFINITY);
    }

    #[test]
    fn control_symmetric_middle_robot_holds() {
        let team = straight_team(vec![2.0, 5.0, 8.0], 10.0, 1, 0.5);
        let intr = intruder_at(5.0, 3.0);
        let u = control_law(&team, &intr).unwrap();
        assert_eq!(u[1], 0.0, "mirror-symmetric dangers must tie");
    }

    #[test]
    fn control_threatened_end_attracts_robot() {
        // Five robots, speeds from the straight-boundary scenario; intruder
        // near the start pulls robot 1 toward it.
        let team = straight_team(vec![1.0, 3.0, 5.0, 7.0, 9.0], 10.0, 1, 0.5);
        let intr = intruder_at(0.0, 1.0);
        let u = control_law(&team, &intr).unwrap();
        assert_eq!(u[0], -team.v_r_max, "robot 1 heads for the start");
    }

    #[test]
    fn control_k2_converges_two_robots() {
        let team = straight_team(vec![1.0, 3.0, 5.0, 7.0, 9.0], 10.0, 2, 0.5);
        let intr = intruder_at(0.0, 1.0);
        let u = control_law(&team, &intr).unwrap();
        // The interior robot nearest the threat heads for the start, and
        // its flanking edge robot travels with it so the pair can intercept
        // together.
        assert_eq!(
            u[1], -team.v_r_max,
            "robot 2 heads for the threatened start"
        );
        assert_eq!(u[0], u[1], "edge robot shadows its block");
        assert_eq!(u[4], u[3], "upper edge shadows its block");
    }

    #[test]
    fn feasibility_dense_team() {
        let coords: Vec<f64> = (0..21).map(|i| i as f64 * 0.5).collect();
        let team = straight_team(coords, 10.0, 1, 0.5);
        let intr = intruder_at(5.0, 2.0);
        let (ok, margin) = feasibility(&team, &intr);
        assert!(ok, "margin {margin}");
    }

    #[test]
    fn feasibility_sparse_team_fails() {
        let curve = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(1000.0, 0.0)).unwrap();
        let team = BoundaryTeam::new(curve, vec![0.0], 3.0, 1, 0.5).unwrap();
        let intr = IntruderState {
            pos: Point2::new(1000.0, 0.1),
            v_i_max: 4.2,
            visible_since: 0.0,
        };
        let (ok, margin) = feasibility(&team, &intr);
        assert!(!ok);
        assert!(margin > 900.0);
    }

    #[test]
    fn endpoint_set_matches_sampled_sup() {
        let team = straight_team(vec![1.0, 3.0, 5.0, 7.0, 9.0], 10.0, 1, 0.5);
        let intr = intruder_at(4.0, 2.5);
        let fast = endpoint_danger_set(&team, &intr)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let sampled = lyapunov_w(&team, &intr);
        assert!(
            (fast - sampled).abs() < 1e-3 * team.length(),
            "fast {fast} sampled {sampled}"
        );
    }

    #[test]
    fn intercept_exact_hit() {
        let team = straight_team(vec![4.0], 10.0, 1, 0.5);
        let (ok, w) = intercept_check(&team, Point2::new(4.0, 0.0)).unwrap();
        assert!(ok);
        assert_eq!(w, vec![0]);
    }

    #[test]
    fn intercept_just_outside_epsilon() {
        let team = straight_team(vec![4.0], 10.0, 1, 0.5);
        let (ok, w) = intercept_check(&team, Point2::new(4.51, 0.0)).unwrap();
        assert!(!ok);
        assert!(w.is_empty());
    }

    #[test]
    fn intercept_k2_two_witnesses() {
        let mut team = straight_team(vec![4.85, 5.4], 10.0, 1, 0.5);
        team.k = 2;
        // robots at arc distances 0.15 and 0.4 from the crossing
        let (ok, w) = intercept_check(&team, Point2::new(5.0, 0.0)).unwrap();
        assert!(ok);
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn worst_case_target_tie_breaks_low() {
        // Two symmetric gaps around a central robot; the argmax ties and the
        // tie rule picks the smaller coordinate.
        let team = straight_team(vec![5.0], 10.0, 1, 0.5);
        let intr = intruder_at(5.0, 4.0);
        let p = worst_case_intruder_target(&team, &intr);
        let s = team.curve.arc_coord(p).unwrap();
        assert!(s < 5.0, "tie must break toward the start, got {s}");
        assert!(s < 0.5, "kernel peaks at the ends, got {s}");
    }

    #[test]
    fn lyapunov_matches_feasibility_margin_at_t0() {
        let team = straight_team(vec![2.0, 8.0], 10.0, 1, 0.5);
        let intr = intruder_at(5.0, 2.0);
        let w = lyapunov_w(&team, &intr);
        let (_, margin) = feasibility(&team, &intr);
        assert!((w - margin).abs() < 1e-3 * team.length());
    }

    #[test]
    fn lyapunov_can_go_negative() {
        // Robot sits on the projected crossing point, intruder far away.
        let curve = ParamCurve::line(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)).unwrap();
        let team = BoundaryTeam::new(curve, vec![0.5], 3.0, 1, 0.2).unwrap();
        let intr = IntruderState {
            pos: Point2::new(0.5, 50.0),
            v_i_max: 4.2,
            visible_since: 0.0,
        };
        assert!(lyapunov_w(&team, &intr) < 0.0);
    }
}
