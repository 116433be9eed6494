//! Energy accounting: switching-point computation counts against a
//! continuous-sampling baseline, plus the linear sensing-power model.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyParams {
    /// Robot cruise speed used for the baseline arithmetic, m/s.
    pub speed: f64,
    /// Continuous-sampling packet period, seconds.
    pub packet_period: f64,
    /// Sensing power model constants: `p_s(f_s) = c_s0 + c_s1 * f_s`.
    pub c_s0: f64,
    pub c_s1: f64,
    /// Externally claimed baseline sample count to cross-check, if any.
    pub reference_baseline: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyReport {
    pub switching_points: u64,
    pub path_length: f64,
    pub path_time: f64,
    /// Baseline samples from this tool's own arithmetic:
    /// `ceil(path_time / packet_period)`.
    pub baseline_samples: u64,
    /// The externally claimed figure, echoed for comparison.
    pub reference_baseline: Option<u64>,
    /// Set when the claimed figure disagrees with the computed one.
    pub reference_disagrees: bool,
    /// Computation reduction factor `baseline / switching_points`.
    pub reduction_factor: f64,
    /// Sensing power at the switching rate and at the baseline rate.
    pub power_switching: f64,
    pub power_baseline: f64,
}

/// Sensing power at sampling frequency `f_s`.
pub fn sensing_power(c_s0: f64, c_s1: f64, f_s: f64) -> f64 {
    c_s0 + c_s1 * f_s
}

/// Energy report for an executed path given by its switching points. Each
/// hop begins with one measure-decide computation, so a path of `k + 1`
/// points counts `k` switching computations.
pub fn energy_report(
    switching_points: &[crate::geometry::Point2],
    params: &EnergyParams,
) -> EnergyReport {
    let n = (switching_points.len() as u64).saturating_sub(1);
    let path_length: f64 = switching_points.windows(2).map(|w| w[0].dist(w[1])).sum();
    let path_time = if params.speed > 0.0 {
        path_length / params.speed
    } else {
        0.0
    };
    let baseline = if params.packet_period > 0.0 {
        (path_time / params.packet_period).ceil() as u64
    } else {
        0
    };
    let f_switch = if path_time > 0.0 {
        n as f64 / path_time
    } else {
        0.0
    };
    let f_base = if params.packet_period > 0.0 {
        1.0 / params.packet_period
    } else {
        0.0
    };
    EnergyReport {
        switching_points: n,
        path_length,
        path_time,
        baseline_samples: baseline,
        reference_baseline: params.reference_baseline,
        reference_disagrees: params
            .reference_baseline
            .map(|r| r != baseline)
            .unwrap_or(false),
        reduction_factor: if n > 0 {
            baseline as f64 / n as f64
        } else {
            0.0
        },
        power_switching: sensing_power(params.c_s0, params.c_s1, f_switch),
        power_baseline: sensing_power(params.c_s0, params.c_s1, f_base),
    }
}
