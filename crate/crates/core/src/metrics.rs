//! Step-response metrics: time constant (63.2% crossing), 5% settling time,
//! and maximum overshoot, extracted from a logged trajectory with linear
//! interpolation between samples.

use crate::scalar::Real;
use crate::simulation::Trajectory;

/// Fraction of the commanded step that defines the time constant: `1 - 1/e`.
pub fn time_constant_fraction<T: Real>() -> T {
    T::one() - T::E().recip()
}

/// Settling band half-width as a fraction of the command.
pub const SETTLING_BAND_FRACTION: f64 = 0.05;

/// Step-response summary. Crossing-based metrics are `None` when the
/// trajectory never reaches the threshold inside the simulated window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMetrics<T> {
    /// Time to first reach 63.2% of the command (s).
    pub time_constant: Option<T>,
    /// First time after which the response stays inside +-5% of the command
    /// for the rest of the window (s).
    pub settling_time_5pct: Option<T>,
    /// Peak excursion above the command (rad), floored at zero.
    pub max_overshoot: T,
    /// Same 63.2% crossing as the time constant; kept under both names
    /// because both are used as requirement labels.
    pub rise_time: Option<T>,
    /// True when the run was truncated by the divergence guard.
    pub diverged: bool,
}

impl<T: Real> StepMetrics<T> {
    pub fn undefined(diverged: bool) -> Self {
        Self {
            time_constant: None,
            settling_time_5pct: None,
            max_overshoot: T::zero(),
            rise_time: None,
            diverged,
        }
    }
}

/// Interpolated time where the series first crosses `target` moving in the
/// direction of the command. Ties resolve to the earliest sample.
fn first_crossing<T: Real>(times: &[T], values: &[T], target: T, rising: bool) -> Option<T> {
    let reached = |v: T| {
        if rising {
            v >= target
        } else {
            v <= target
        }
    };
    if values.is_empty() {
        return None;
    }
    if reached(values[0]) {
        return Some(times[0]);
    }
    for i in 1..values.len() {
        if reached(values[i]) {
            let dv = values[i] - values[i - 1];
            if dv == T::zero() {
                return Some(times[i]);
            }
            let frac = (target - values[i - 1]) / dv;
            return Some(times[i - 1] + frac * (times[i] - times[i - 1]));
        }
    }
    None
}

/// Extract step metrics against a commanded pitch angle. A zero command has
/// no relative thresholds, so every crossing metric is undefined.
pub fn extract_metrics<T: Real>(traj: &Trajectory<T>, theta_command: T) -> StepMetrics<T> {
    if traj.records.is_empty() || theta_command == T::zero() {
        return StepMetrics::undefined(traj.diverged);
    }
    let times: Vec<T> = traj.records.iter().map(|r| r.t).collect();
    let theta: Vec<T> = traj.records.iter().map(|r| r.theta_true).collect();
    let rising = theta_command > T::zero();

    let tau = first_crossing(
        &times,
        &theta,
        time_constant_fraction::<T>() * theta_command,
        rising,
    );

    // overshoot: worst excursion past the command, in the command direction
    let overshoot = theta
        .iter()
        .map(|&v| if rising { v - theta_command } else { theta_command - v })
        .fold(T::zero(), |acc, x| acc.max(x));

    // settling: walk backward to the last sample outside the band, then
    // interpolate the re-entry between it and its successor
    let band = T::lit(SETTLING_BAND_FRACTION) * theta_command.abs();
    let inside = |v: T| (v - theta_command).abs() <= band;
    let settling = if !inside(*theta.last().expect("nonempty")) {
        None
    } else {
        match theta.iter().rposition(|&v| !inside(v)) {
            None => Some(T::zero()),
            Some(i) => {
                let edge = if theta[i] > theta_command {
                    theta_command + band
                } else {
                    theta_command - band
                };
                let dv = theta[i + 1] - theta[i];
                let frac = if dv == T::zero() {
                    T::one()
                } else {
                    (edge - theta[i]) / dv
                };
                Some(times[i] + frac * (times[i + 1] - times[i]))
            }
        }
    };

    StepMetrics {
        time_constant: tau,
        settling_time_5pct: settling,
        max_overshoot: overshoot,
        rise_time: tau,
        diverged: traj.diverged,
    }
}
