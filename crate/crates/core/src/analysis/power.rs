use serde::{Deserialize, Serialize};

use super::window::{window_samples, AnalysisWindow};
use super::{displacement, AnalysisError};
use crate::dynamics::{Sample, Telemetry};
use crate::model::{ModelError, WalkerParams};
use crate::GRAVITY;

/// Electrical power drawn by the robot: a constant electronics baseline plus
/// the positive shaft power divided by the drive efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerModel {
    /// W
    pub baseline_power: f64,
    pub efficiency: f64,
}

impl Default for PowerModel {
    fn default() -> Self {
        Self {
            baseline_power: 2.0,
            efficiency: 0.5,
        }
    }
}

impl PowerModel {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.baseline_power >= 0.0 && self.baseline_power.is_finite()) {
            return Err(ModelError::InvalidField {
                field: "baseline_power".into(),
                reason: "must be finite and non-negative".into(),
            });
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(ModelError::InvalidField {
                field: "efficiency".into(),
                reason: "must lie in (0, 1]".into(),
            });
        }
        Ok(())
    }

    /// Positive shaft power; backdriving is not regenerated.
    pub fn mechanical_power(tau: f64, hip_rate: f64) -> f64 {
        (tau * hip_rate).max(0.0)
    }

    pub fn electrical_power(&self, tau: f64, hip_rate: f64) -> f64 {
        self.baseline_power + Self::mechanical_power(tau, hip_rate) / self.efficiency
    }
}

/// Trapezoidal integral of `f` over the samples.
fn integrate(samples: &[Sample], f: impl Fn(&Sample) -> f64) -> f64 {
    samples
        .windows(2)
        .map(|w| 0.5 * (f(&w[0]) + f(&w[1])) * (w[1].t - w[0].t))
        .sum()
}

/// Returns `(cot_total, cot_mechanical)` over the window.
pub fn cost_of_transport(
    telemetry: &Telemetry,
    window: &AnalysisWindow,
    power: &PowerModel,
    params: &WalkerParams,
) -> Result<(f64, f64), AnalysisError> {
    let samples = window_samples(telemetry, window);
    let d = displacement(samples);
    if !(d > 0.0) {
        return Err(AnalysisError::NoProgress);
    }
    let weight_distance = params.total_mass() * GRAVITY * d;
    let total = integrate(samples, |s| power.electrical_power(s.tau, s.hip_rate));
    let mechanical = integrate(samples, |s| PowerModel::mechanical_power(s.tau, s.hip_rate));
    Ok((total / weight_distance, mechanical / weight_distance))
}

/// Baseline power that would make this trial's total CoT equal `target`,
/// keeping the efficiency of `power`. Reported for calibration; never
/// applied implicitly.
pub fn calibrate_baseline(
    telemetry: &Telemetry,
    window: &AnalysisWindow,
    power: &PowerModel,
    params: &WalkerParams,
    target: f64,
) -> Result<f64, AnalysisError> {
    let samples = window_samples(telemetry, window);
    let d = displacement(samples);
    if !(d > 0.0) {
        return Err(AnalysisError::NoProgress);
    }
    let span = match (samples.first(), samples.last()) {
        (Some(a), Some(b)) if b.t > a.t => b.t - a.t,
        _ => return Err(AnalysisError::NoSteadyRegion),
    };
    let drive = integrate(samples, |s| PowerModel::mechanical_power(s.tau, s.hip_rate))
        / power.efficiency;
    Ok((target * params.total_mass() * GRAVITY * d - drive) / span)
}
