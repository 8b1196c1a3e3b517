//! Reduction of telemetry to gait metrics.

mod peaks;
mod power;
mod steps;
mod window;

pub use peaks::{find_peaks, prominence};
pub use power::{calibrate_baseline, cost_of_transport, PowerModel};
pub use steps::{
    segment_samples, segment_steps, yaw_midline, yaw_rate, MidlinePoint, StepInterval,
    CROSSING_HYSTERESIS,
};
pub use window::{find_window, find_window_with, window_samples, AnalysisWindow, WindowConfig};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Sample, Telemetry};
use crate::model::WalkerParams;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("empty telemetry")]
    EmptyTelemetry,
    #[error("no steady region")]
    NoSteadyRegion,
    #[error("no oscillation")]
    NoOscillation,
    #[error("no progress")]
    NoProgress,
}

/// Minimum prominence of a roll extremum, rad.
pub const ROLL_PEAK_PROMINENCE: f64 = 0.008_726_646_259_971_648; // 0.5°
/// Default half-angle of the foot shell, rad.
pub const DEFAULT_CAP_HALF_ANGLE: f64 = 0.698_131_700_797_731_8; // 40°

/// Straight-line horizontal CG displacement between the first and last sample.
pub(crate) fn displacement(samples: &[Sample]) -> f64 {
    match (samples.first(), samples.last()) {
        (Some(a), Some(b)) => (b.cg_x - a.cg_x).hypot(b.cg_y - a.cg_y),
        _ => 0.0,
    }
}

pub fn forward_speed(telemetry: &Telemetry, window: &AnalysisWindow) -> f64 {
    let samples = window_samples(telemetry, window);
    match (samples.first(), samples.last()) {
        (Some(a), Some(b)) if b.t > a.t => displacement(samples) / (b.t - a.t),
        _ => 0.0,
    }
}

/// Mean and population standard deviation of |roll| at its extrema.
pub fn roll_amplitude(
    telemetry: &Telemetry,
    window: &AnalysisWindow,
) -> Result<(f64, f64), AnalysisError> {
    let samples = window_samples(telemetry, window);
    let spacing = telemetry
        .gait_frequency
        .filter(|f| *f > 0.0)
        .map_or(1, |f| ((telemetry.sample_rate / f) / 4.0).floor() as usize);
    let roll: Vec<f64> = samples.iter().map(|s| s.roll).collect();
    let neg: Vec<f64> = roll.iter().map(|r| -r).collect();
    let mut amps: Vec<f64> = find_peaks(&roll, ROLL_PEAK_PROMINENCE, spacing)
        .into_iter()
        .map(|i| roll[i].abs())
        .collect();
    amps.extend(
        find_peaks(&neg, ROLL_PEAK_PROMINENCE, spacing)
            .into_iter()
            .map(|i| roll[i].abs()),
    );
    if amps.len() < 2 {
        return Err(AnalysisError::NoOscillation);
    }
    let n = amps.len() as f64;
    let mean = amps.iter().sum::<f64>() / n;
    let var = amps.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// Longest run of steps whose leading leg alternates.
fn alternating_steps(steps: &[StepInterval]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (i, s) in steps.iter().enumerate() {
        run = if i > 0 && steps[i - 1].leading != s.leading && steps[i - 1].end == s.start {
            run + 1
        } else {
            1
        };
        best = best.max(run);
    }
    best
}

pub fn classify_stability(telemetry: &Telemetry, window: &AnalysisWindow) -> bool {
    classify_stability_with(telemetry, window, &WindowConfig::default())
}

pub fn classify_stability_with(
    telemetry: &Telemetry,
    window: &AnalysisWindow,
    config: &WindowConfig,
) -> bool {
    if telemetry
        .fall_time
        .is_some_and(|t| t <= window.nominal_end(config))
    {
        return false;
    }
    let steps = segment_steps(telemetry, window);
    alternating_steps(&steps) >= 4
        && displacement(window_samples(telemetry, window)) > telemetry.foot_radius
}

/// Settings for [`analyze`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisConfig {
    #[serde(flatten)]
    pub window: WindowConfig,
    pub power: PowerModel,
    /// rad
    pub cap_half_angle: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            window: WindowConfig::default(),
            power: PowerModel::default(),
            cap_half_angle: DEFAULT_CAP_HALF_ANGLE,
        }
    }
}

/// Per-trial metrics. Quantities that cannot be formed for a trial (no
/// oscillation, no progress) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitMetrics {
    pub window: AnalysisWindow,
    pub mean_speed: f64,
    pub roll_amp_mean: Option<f64>,
    pub roll_amp_std: Option<f64>,
    pub steps: usize,
    /// Longest run of contiguous steps with alternating leading leg.
    pub alternating_steps: usize,
    pub yaw_midline: Vec<MidlinePoint>,
    /// Trend of the yaw midline, rad/s.
    pub yaw_rate: Option<f64>,
    pub cot_total: Option<f64>,
    pub cot_mechanical: Option<f64>,
    pub stable: bool,
    pub cap_extent_flag: bool,
    pub fall_time: Option<f64>,
}

pub fn analyze(
    telemetry: &Telemetry,
    params: &WalkerParams,
    config: &AnalysisConfig,
) -> Result<GaitMetrics, AnalysisError> {
    let window = find_window_with(telemetry, &config.window)?;
    let steps = segment_steps(telemetry, &window);
    let midline = yaw_midline(telemetry, &steps);
    let roll = roll_amplitude(telemetry, &window).ok();
    let cot = cost_of_transport(telemetry, &window, &config.power, params).ok();
    Ok(GaitMetrics {
        window,
        mean_speed: forward_speed(telemetry, &window),
        roll_amp_mean: roll.map(|r| r.0),
        roll_amp_std: roll.map(|r| r.1),
        steps: steps.len(),
        alternating_steps: alternating_steps(&steps),
        yaw_rate: yaw_rate(&midline),
        yaw_midline: midline,
        cot_total: cot.map(|c| c.0),
        cot_mechanical: cot.map(|c| c.1),
        stable: classify_stability_with(telemetry, &window, &config.window),
        cap_extent_flag: telemetry
            .max_stance_tilt
            .iter()
            .any(|t| *t > config.cap_half_angle),
        fall_time: telemetry.fall_time,
    })
}
