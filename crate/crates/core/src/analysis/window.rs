use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::dynamics::{Sample, Telemetry};

/// Settings for locating the steady region of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowConfig {
    /// Settling time after the first leg swing, s.
    pub grace: f64,
    /// Nominal length of the analysed region, s.
    pub length: f64,
    /// |hip_cmd| above which the legs count as moving, rad.
    pub movement_threshold: f64,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            grace: 10.0,
            length: 15.0,
            movement_threshold: 0.5f64.to_radians(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisWindow {
    pub first_movement_time: f64,
    pub steady_start: f64,
    pub steady_end: f64,
}

impl AnalysisWindow {
    pub fn duration(&self) -> f64 {
        self.steady_end - self.steady_start
    }

    /// End of the region had the trial run its full course.
    pub fn nominal_end(&self, config: &WindowConfig) -> f64 {
        self.steady_start + config.length
    }
}

pub fn find_window(telemetry: &Telemetry) -> Result<AnalysisWindow, AnalysisError> {
    find_window_with(telemetry, &WindowConfig::default())
}

pub fn find_window_with(
    telemetry: &Telemetry,
    config: &WindowConfig,
) -> Result<AnalysisWindow, AnalysisError> {
    let last = telemetry.samples.last().ok_or(AnalysisError::EmptyTelemetry)?;
    let first_movement_time = telemetry
        .samples
        .iter()
        .find(|s| s.hip_cmd.abs() > config.movement_threshold)
        .map(|s| s.t)
        .ok_or(AnalysisError::NoSteadyRegion)?;
    let steady_start = first_movement_time + config.grace;
    let mut steady_end = (steady_start + config.length).min(last.t);
    if let Some(fall) = telemetry.fall_time {
        steady_end = steady_end.min(fall);
    }
    if steady_end <= steady_start {
        return Err(AnalysisError::NoSteadyRegion);
    }
    Ok(AnalysisWindow {
        first_movement_time,
        steady_start,
        steady_end,
    })
}

/// Samples with `steady_start <= t <= steady_end`.
pub fn window_samples<'a>(telemetry: &'a Telemetry, window: &AnalysisWindow) -> &'a [Sample] {
    let s = &telemetry.samples;
    let lo = s.partition_point(|x| x.t < window.steady_start);
    let hi = s.partition_point(|x| x.t <= window.steady_end);
    &s[lo..hi.max(lo)]
}
