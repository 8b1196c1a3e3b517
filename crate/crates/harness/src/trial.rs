use serde::{Deserialize, Serialize};
use std::path::Path;

use mugatu_core::analysis::{analyze, AnalysisConfig, GaitMetrics};
use mugatu_core::dynamics::{simulate_from, DynamicsError, SimOptions, Telemetry, WalkerState};
use mugatu_core::gait::{BreakMode, GaitCommand};
use mugatu_core::model::WalkerParams;

use crate::config::ExperimentConfig;
use crate::HarnessError;

/// Settings of one trial, echoed into its metrics file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialInput {
    pub label: String,
    pub walker: String,
    pub frequency_hz: f64,
    pub amp_left_deg: f64,
    pub amp_right_deg: f64,
    pub break_mode: BreakMode,
    pub start_delay: f64,
    pub duration: f64,
    pub dt: f64,
    pub sample_rate: f64,
}

/// Contents of `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub input: TrialInput,
    pub stable: bool,
    /// Why no metrics could be formed, if so.
    pub failure: Option<String>,
    /// Time of numerical divergence, if any.
    pub diverged_at: Option<f64>,
    pub metrics: Option<GaitMetrics>,
}

impl TrialRecord {
    pub fn speed(&self) -> Option<f64> {
        self.metrics.as_ref().map(|m| m.mean_speed)
    }

    pub fn cot_total(&self) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.cot_total)
    }

    pub fn yaw_rate(&self) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.yaw_rate)
    }
}

pub(crate) fn simulate_trial(
    cfg: &ExperimentConfig,
    params: &WalkerParams,
    cmd: &GaitCommand,
    analysis: &AnalysisConfig,
) -> Result<Telemetry, DynamicsError> {
    let opts = SimOptions {
        duration: cfg.duration,
        dt: cfg.dt,
        sample_rate: cfg.sample_rate,
        power: analysis.power,
        stop_on_fall: true,
    };
    let mut tel = simulate_from(params, cmd, WalkerState::standing(params), &opts)?;
    tel.gait_frequency = Some(cmd.frequency);
    Ok(tel)
}

/// Simulates, analyses and writes `telemetry.csv` and `metrics.json` into
/// `dir`. Trial-level failures (divergence, no steady region) are recorded
/// in the returned record; only configuration and I/O problems are errors.
pub fn run_trial(
    cfg: &ExperimentConfig,
    params: &WalkerParams,
    cmd: &GaitCommand,
    label: &str,
    dir: &Path,
) -> Result<TrialRecord, HarnessError> {
    cmd.validate().map_err(HarnessError::from_model)?;
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let analysis = cfg.analysis.to_config();
    let input = TrialInput {
        label: label.to_string(),
        walker: cfg.walker.display().to_string(),
        frequency_hz: cmd.frequency,
        amp_left_deg: cmd.amp_left.to_degrees(),
        amp_right_deg: cmd.amp_right.to_degrees(),
        break_mode: cmd.break_mode,
        start_delay: cmd.start_delay,
        duration: cfg.duration,
        dt: cfg.dt,
        sample_rate: cfg.sample_rate,
    };
    let record = match simulate_trial(cfg, params, cmd, &analysis) {
        Ok(tel) => {
            let path = dir.join("telemetry.csv");
            tel.save_csv(&path).map_err(|e| HarnessError::io(&path, e))?;
            match analyze(&tel, params, &analysis) {
                Ok(m) => TrialRecord {
                    input,
                    stable: m.stable,
                    failure: None,
                    diverged_at: None,
                    metrics: Some(m),
                },
                Err(e) => TrialRecord {
                    input,
                    stable: false,
                    failure: Some(e.to_string()),
                    diverged_at: None,
                    metrics: None,
                },
            }
        }
        Err(DynamicsError::Diverged { time, .. }) => TrialRecord {
            input,
            stable: false,
            failure: Some(format!("simulation diverged at t = {time} s")),
            diverged_at: Some(time),
            metrics: None,
        },
        Err(e) => return Err(HarnessError::field("simulation", &e.to_string())),
    };
    let path = dir.join("metrics.json");
    let text = serde_json::to_string_pretty(&record).map_err(|e| HarnessError::io(&path, e))?;
    std::fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))?;
    Ok(record)
}
