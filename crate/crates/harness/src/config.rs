//! Experiment configuration files.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use mugatu_core::analysis::{AnalysisConfig, PowerModel, WindowConfig, DEFAULT_CAP_HALF_ANGLE};
use mugatu_core::dynamics::{DEFAULT_DT, DEFAULT_SAMPLE_RATE, MAX_STEP};
use mugatu_core::gait::{BreakMode, GaitCommand, DEFAULT_START_DELAY};
use mugatu_core::model::WalkerParams;

use crate::HarnessError;

pub const DEFAULT_DURATION: f64 = 40.0;

/// Hip command in degrees, as written in configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaitSpec {
    pub frequency_hz: f64,
    /// Shorthand for equal left and right amplitudes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amp_left_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amp_right_deg: Option<f64>,
    #[serde(default)]
    pub break_mode: BreakMode,
    #[serde(default = "default_start_delay")]
    pub start_delay: f64,
}

fn default_start_delay() -> f64 {
    DEFAULT_START_DELAY
}

impl Default for GaitSpec {
    fn default() -> Self {
        Self {
            frequency_hz: 1.5,
            amplitude_deg: Some(42.0),
            amp_left_deg: None,
            amp_right_deg: None,
            break_mode: BreakMode::Midpoint,
            start_delay: DEFAULT_START_DELAY,
        }
    }
}

impl GaitSpec {
    pub fn amplitudes_deg(&self) -> Result<(f64, f64), HarnessError> {
        match (self.amplitude_deg, self.amp_left_deg, self.amp_right_deg) {
            (Some(a), None, None) => Ok((a, a)),
            (None, Some(l), Some(r)) => Ok((l, r)),
            _ => Err(HarnessError::field(
                "gait",
                "give either amplitude_deg or both amp_left_deg and amp_right_deg",
            )),
        }
    }

    pub fn command(&self) -> Result<GaitCommand, HarnessError> {
        let (l, r) = self.amplitudes_deg()?;
        let cmd = GaitCommand {
            amp_left: l.to_radians(),
            amp_right: r.to_radians(),
            frequency: self.frequency_hz,
            break_mode: self.break_mode,
            start_delay: self.start_delay,
        };
        cmd.validate().map_err(HarnessError::from_model)?;
        Ok(cmd)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSpec {
    pub frequencies_hz: Vec<f64>,
    pub amplitudes_deg: Vec<f64>,
    /// Left minus right amplitude.
    pub amplitude_differences_deg: Vec<f64>,
    pub base_amplitude_deg: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            frequencies_hz: vec![1.3, 1.4, 1.5, 1.6, 1.7],
            amplitudes_deg: vec![33.4, 37.8, 42.0],
            amplitude_differences_deg: vec![-8.8, -4.4, 0.0, 4.4, 8.8],
            base_amplitude_deg: 33.4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSpec {
    pub grace: f64,
    pub window: f64,
    pub baseline_power: f64,
    pub efficiency: f64,
    pub cap_half_angle_deg: f64,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        let w = WindowConfig::default();
        let p = PowerModel::default();
        Self {
            grace: w.grace,
            window: w.length,
            baseline_power: p.baseline_power,
            efficiency: p.efficiency,
            cap_half_angle_deg: DEFAULT_CAP_HALF_ANGLE.to_degrees(),
        }
    }
}

impl AnalysisSpec {
    pub fn to_config(&self) -> AnalysisConfig {
        AnalysisConfig {
            window: WindowConfig {
                grace: self.grace,
                length: self.window,
                ..WindowConfig::default()
            },
            power: PowerModel {
                baseline_power: self.baseline_power,
                efficiency: self.efficiency,
            },
            cap_half_angle: self.cap_half_angle_deg.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Walker description; relative paths resolve against the config file.
    pub walker: PathBuf,
    #[serde(default)]
    pub gait: GaitSpec,
    #[serde(default = "default_duration")]
    pub duration: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_sample_rate")]
    pub sample_rate: f64,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub analysis: AnalysisSpec,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
}

fn default_duration() -> f64 {
    DEFAULT_DURATION
}
fn default_dt() -> f64 {
    DEFAULT_DT
}
fn default_sample_rate() -> f64 {
    DEFAULT_SAMPLE_RATE
}
fn default_output() -> PathBuf {
    PathBuf::from("runs")
}
fn default_parallelism() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(walker: impl Into<PathBuf>) -> Self {
        Self {
            walker: walker.into(),
            gait: GaitSpec::default(),
            duration: DEFAULT_DURATION,
            dt: DEFAULT_DT,
            sample_rate: DEFAULT_SAMPLE_RATE,
            sweep: SweepSpec::default(),
            analysis: AnalysisSpec::default(),
            output_dir: default_output(),
            parallelism: 1,
        }
    }

    /// Parses a config file. Relative walker and output paths are made
    /// relative to the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config {
            file: path.display().to_string(),
            field: String::new(),
            reason: e.to_string(),
        })?;
        let mut cfg = Self::from_json_str(&text).map_err(|e| e.in_file(path))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.walker.is_relative() {
            cfg.walker = base.join(&cfg.walker);
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn from_json_str(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Config {
            file: String::new(),
            field: e.path().to_string(),
            reason: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks run settings. Sweep-specific requirements are checked by
    /// [`ExperimentConfig::validate_sweep`].
    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(HarnessError::field("duration", "must be positive"));
        }
        if !(self.dt > 0.0 && self.dt <= MAX_STEP) {
            return Err(HarnessError::field("dt", "must lie in (0, 1e-3] s"));
        }
        if !(self.sample_rate > 0.0 && self.sample_rate * self.dt <= 1.0 + 1e-9) {
            return Err(HarnessError::field("sample_rate", "must be positive and at most 1/dt"));
        }
        if self.parallelism == 0 {
            return Err(HarnessError::field("parallelism", "must be at least 1"));
        }
        let a = &self.analysis;
        if !(a.grace >= 0.0 && a.window > 0.0) {
            return Err(HarnessError::field("analysis", "grace must be >= 0 and window > 0"));
        }
        a.to_config().power.validate().map_err(HarnessError::from_model)?;
        Ok(())
    }

    pub fn validate_sweep(&self, axes: &[(&str, usize)]) -> Result<(), HarnessError> {
        for (name, len) in axes {
            if *len == 0 {
                return Err(HarnessError::field(&format!("sweep.{name}"), "must not be empty"));
            }
        }
        if self.duration < self.analysis.grace + self.analysis.window {
            return Err(HarnessError::field(
                "duration",
                "must cover the grace period plus the analysis window",
            ));
        }
        Ok(())
    }

    pub fn load_walker(&self) -> Result<WalkerParams, HarnessError> {
        WalkerParams::load(&self.walker).map_err(|e| HarnessError::Config {
            file: self.walker.display().to_string(),
            field: match &e {
                mugatu_core::model::ModelError::InvalidField { field, .. } => field.clone(),
                _ => String::new(),
            },
            reason: e.to_string(),
        })
    }

    /// Worker count, with `MUGATU_SIM_THREADS` taking precedence.
    pub fn effective_parallelism(&self) -> usize {
        std::env::var("MUGATU_SIM_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|n| *n > 0)
            .unwrap_or(self.parallelism)
    }
}
