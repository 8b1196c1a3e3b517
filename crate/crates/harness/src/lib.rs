//! Trial orchestration for the mugatu walker: single trials, the speed and
//! turning sweeps, grid gait search and their on-disk artifacts.

pub mod config;
pub mod search;
pub mod sweep;
pub mod trial;

pub use config::{AnalysisSpec, ExperimentConfig, GaitSpec, SweepSpec};
pub use search::{gait_search, stability_boundary, BoundaryReport, Objective, RankedGait};
pub use sweep::{run_speed_sweep, run_turn_sweep, Cell, CellResult, Provenance, SweepKind, SweepResult};
pub use trial::{run_trial, TrialInput, TrialRecord};

use std::path::Path;

use mugatu_core::model::ModelError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{}", config_message(file, field, reason))]
    Config {
        file: String,
        field: String,
        reason: String,
    },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("simulation diverged in {label} at t = {time} s")]
    Diverged { label: String, time: f64 },
    #[error("no feasible gait: no stable cell in the grid")]
    NoFeasibleGait,
}

fn config_message(file: &str, field: &str, reason: &str) -> String {
    match (file.is_empty(), field.is_empty()) {
        (true, true) => reason.to_string(),
        (true, false) => format!("field `{field}`: {reason}"),
        (false, true) => format!("{file}: {reason}"),
        (false, false) => format!("{file}: field `{field}`: {reason}"),
    }
}

impl HarnessError {
    pub fn field(field: &str, reason: &str) -> Self {
        Self::Config {
            file: String::new(),
            field: field.to_string(),
            reason: reason.to_string(),
        }
    }

    pub fn from_model(e: ModelError) -> Self {
        match e {
            ModelError::InvalidField { field, reason } => Self::Config {
                file: String::new(),
                field,
                reason,
            },
            other => Self::Config {
                file: String::new(),
                field: String::new(),
                reason: other.to_string(),
            },
        }
    }

    pub(crate) fn io(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// Attaches a file name to a configuration error.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            Self::Config { field, reason, .. } => Self::Config {
                file: path.display().to_string(),
                field,
                reason,
            },
            other => other,
        }
    }

    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Io { .. } => 1,
            Self::Diverged { .. } => 2,
            Self::NoFeasibleGait => 3,
        }
    }
}
