//! Parameter sweeps over gait frequency and amplitude.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use mugatu_core::gait::GaitCommand;
use mugatu_core::model::WalkerParams;

use crate::config::ExperimentConfig;
use crate::trial::{run_trial, TrialRecord};
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Speed,
    Turn,
}

/// One grid point. Turn cells carry the left-minus-right difference,
/// added on top of the base amplitude of the larger-swinging leg.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub frequency_hz: f64,
    pub amplitude_deg: f64,
    pub difference_deg: Option<f64>,
}

impl Cell {
    pub fn amp_left_deg(&self) -> f64 {
        self.amplitude_deg + self.difference_deg.unwrap_or(0.0).max(0.0)
    }

    pub fn amp_right_deg(&self) -> f64 {
        self.amplitude_deg + (-self.difference_deg.unwrap_or(0.0)).max(0.0)
    }

    /// Directory name, `<freq>_<amp>` or `<freq>_<amp>_<diff>`.
    pub fn label(&self) -> String {
        let base = format!("{:.2}_{:.1}", self.frequency_hz, self.amplitude_deg);
        match self.difference_deg {
            None => base,
            Some(d) => format!("{base}_{:+.1}", d + 0.0),
        }
    }

    pub fn command(&self, template: &GaitCommand) -> GaitCommand {
        GaitCommand {
            amp_left: self.amp_left_deg().to_radians(),
            amp_right: self.amp_right_deg().to_radians(),
            frequency: self.frequency_hz,
            ..*template
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub cell: Cell,
    pub record: TrialRecord,
}

/// Contents of `provenance.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: SweepKind,
    pub config_sha256: String,
    pub walker_sha256: String,
    pub code_version: String,
    pub timestamp: String,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub output_dir: PathBuf,
    pub cells: Vec<CellResult>,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct SpeedRow {
    frequency_hz: f64,
    amplitude_deg: f64,
    stable: bool,
    speed: Option<f64>,
    roll_amp_mean: Option<f64>,
    roll_amp_std: Option<f64>,
    cot_total: Option<f64>,
}

#[derive(Serialize)]
struct TurnRow {
    frequency_hz: f64,
    amplitude_difference_deg: f64,
    amp_left_deg: f64,
    amp_right_deg: f64,
    stable: bool,
    speed: Option<f64>,
    yaw_rate: Option<f64>,
    roll_amp_mean: Option<f64>,
}

#[derive(Serialize)]
struct MidlineRow {
    frequency_hz: f64,
    amplitude_difference_deg: f64,
    step: usize,
    time: f64,
    yaw: f64,
}

pub fn speed_cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &a in &cfg.sweep.amplitudes_deg {
        for &f in &cfg.sweep.frequencies_hz {
            cells.push(Cell { frequency_hz: f, amplitude_deg: a, difference_deg: None });
        }
    }
    cells
}

pub fn turn_cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &f in &cfg.sweep.frequencies_hz {
        for &d in &cfg.sweep.amplitude_differences_deg {
            cells.push(Cell {
                frequency_hz: f,
                amplitude_deg: cfg.sweep.base_amplitude_deg,
                difference_deg: Some(d),
            });
        }
    }
    cells
}

/// Frequency × amplitude sweep with symmetric drive.
pub fn run_speed_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate_sweep(&[
        ("frequencies_hz", cfg.sweep.frequencies_hz.len()),
        ("amplitudes_deg", cfg.sweep.amplitudes_deg.len()),
    ])?;
    let result = run_cells(cfg, SweepKind::Speed, speed_cells(cfg))?;
    let rows = result.cells.iter().map(|c| {
        let m = c.record.metrics.as_ref();
        SpeedRow {
            frequency_hz: c.cell.frequency_hz,
            amplitude_deg: c.cell.amplitude_deg,
            stable: c.record.stable,
            speed: m.map(|m| m.mean_speed),
            roll_amp_mean: m.and_then(|m| m.roll_amp_mean).map(f64::to_degrees),
            roll_amp_std: m.and_then(|m| m.roll_amp_std).map(f64::to_degrees),
            cot_total: m.and_then(|m| m.cot_total),
        }
    });
    write_csv(&result.output_dir.join("aggregate.csv"), rows)?;
    Ok(result)
}

/// Frequency × amplitude-difference sweep around the base amplitude.
pub fn run_turn_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    cfg.validate_sweep(&[
        ("frequencies_hz", cfg.sweep.frequencies_hz.len()),
        ("amplitude_differences_deg", cfg.sweep.amplitude_differences_deg.len()),
    ])?;
    let result = run_cells(cfg, SweepKind::Turn, turn_cells(cfg))?;
    let rows = result.cells.iter().map(|c| {
        let m = c.record.metrics.as_ref();
        TurnRow {
            frequency_hz: c.cell.frequency_hz,
            amplitude_difference_deg: c.cell.difference_deg.unwrap_or(0.0),
            amp_left_deg: c.cell.amp_left_deg(),
            amp_right_deg: c.cell.amp_right_deg(),
            stable: c.record.stable,
            speed: m.map(|m| m.mean_speed),
            yaw_rate: m.and_then(|m| m.yaw_rate).map(f64::to_degrees),
            roll_amp_mean: m.and_then(|m| m.roll_amp_mean).map(f64::to_degrees),
        }
    });
    write_csv(&result.output_dir.join("aggregate.csv"), rows)?;
    let midlines = result.cells.iter().flat_map(|c| {
        let points = c.record.metrics.as_ref().map_or(&[][..], |m| &m.yaw_midline[..]);
        points.iter().map(move |p| MidlineRow {
            frequency_hz: c.cell.frequency_hz,
            amplitude_difference_deg: c.cell.difference_deg.unwrap_or(0.0),
            step: p.step,
            time: p.time,
            yaw: p.yaw.to_degrees(),
        })
    });
    write_csv(&result.output_dir.join("yaw_midlines.csv"), midlines)?;
    Ok(result)
}

fn run_cells(
    cfg: &ExperimentConfig,
    kind: SweepKind,
    cells: Vec<Cell>,
) -> Result<SweepResult, HarnessError> {
    let params = cfg.load_walker()?;
    let template = cfg.gait.command()?;
    let out = cfg.output_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| HarnessError::io(&out, e))?;

    let config_text = serde_json::to_string_pretty(cfg).map_err(|e| HarnessError::io(&out, e))? + "\n";
    let config_path = out.join("config.json");
    std::fs::write(&config_path, &config_text).map_err(|e| HarnessError::io(&config_path, e))?;
    let walker_text = std::fs::read(&cfg.walker).map_err(|e| HarnessError::io(&cfg.walker, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.effective_parallelism())
        .build()
        .map_err(|e| HarnessError::field("parallelism", &e.to_string()))?;
    let results: Vec<Result<CellResult, HarnessError>> = pool.install(|| {
        cells
            .par_iter()
            .map(|cell| run_cell(cfg, &params, &template, cell, &out))
            .collect()
    });
    let cells = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let provenance = Provenance {
        kind,
        config_sha256: sha256_hex(config_text.as_bytes()),
        walker_sha256: sha256_hex(&walker_text),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        cells: cells.len(),
    };
    let path = out.join("provenance.json");
    let text = serde_json::to_string_pretty(&provenance).map_err(|e| HarnessError::io(&path, e))?;
    std::fs::write(&path, text + "\n").map_err(|e| HarnessError::io(&path, e))?;

    Ok(SweepResult { kind, output_dir: out, cells, provenance })
}

fn run_cell(
    cfg: &ExperimentConfig,
    params: &WalkerParams,
    template: &GaitCommand,
    cell: &Cell,
    out: &Path,
) -> Result<CellResult, HarnessError> {
    let label = cell.label();
    let record = run_trial(cfg, params, &cell.command(template), &label, &out.join("cells").join(&label))?;
    Ok(CellResult { cell: *cell, record })
}

pub fn write_csv<T: Serialize>(
    path: &Path,
    rows: impl IntoIterator<Item = T>,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| HarnessError::io(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| HarnessError::io(path, e))?;
    }
    w.flush().map_err(|e| HarnessError::io(path, e))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
