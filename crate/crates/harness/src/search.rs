//! Grid gait search over stable sweep cells.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

use crate::sweep::CellResult;
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Objective {
    /// Fastest walking first.
    Speed,
    /// Lowest total cost of transport first.
    Cot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedGait {
    pub rank: usize,
    pub frequency_hz: f64,
    pub amplitude_deg: f64,
    pub speed: f64,
    pub cot_total: Option<f64>,
}

/// Ranks the stable cells by `objective`; ties go to the lower frequency,
/// then the lower amplitude.
pub fn gait_search(cells: &[CellResult], objective: Objective) -> Result<Vec<RankedGait>, HarnessError> {
    let mut ranked: Vec<RankedGait> = cells
        .iter()
        .filter(|c| c.record.stable)
        .filter_map(|c| {
            let m = c.record.metrics.as_ref()?;
            if objective == Objective::Cot && m.cot_total.is_none() {
                return None;
            }
            Some(RankedGait {
                rank: 0,
                frequency_hz: c.cell.frequency_hz,
                amplitude_deg: c.cell.amplitude_deg,
                speed: m.mean_speed,
                cot_total: m.cot_total,
            })
        })
        .collect();
    if ranked.is_empty() {
        return Err(HarnessError::NoFeasibleGait);
    }
    ranked.sort_by(|a, b| {
        let primary = match objective {
            Objective::Speed => b.speed.total_cmp(&a.speed),
            Objective::Cot => a.cot_total.unwrap().total_cmp(&b.cot_total.unwrap()),
        };
        primary
            .then(a.frequency_hz.total_cmp(&b.frequency_hz))
            .then(a.amplitude_deg.total_cmp(&b.amplitude_deg))
    });
    for (i, r) in ranked.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(ranked)
}

/// Per-amplitude summary of where stable walking begins and where the
/// fastest stable cell sits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub amplitude_deg: f64,
    pub lowest_stable_hz: Option<f64>,
    pub fastest_hz: Option<f64>,
    /// No unstable cell lies between the lowest and highest stable frequency.
    pub stable_band_contiguous: bool,
    pub fastest_at_boundary: bool,
}

pub fn stability_boundary(cells: &[CellResult]) -> Vec<BoundaryReport> {
    let mut amplitudes: Vec<f64> = cells.iter().map(|c| c.cell.amplitude_deg).collect();
    amplitudes.sort_by(f64::total_cmp);
    amplitudes.dedup();
    amplitudes
        .into_iter()
        .map(|a| {
            let mut row: Vec<&CellResult> = cells.iter().filter(|c| c.cell.amplitude_deg == a).collect();
            row.sort_by(|x, y| x.cell.frequency_hz.total_cmp(&y.cell.frequency_hz));
            let lowest = row.iter().position(|c| c.record.stable);
            let fastest = row
                .iter()
                .filter(|c| c.record.stable)
                .max_by(|x, y| {
                    let (sx, sy) = (x.record.speed().unwrap_or(0.0), y.record.speed().unwrap_or(0.0));
                    sx.partial_cmp(&sy).unwrap_or(Ordering::Equal)
                })
                .map(|c| c.cell.frequency_hz);
            let lowest_stable_hz = lowest.map(|i| row[i].cell.frequency_hz);
            BoundaryReport {
                amplitude_deg: a,
                lowest_stable_hz,
                fastest_hz: fastest,
                stable_band_contiguous: lowest.is_some_and(|i| {
                    let last = row.iter().rposition(|c| c.record.stable).unwrap_or(i);
                    row[i..=last].iter().all(|c| c.record.stable)
                }),
                fastest_at_boundary: lowest_stable_hz.is_some() && fastest == lowest_stable_hz,
            }
        })
        .collect()
}
