use serde::{Deserialize, Serialize};

use super::window::{window_samples, AnalysisWindow};
use crate::dynamics::{Foot, Sample, Telemetry};

/// Interval between two consecutive hip zero crossings. `leading` is the
/// leg that is forward during the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepInterval {
    pub index: usize,
    pub start: f64,
    pub end: f64,
    pub leading: Foot,
}

/// Yaw midline of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MidlinePoint {
    pub step: usize,
    /// Centre time of the step, s.
    pub time: f64,
    pub yaw: f64,
}

/// Dead band around zero used to reject chatter at a crossing, rad.
pub const CROSSING_HYSTERESIS: f64 = 0.008_726_646_259_971_648; // 0.5°

pub fn segment_steps(telemetry: &Telemetry, window: &AnalysisWindow) -> Vec<StepInterval> {
    segment_samples(window_samples(telemetry, window), CROSSING_HYSTERESIS)
}

/// Step intervals from the hip angle of a sample run. A crossing is only
/// accepted once the signal has left the dead band on the other side, so
/// consecutive intervals always alternate.
pub fn segment_samples(samples: &[Sample], hysteresis: f64) -> Vec<StepInterval> {
    let mut crossings: Vec<(f64, Foot)> = Vec::new();
    let mut sign = 0i8;
    // last sample index at which the signal still had the previous sign
    let mut last_same = 0usize;
    for (i, s) in samples.iter().enumerate() {
        let v = s.hip_act;
        let current = if v > hysteresis {
            1
        } else if v < -hysteresis {
            -1
        } else {
            0
        };
        if current != 0 && current != sign {
            if sign != 0 {
                let t = crossing_time(samples, last_same, i);
                let leading = if current > 0 { Foot::Left } else { Foot::Right };
                crossings.push((t, leading));
            }
            sign = current;
        }
        if sign != 0 && v * f64::from(sign) > 0.0 {
            last_same = i;
        }
    }
    crossings
        .windows(2)
        .enumerate()
        .map(|(index, w)| StepInterval {
            index,
            start: w[0].0,
            end: w[1].0,
            leading: w[0].1,
        })
        .collect()
}

/// Interpolated zero crossing between the last sample of the old sign and
/// the first sample past the dead band.
fn crossing_time(samples: &[Sample], from: usize, to: usize) -> f64 {
    for j in from..to {
        let (a, b) = (&samples[j], &samples[j + 1]);
        if a.hip_act == 0.0 {
            return a.t;
        }
        if a.hip_act * b.hip_act < 0.0 || b.hip_act == 0.0 {
            let f = a.hip_act / (a.hip_act - b.hip_act);
            return a.t + f * (b.t - a.t);
        }
    }
    samples[to].t
}

pub fn yaw_midline(telemetry: &Telemetry, steps: &[StepInterval]) -> Vec<MidlinePoint> {
    let s = &telemetry.samples;
    steps
        .iter()
        .filter_map(|step| {
            let lo = s.partition_point(|x| x.t < step.start);
            let hi = s.partition_point(|x| x.t <= step.end);
            let slice = &s[lo..hi.max(lo)];
            if slice.is_empty() {
                return None;
            }
            let (min, max) = slice
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(x.yaw), hi.max(x.yaw))
                });
            Some(MidlinePoint {
                step: step.index,
                time: 0.5 * (step.start + step.end),
                yaw: 0.5 * (min + max),
            })
        })
        .collect()
}

/// Least-squares slope of the midline against step centre time, rad/s.
pub fn yaw_rate(midline: &[MidlinePoint]) -> Option<f64> {
    if midline.len() < 2 {
        return None;
    }
    let n = midline.len() as f64;
    let mt = midline.iter().map(|p| p.time).sum::<f64>() / n;
    let my = midline.iter().map(|p| p.yaw).sum::<f64>() / n;
    let (num, den) = midline.iter().fold((0.0, 0.0), |(a, b), p| {
        let dt = p.time - mt;
        (a + dt * (p.yaw - my), b + dt * dt)
    });
    (den > 0.0).then(|| num / den)
}
