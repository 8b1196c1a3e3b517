//! Open-loop hip command and servo model.
//!
//! The command is a piecewise sinusoid with one amplitude per half cycle.
//! Positive hip angle means the left leg is ahead of the right; `amp_left`
//! shapes the half cycle in which the left leg leads.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::model::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum BreakMode {
    /// Amplitude switches at the zero crossings (t' = 0, T/2).
    #[default]
    Midpoint,
    /// Amplitude switches at the extrema (t' = T/4, 3T/4).
    Extrema,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitCommand {
    pub amp_left: f64,
    pub amp_right: f64,
    pub frequency: f64,
    #[serde(default)]
    pub break_mode: BreakMode,
    pub start_delay: f64,
}

pub const DEFAULT_START_DELAY: f64 = 1.0;

impl GaitCommand {
    pub fn symmetric(amplitude: f64, frequency: f64) -> Self {
        Self::asymmetric(amplitude, amplitude, frequency)
    }

    pub fn asymmetric(amp_left: f64, amp_right: f64, frequency: f64) -> Self {
        Self {
            amp_left,
            amp_right,
            frequency,
            break_mode: BreakMode::Midpoint,
            start_delay: DEFAULT_START_DELAY,
        }
    }

    /// Zero-amplitude command: the servo holds the legs aligned.
    pub fn hold() -> Self {
        Self::symmetric(0.0, 1.0)
    }

    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.frequency
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, a) in [("amp_left", self.amp_left), ("amp_right", self.amp_right)] {
            if !(0.0..FRAC_PI_2).contains(&a) {
                return Err(ModelError::InvalidField {
                    field: format!("gait.{name}"),
                    reason: "must lie in [0, 90°)".into(),
                });
            }
        }
        if !(self.frequency > 0.0 && self.frequency.is_finite()) {
            return Err(ModelError::InvalidField {
                field: "gait.frequency".into(),
                reason: "must be positive".into(),
            });
        }
        if !(self.start_delay >= 0.0 && self.start_delay.is_finite()) {
            return Err(ModelError::InvalidField {
                field: "gait.start_delay".into(),
                reason: "must be non-negative".into(),
            });
        }
        Ok(())
    }

    /// Amplitude and offset of the sinusoid active at shifted time `tp`.
    /// Returns `(amplitude, offset)` so that angle = offset + amplitude·sin(ωt').
    fn branch(&self, tp: f64) -> (f64, f64) {
        let period = self.period();
        let phase = tp.rem_euclid(period);
        match self.break_mode {
            BreakMode::Midpoint => {
                if phase < 0.5 * period {
                    (self.amp_left, 0.0)
                } else {
                    (self.amp_right, 0.0)
                }
            }
            BreakMode::Extrema => {
                if tp < 0.25 * period {
                    // run-up from rest to the first left extreme
                    (self.amp_left, 0.0)
                } else {
                    // between extrema the signal travels from +amp_left to
                    // -amp_right and back, so both branches share one offset sinusoid
                    (
                        0.5 * (self.amp_left + self.amp_right),
                        0.5 * (self.amp_left - self.amp_right),
                    )
                }
            }
        }
    }
}

/// A time-indexed hip trajectory the servo tracks.
pub trait HipTrajectory {
    fn angle(&self, t: f64) -> f64;
    /// Time derivative of [`HipTrajectory::angle`], right-hand limit at
    /// branch switches.
    fn velocity(&self, t: f64) -> f64;
}

impl HipTrajectory for GaitCommand {
    fn angle(&self, t: f64) -> f64 {
        commanded_angle(t, self)
    }

    fn velocity(&self, t: f64) -> f64 {
        commanded_velocity(t, self)
    }
}

/// Sign-flipped trajectory; the exact sagittal mirror of a command.
#[derive(Debug, Clone, Copy)]
pub struct Negated<T>(pub T);

impl<T: HipTrajectory> HipTrajectory for Negated<T> {
    fn angle(&self, t: f64) -> f64 {
        -self.0.angle(t)
    }

    fn velocity(&self, t: f64) -> f64 {
        -self.0.velocity(t)
    }
}

pub fn commanded_angle(t: f64, cmd: &GaitCommand) -> f64 {
    let tp = t - cmd.start_delay;
    if tp < 0.0 {
        return 0.0;
    }
    let (amp, offset) = cmd.branch(tp);
    offset + amp * (cmd.omega() * tp).sin()
}

pub fn commanded_velocity(t: f64, cmd: &GaitCommand) -> f64 {
    let tp = t - cmd.start_delay;
    if tp < 0.0 {
        return 0.0;
    }
    let (amp, _) = cmd.branch(tp);
    let w = cmd.omega();
    amp * w * (w * tp).cos()
}

/// Position servo: PD tracking with a torque clamp and a soft speed cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ServoParams {
    pub kp: f64,
    pub kd: f64,
    pub torque_limit: f64,
    pub speed_limit: f64,
}

impl Default for ServoParams {
    fn default() -> Self {
        Self {
            kp: 6.0,
            kd: 0.08,
            torque_limit: 0.52,
            speed_limit: 38.0,
        }
    }
}

impl ServoParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("kp", self.kp),
            ("kd", self.kd),
            ("torque_limit", self.torque_limit),
            ("speed_limit", self.speed_limit),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::InvalidField {
                    field: format!("servo.{name}"),
                    reason: "must be positive".into(),
                });
            }
        }
        Ok(())
    }

    /// Torque for a given tracking target.
    pub fn torque(&self, target: f64, target_rate: f64, angle: f64, rate: f64) -> f64 {
        let raw = self.kp * (target - angle) + self.kd * (target_rate - rate);
        let mut tau = raw.clamp(-self.torque_limit, self.torque_limit);
        if rate.abs() > self.speed_limit && tau * rate > 0.0 {
            let fade = (1.2 * self.speed_limit - rate.abs()) / (0.2 * self.speed_limit);
            tau *= fade.clamp(0.0, 1.0);
        }
        tau
    }
}

pub fn servo_torque(
    hip_angle: f64,
    hip_rate: f64,
    t: f64,
    cmd: &GaitCommand,
    servo: &ServoParams,
) -> f64 {
    servo.torque(
        commanded_angle(t, cmd),
        commanded_velocity(t, cmd),
        hip_angle,
        hip_rate,
    )
}
