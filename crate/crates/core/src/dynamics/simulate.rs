use serde::Serialize;
use std::io::Write;
use std::path::Path;

use super::eom::{body_tilts, center_of_mass, evaluate, mechanical_energy};
use super::integrator::{drive_torque, integrate_step};
use super::state::WalkerState;
use super::DynamicsError;
use crate::analysis::PowerModel;
use crate::gait::{GaitCommand, HipTrajectory};
use crate::model::WalkerParams;

pub const DEFAULT_DT: f64 = 1.0e-4;
pub const DEFAULT_SAMPLE_RATE: f64 = 200.0;

/// One telemetry row. Serialises to the normative CSV column set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub roll: f64,
    pub pitch: f64,
    /// Unwrapped, continuous across ±π.
    pub yaw: f64,
    pub hip_cmd: f64,
    pub hip_act: f64,
    pub tau: f64,
    pub p_elec: f64,
    pub n_left: f64,
    pub n_right: f64,
    pub cg_x: f64,
    pub cg_y: f64,
    pub cg_z: f64,
    pub e_mech: f64,
    #[serde(skip)]
    pub hip_rate: f64,
}

impl Sample {
    pub fn left_contact(&self) -> bool {
        self.n_left > 0.0
    }

    pub fn right_contact(&self) -> bool {
        self.n_right > 0.0
    }
}

/// Uniformly sampled record of one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Telemetry {
    pub sample_rate: f64,
    /// Commanded gait frequency, when the drive is periodic.
    pub gait_frequency: Option<f64>,
    pub mass: f64,
    pub foot_radius: f64,
    /// Time at which a fall was detected; the record ends there.
    pub fall_time: Option<f64>,
    /// Largest tilt of each body (left, right) while its foot was loaded.
    pub max_stance_tilt: [f64; 2],
    pub samples: Vec<Sample>,
}

impl Telemetry {
    pub fn fell(&self) -> bool {
        self.fall_time.is_some()
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<(), csv::Error> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }
}

/// Integration and logging settings for [`simulate_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub duration: f64,
    pub dt: f64,
    pub sample_rate: f64,
    pub power: PowerModel,
    /// Stop when a fall is detected.
    pub stop_on_fall: bool,
}

impl SimOptions {
    pub fn new(duration: f64) -> Self {
        Self {
            duration,
            dt: DEFAULT_DT,
            sample_rate: DEFAULT_SAMPLE_RATE,
            power: PowerModel::default(),
            stop_on_fall: true,
        }
    }
}

/// Fallen: base rolled or pitched past 60°, or the hip axis has dropped
/// below half its standing height.
pub fn detect_fall(state: &WalkerState, params: &WalkerParams) -> bool {
    let (roll, pitch, _) = state.euler();
    let limit = 60f64.to_radians();
    roll.abs() > limit || pitch.abs() > limit || state.base_position.z < 0.5 * params.hip_height()
}

pub fn simulate(
    params: &WalkerParams,
    cmd: &GaitCommand,
    duration: f64,
    dt: f64,
    sample_rate: f64,
) -> Result<Telemetry, DynamicsError> {
    let opts = SimOptions { dt, sample_rate, ..SimOptions::new(duration) };
    let mut tel = simulate_from(params, cmd, WalkerState::standing(params), &opts)?;
    tel.gait_frequency = Some(cmd.frequency);
    Ok(tel)
}

/// Runs any hip trajectory from the standing pose.
pub fn simulate_with<T: HipTrajectory>(
    params: &WalkerParams,
    traj: &T,
    opts: &SimOptions,
) -> Result<Telemetry, DynamicsError> {
    simulate_from(params, traj, WalkerState::standing(params), opts)
}

pub fn simulate_from<T: HipTrajectory>(
    params: &WalkerParams,
    traj: &T,
    initial: WalkerState,
    opts: &SimOptions,
) -> Result<Telemetry, DynamicsError> {
    if !(opts.duration > 0.0) {
        return Err(DynamicsError::InvalidOptions("duration must be positive".into()));
    }
    if !(opts.sample_rate > 0.0 && opts.sample_rate * opts.dt <= 1.0 + 1e-9) {
        return Err(DynamicsError::InvalidOptions(
            "sample rate must be positive and at most 1/dt".into(),
        ));
    }
    let stride = (1.0 / (opts.sample_rate * opts.dt)).round().max(1.0) as usize;
    let steps = (opts.duration / opts.dt).round() as usize;
    let t0 = initial.time;

    let mut tel = Telemetry {
        sample_rate: 1.0 / (stride as f64 * opts.dt),
        gait_frequency: None,
        mass: params.total_mass(),
        foot_radius: params.foot_radius(),
        fall_time: None,
        max_stance_tilt: [0.0; 2],
        samples: Vec::with_capacity(steps / stride + 1),
    };
    let mut state = initial;
    let mut yaw_unwrapped: Option<f64> = None;

    for step in 0..=steps {
        if step % stride == 0 {
            let sample = record(&state, traj, params, &opts.power, &mut yaw_unwrapped)?;
            tel.samples.push(sample);
        }
        track_tilt(&state, params, &mut tel.max_stance_tilt);
        if detect_fall(&state, params) {
            tel.fall_time = Some(state.time);
            if opts.stop_on_fall {
                break;
            }
        }
        if step == steps {
            break;
        }
        let mut next = integrate_step(&state, opts.dt, traj, params)?;
        // keep time on the exact grid
        next.time = t0 + (step + 1) as f64 * opts.dt;
        state = next;
    }
    Ok(tel)
}

fn track_tilt(state: &WalkerState, params: &WalkerParams, max: &mut [f64; 2]) {
    let poses = super::eom::body_poses(state);
    let tilts = body_tilts(state);
    for ((pose, foot), (slot, tilt)) in poses
        .iter()
        .zip([&params.left_foot, &params.right_foot])
        .zip(max.iter_mut().zip(tilts))
    {
        let (_, gap) = super::contact::foot_lowest_point(foot, pose);
        if gap < 0.0 {
            *slot = slot.max(tilt);
        }
    }
}

fn record<T: HipTrajectory>(
    state: &WalkerState,
    traj: &T,
    params: &WalkerParams,
    power: &PowerModel,
    yaw_unwrapped: &mut Option<f64>,
) -> Result<Sample, DynamicsError> {
    let tau = drive_torque(state, traj, params);
    let eval = evaluate(state, tau, params)?;
    let (roll, pitch, yaw) = state.euler();
    let yaw = match *yaw_unwrapped {
        None => yaw,
        Some(prev) => {
            let two_pi = std::f64::consts::TAU;
            prev + (yaw - prev + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI
        }
    };
    *yaw_unwrapped = Some(yaw);
    let (cg, _) = center_of_mass(state, params);
    let normal = |i: usize| eval.contacts[i].as_ref().map_or(0.0, |c| c.normal_force);
    Ok(Sample {
        t: state.time,
        x: state.base_position.x,
        y: state.base_position.y,
        z: state.base_position.z,
        roll,
        pitch,
        yaw,
        hip_cmd: traj.angle(state.time),
        hip_act: state.hip_angle,
        tau,
        p_elec: power.electrical_power(tau, state.hip_rate),
        n_left: normal(0),
        n_right: normal(1),
        cg_x: cg.x,
        cg_y: cg.y,
        cg_z: cg.z,
        e_mech: mechanical_energy(state, params).total(),
        hip_rate: state.hip_rate,
    })
}
