//! Fixed-step classical Runge-Kutta on the full floating-base state.

use nalgebra::{Quaternion, SVector, UnitQuaternion, Vector3};

use super::eom::evaluate;
use super::state::WalkerState;
use super::DynamicsError;
use crate::gait::HipTrajectory;
use crate::model::WalkerParams;

pub const MAX_STEP: f64 = 1.0e-3;

type Packed = SVector<f64, 14>;

fn pack(s: &WalkerState) -> Packed {
    let q = s.base_orientation.quaternion();
    let (p, v, w) = (s.base_position, s.base_linear_velocity, s.base_angular_velocity);
    Packed::from_column_slice(&[
        p.x, p.y, p.z, q.w, q.i, q.j, q.k, s.hip_angle, v.x, v.y, v.z, w.x, w.y, w.z,
    ])
}

/// Unpacks without renormalising the quaternion; RK stages evaluate the
/// dynamics at the raw intermediate orientation.
fn unpack(x: &Packed, hip_rate: f64, time: f64) -> WalkerState {
    WalkerState {
        base_position: Vector3::new(x[0], x[1], x[2]),
        base_orientation: UnitQuaternion::new_unchecked(Quaternion::new(x[3], x[4], x[5], x[6])),
        hip_angle: x[7],
        base_linear_velocity: Vector3::new(x[8], x[9], x[10]),
        base_angular_velocity: Vector3::new(x[11], x[12], x[13]),
        hip_rate,
        time,
    }
}

/// Full state derivative, split as (packed part, hip acceleration).
fn derivative<T: HipTrajectory>(
    state: &WalkerState,
    traj: &T,
    params: &WalkerParams,
) -> Result<(Packed, f64), DynamicsError> {
    let tau = drive_torque(state, traj, params);
    let acc = evaluate(state, tau, params)?.accelerations;
    let q = state.base_orientation.quaternion();
    let w = state.base_angular_velocity;
    let qdot = q * Quaternion::new(0.0, w.x, w.y, w.z) * 0.5;
    let v = state.base_linear_velocity;
    let d = Packed::from_column_slice(&[
        v.x,
        v.y,
        v.z,
        qdot.w,
        qdot.i,
        qdot.j,
        qdot.k,
        state.hip_rate,
        acc.base_linear.x,
        acc.base_linear.y,
        acc.base_linear.z,
        acc.base_angular.x,
        acc.base_angular.y,
        acc.base_angular.z,
    ]);
    Ok((d, acc.hip))
}

/// One RK4 step; the servo torque is recomputed at every stage.
pub fn integrate_step<T: HipTrajectory>(
    state: &WalkerState,
    dt: f64,
    traj: &T,
    params: &WalkerParams,
) -> Result<WalkerState, DynamicsError> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(DynamicsError::InvalidStep(dt));
    }
    let t0 = state.time;
    let x0 = pack(state);
    let r0 = state.hip_rate;

    let (k1, a1) = derivative(state, traj, params)?;
    let s2 = unpack(&(x0 + 0.5 * dt * k1), r0 + 0.5 * dt * a1, t0 + 0.5 * dt);
    let (k2, a2) = derivative(&s2, traj, params)?;
    let s3 = unpack(&(x0 + 0.5 * dt * k2), r0 + 0.5 * dt * a2, t0 + 0.5 * dt);
    let (k3, a3) = derivative(&s3, traj, params)?;
    let s4 = unpack(&(x0 + dt * k3), r0 + dt * a3, t0 + dt);
    let (k4, a4) = derivative(&s4, traj, params)?;

    let x = x0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    let rate = r0 + dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    let mut next = unpack(&x, rate, t0 + dt);
    next.base_orientation = UnitQuaternion::new_normalize(*next.base_orientation.quaternion());
    if !next.is_finite() {
        return Err(DynamicsError::Diverged {
            time: t0,
            last_valid: Box::new(state.clone()),
        });
    }
    Ok(next)
}

/// Servo torque the drive applies at a given state.
pub fn drive_torque<T: HipTrajectory>(state: &WalkerState, traj: &T, params: &WalkerParams) -> f64 {
    params.servo.torque(
        traj.angle(state.time),
        traj.velocity(state.time),
        state.hip_angle,
        state.hip_rate,
    )
}
