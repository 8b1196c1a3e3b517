use approx::assert_relative_eq;
use nalgebra::{UnitQuaternion, Vector3};

use mugatu_core::dynamics::{
    angular_momentum, center_of_mass, drive_torque, integrate_step, mechanical_energy,
    simulate, simulate_from, SimOptions, WalkerState,
};
use mugatu_core::gait::{GaitCommand, HipTrajectory, Negated, ServoParams};
use mugatu_core::model::{stock_walker, WalkerParams};
use mugatu_core::GRAVITY;

struct Sine {
    amp: f64,
    omega: f64,
}

impl HipTrajectory for Sine {
    fn angle(&self, t: f64) -> f64 {
        self.amp * (self.omega * t).sin()
    }
    fn velocity(&self, t: f64) -> f64 {
        self.amp * self.omega * (self.omega * t).cos()
    }
}

fn airborne(params: &WalkerParams) -> WalkerState {
    let mut s = WalkerState::standing(params);
    s.base_position = Vector3::new(0.1, -0.2, 10.0);
    s.base_orientation = UnitQuaternion::from_euler_angles(0.3, -0.2, 0.7);
    s.hip_angle = 0.25;
    s.base_linear_velocity = Vector3::new(0.3, -0.1, 0.2);
    s.base_angular_velocity = Vector3::new(1.1, -0.7, 2.3);
    s.hip_rate = -1.5;
    s
}

fn unpowered(mut params: WalkerParams) -> WalkerParams {
    params.servo = ServoParams {
        kp: 0.0,
        kd: 0.0,
        ..params.servo
    };
    params
}

fn run(mut s: WalkerState, steps: usize, dt: f64, traj: &impl HipTrajectory, p: &WalkerParams) -> WalkerState {
    for _ in 0..steps {
        s = integrate_step(&s, dt, traj, p).unwrap();
    }
    s
}

#[test]
fn airborne_cg_accelerates_at_gravity() {
    let p = stock_walker();
    let traj = Sine { amp: 0.4, omega: 9.0 };
    let h = 1e-5;
    let s0 = airborne(&p);
    let s1 = integrate_step(&s0, h, &traj, &p).unwrap();
    let s2 = integrate_step(&s1, h, &traj, &p).unwrap();
    let v = |s: &WalkerState| center_of_mass(s, &p).1;
    let a = (-3.0 * v(&s0) + 4.0 * v(&s1) - v(&s2)) / (2.0 * h);
    assert!((a - Vector3::new(0.0, 0.0, -GRAVITY)).norm() < 1e-5, "{a}");
}

#[test]
fn airborne_angular_momentum_is_conserved() {
    let p = stock_walker();
    let traj = Sine { amp: 0.4, omega: 9.0 };
    let s0 = airborne(&p);
    let l0 = angular_momentum(&s0, &p);
    let s1 = run(s0, 5000, 1e-4, &traj, &p);
    assert!(s1.hip_angle.abs() > 0.0);
    assert!((angular_momentum(&s1, &p) - l0).norm() < 1e-9 * l0.norm().max(1e-3));
}

#[test]
fn airborne_unpowered_energy_is_conserved() {
    let p = unpowered(stock_walker());
    let traj = Sine { amp: 0.0, omega: 1.0 };
    let s0 = airborne(&p);
    let e0 = mechanical_energy(&s0, &p).total();
    let s1 = run(s0, 10_000, 1e-4, &traj, &p);
    let e1 = mechanical_energy(&s1, &p).total();
    assert!(((e1 - e0) / e0).abs() < 1e-7, "drift {}", (e1 - e0) / e0);
}

#[test]
fn energy_rate_equals_hip_power() {
    let p = stock_walker();
    let traj = Sine { amp: 0.3, omega: 7.0 };
    let s0 = airborne(&p);
    let h = 1e-5;
    let s1 = integrate_step(&s0, h, &traj, &p).unwrap();
    let s2 = integrate_step(&s1, h, &traj, &p).unwrap();
    let e = |s: &WalkerState| mechanical_energy(s, &p).total();
    let rate = (-3.0 * e(&s0) + 4.0 * e(&s1) - e(&s2)) / (2.0 * h);
    let power = drive_torque(&s0, &traj, &p) * s0.hip_rate;
    assert!(power.abs() > 0.1);
    assert_relative_eq!(rate, power, max_relative = 1e-4);
}

#[test]
fn rk4_observed_order() {
    let p = stock_walker();
    let traj = Sine { amp: 0.05, omega: 6.0 };
    // keep the servo out of saturation so the vector field stays smooth
    let mut s0 = airborne(&p);
    s0.hip_angle = 0.0;
    s0.hip_rate = 0.3;
    let horizon = 0.2;
    let end = |dt: f64| run(s0.clone(), (horizon / dt).round() as usize, dt, &traj, &p);
    let reference = end(1e-3 / 16.0);
    let err = |s: &WalkerState| {
        (s.base_position - reference.base_position).norm()
            + s.base_orientation.angle_to(&reference.base_orientation)
            + (s.hip_angle - reference.hip_angle).abs()
    };
    let e1 = err(&end(1e-3));
    let e2 = err(&end(5e-4));
    let order = (e1 / e2).log2();
    assert!(order >= 3.5, "order {order} ({e1:e}, {e2:e})");
}

#[test]
fn standing_still_stays_put() {
    let p = stock_walker();
    let tel = simulate(&p, &GaitCommand::hold(), 10.0, 1e-4, 50.0).unwrap();
    assert!(!tel.fell());
    let (a, b) = (tel.samples.first().unwrap(), tel.samples.last().unwrap());
    let drift = (b.cg_x - a.cg_x).hypot(b.cg_y - a.cg_y);
    assert!(drift < 0.01, "drift {drift}");
}

#[test]
fn released_roll_decays() {
    let p = stock_walker();
    let s0 = WalkerState::tilted(&p, 10f64.to_radians());
    let opts = SimOptions { sample_rate: 100.0, ..SimOptions::new(5.0) };
    let tel = simulate_from(&p, &GaitCommand::hold(), s0, &opts).unwrap();
    let last = tel.samples.last().unwrap();
    assert_relative_eq!(last.t, 5.0, epsilon = 1e-9);
    assert!(last.roll.abs() < 2f64.to_radians(), "roll {}", last.roll.to_degrees());
}

#[test]
fn mirrored_command_gives_mirrored_motion() {
    let p = stock_walker();
    assert_eq!(p.mirrored(), p);
    let cmd = GaitCommand::asymmetric(0.6, 0.5, 1.5);
    let s0 = WalkerState::tilted(&p, 3f64.to_radians());
    let a = run(s0.clone(), 15_000, 1e-4, &cmd, &p);
    let b = run(s0.mirrored(), 15_000, 1e-4, &Negated(cmd), &p);
    let m = b.mirrored();
    assert!((a.base_position - m.base_position).norm() < 1e-8);
    assert!(a.base_orientation.angle_to(&m.base_orientation) < 1e-8);
    assert!((a.hip_angle - m.hip_angle).abs() < 1e-8);
}

#[test]
fn simulation_is_deterministic() {
    let p = stock_walker();
    let cmd = GaitCommand::symmetric(0.7, 1.5);
    let a = simulate(&p, &cmd, 3.0, 1e-4, 200.0).unwrap();
    let b = simulate(&p, &cmd, 3.0, 1e-4, 200.0).unwrap();
    assert_eq!(a, b);
}

#[test]
fn quaternion_stays_normalised() {
    let p = unpowered(stock_walker());
    let traj = Sine { amp: 0.0, omega: 1.0 };
    let mut s = airborne(&p);
    s.base_position.z = 1e6;
    let mut worst: f64 = 0.0;
    for i in 0..1_000_000 {
        s = integrate_step(&s, 1e-4, &traj, &p).unwrap();
        if i % 1000 == 0 {
            worst = worst.max((s.base_orientation.quaternion().norm() - 1.0).abs());
        }
    }
    worst = worst.max((s.base_orientation.quaternion().norm() - 1.0).abs());
    assert!(worst < 1e-9, "{worst:e}");
}
