use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::{PI, SQRT_2, TAU};

use mugatu_core::analysis::{
    cost_of_transport, find_window, forward_speed, roll_amplitude, segment_steps, yaw_midline,
    classify_stability, AnalysisError, AnalysisWindow, PowerModel,
};
use mugatu_core::dynamics::{Foot, Sample, Telemetry};
use mugatu_core::model::stock_walker;

const RATE: f64 = 200.0;

fn blank(t: f64) -> Sample {
    Sample {
        t,
        x: 0.0,
        y: 0.0,
        z: 0.153,
        roll: 0.0,
        pitch: 0.0,
        yaw: 0.0,
        hip_cmd: 0.0,
        hip_act: 0.0,
        tau: 0.0,
        p_elec: 0.0,
        n_left: 4.0,
        n_right: 4.0,
        cg_x: 0.0,
        cg_y: 0.0,
        cg_z: 0.1,
        e_mech: 0.0,
        hip_rate: 0.0,
    }
}

fn synth(duration: f64, gait_frequency: Option<f64>, f: impl Fn(&mut Sample)) -> Telemetry {
    let n = (duration * RATE).round() as usize;
    Telemetry {
        sample_rate: RATE,
        gait_frequency,
        mass: 0.809,
        foot_radius: 0.12,
        fall_time: None,
        max_stance_tilt: [0.0; 2],
        samples: (0..=n)
            .map(|i| {
                let mut s = blank(i as f64 / RATE);
                f(&mut s);
                s
            })
            .collect(),
    }
}

fn whole(duration: f64) -> AnalysisWindow {
    AnalysisWindow {
        first_movement_time: 0.0,
        steady_start: 0.0,
        steady_end: duration,
    }
}

fn walking_hip(s: &mut Sample) {
    if s.t >= 1.0 {
        s.hip_cmd = 0.6 * (TAU * 1.5 * (s.t - 1.0)).sin() + 0.1;
    }
}

#[test]
fn window_follows_first_movement() {
    let tel = synth(30.0, Some(1.5), walking_hip);
    let w = find_window(&tel).unwrap();
    assert_relative_eq!(w.first_movement_time, 1.0);
    assert_relative_eq!(w.steady_start, 11.0);
    assert_relative_eq!(w.steady_end, 26.0);
}

#[test]
fn window_truncated_at_fall() {
    let mut tel = synth(18.0, Some(1.5), walking_hip);
    tel.fall_time = Some(18.0);
    let w = find_window(&tel).unwrap();
    assert_relative_eq!(w.steady_start, 11.0);
    assert_relative_eq!(w.steady_end, 18.0);
}

#[test]
fn window_requires_movement_and_length() {
    let still = synth(30.0, Some(1.5), |_| {});
    assert_eq!(find_window(&still), Err(AnalysisError::NoSteadyRegion));
    let short = synth(5.0, Some(1.5), walking_hip);
    assert_eq!(find_window(&short), Err(AnalysisError::NoSteadyRegion));
    let empty = Telemetry { samples: vec![], ..still };
    assert_eq!(find_window(&empty), Err(AnalysisError::EmptyTelemetry));
}

#[test]
fn speed_of_straight_line() {
    let tel = synth(15.0, None, |s| s.cg_x = 0.16 * s.t);
    assert_relative_eq!(forward_speed(&tel, &whole(15.0)), 0.16, epsilon = 1e-12);
    let still = synth(15.0, None, |_| {});
    assert_eq!(forward_speed(&still, &whole(15.0)), 0.0);
}

#[test]
fn speed_uses_displacement_not_path() {
    let tel = synth(10.0, None, |s| {
        let a = 0.5 * PI * s.t / 10.0;
        s.cg_x = a.sin();
        s.cg_y = 1.0 - a.cos();
    });
    assert_relative_eq!(forward_speed(&tel, &whole(10.0)), SQRT_2 / 10.0, epsilon = 1e-12);
}

proptest! {
    #[test]
    fn speed_invariant_under_rigid_motion(
        heading in -PI..PI, dx in -5.0..5.0f64, dy in -5.0..5.0f64, v in 0.0..0.5f64,
    ) {
        let path = |s: &mut Sample| {
            s.cg_x = v * s.t;
            s.cg_y = 0.02 * (3.0 * s.t).sin();
        };
        let base = synth(10.0, None, path);
        let moved = synth(10.0, None, |s| {
            path(s);
            let (c, n) = (heading.cos(), heading.sin());
            let (x, y) = (s.cg_x, s.cg_y);
            s.cg_x = c * x - n * y + dx;
            s.cg_y = n * x + c * y + dy;
        });
        let w = whole(10.0);
        prop_assert!((forward_speed(&base, &w) - forward_speed(&moved, &w)).abs() < 1e-9);
    }
}

#[test]
fn roll_of_pure_sinusoid() {
    let tel = synth(15.0, Some(1.4), |s| s.roll = 0.1 * (TAU * 1.4 * s.t).sin());
    let (mean, std) = roll_amplitude(&tel, &whole(15.0)).unwrap();
    assert_relative_eq!(mean, 0.1, epsilon = 1e-4);
    assert!(std < 1e-4);
}

#[test]
fn roll_of_alternating_peaks() {
    let tel = synth(15.0, Some(1.4), |s| {
        let v = (TAU * 1.4 * s.t).sin();
        s.roll = if v > 0.0 { 0.12 * v } else { 0.08 * v };
    });
    let (mean, std) = roll_amplitude(&tel, &whole(15.0)).unwrap();
    assert_relative_eq!(mean, 0.10, epsilon = 2e-4);
    assert_relative_eq!(std, 0.02, epsilon = 2e-4);
}

#[test]
fn roll_of_noisy_sinusoid() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.002).unwrap();
    let eps: Vec<f64> = (0..=3000).map(|_| noise.sample(&mut rng)).collect();
    let tel = synth(15.0, Some(1.4), |s| {
        let i = (s.t * RATE).round() as usize;
        s.roll = 0.1 * (TAU * 1.4 * s.t).sin() + eps[i];
    });
    let (mean, _) = roll_amplitude(&tel, &whole(15.0)).unwrap();
    assert!((0.095..=0.107).contains(&mean), "{mean}");
}

#[test]
fn roll_needs_oscillation() {
    let tel = synth(15.0, Some(1.4), |s| s.roll = 0.05);
    assert_eq!(roll_amplitude(&tel, &whole(15.0)), Err(AnalysisError::NoOscillation));
}

#[test]
fn roll_invariant_under_decimation() {
    let tel = synth(15.0, Some(1.4), |s| {
        let v = (TAU * 1.4 * s.t).sin();
        s.roll = if v > 0.0 { 0.12 * v } else { 0.08 * v } + 0.004 * (TAU * 7.3 * s.t).sin();
    });
    let coarse = Telemetry {
        sample_rate: RATE / 2.0,
        samples: tel.samples.iter().step_by(2).cloned().collect(),
        ..tel.clone()
    };
    let (a, b) = (roll_amplitude(&tel, &whole(15.0)).unwrap(), roll_amplitude(&coarse, &whole(15.0)).unwrap());
    assert_relative_eq!(a.0, b.0, max_relative = 0.01);
    assert_relative_eq!(a.1, b.1, max_relative = 0.01, epsilon = 1e-4);
}

#[test]
fn steps_of_sine_alternate() {
    let f = 1.5;
    let tel = synth(10.0, Some(f), |s| s.hip_act = 0.6 * (TAU * f * s.t).sin());
    let steps = segment_steps(&tel, &whole(10.0));
    // 30 crossings after the first, minus the one at t = 0 where the signal starts
    assert_eq!(steps.len(), 28);
    for w in steps.windows(2) {
        assert_ne!(w[0].leading, w[1].leading);
        assert_relative_eq!(w[1].start, w[0].end);
    }
    for s in &steps {
        assert_relative_eq!(s.end - s.start, 0.5 / f, epsilon = 1e-5);
        let mid = 0.5 * (s.start + s.end);
        let expected = if (TAU * f * mid).sin() > 0.0 { Foot::Left } else { Foot::Right };
        assert_eq!(s.leading, expected);
    }
}

#[test]
fn constant_hip_has_no_steps() {
    let tel = synth(10.0, Some(1.5), |s| s.hip_act = 0.2);
    assert!(segment_steps(&tel, &whole(10.0)).is_empty());
}

#[test]
fn midline_of_constant_yaw() {
    let tel = synth(10.0, Some(1.5), |s| {
        s.hip_act = 0.6 * (TAU * 1.5 * s.t).sin();
        s.yaw = 10f64.to_radians();
    });
    let mid = yaw_midline(&tel, &segment_steps(&tel, &whole(10.0)));
    assert!(!mid.is_empty());
    for p in mid {
        assert_relative_eq!(p.yaw, 10f64.to_radians(), epsilon = 1e-12);
    }
}

#[test]
fn midline_of_aligned_sinusoid_is_zero() {
    let f = 1.5;
    let tel = synth(10.0, Some(f), |s| {
        s.hip_act = 0.6 * (TAU * f * s.t).sin();
        // yaw extremes at the step boundaries
        s.yaw = 5f64.to_radians() * (TAU * f * s.t).cos();
    });
    for p in yaw_midline(&tel, &segment_steps(&tel, &whole(10.0))) {
        assert!(p.yaw.abs() < 1e-3, "{}", p.yaw);
    }
}

#[test]
fn midline_tracks_ramp() {
    let f = 1.5;
    let rate = 2f64.to_radians();
    let tel = synth(10.0, Some(f), |s| {
        s.hip_act = 0.6 * (TAU * f * s.t).sin();
        s.yaw = rate * s.t + 5f64.to_radians() * (TAU * f * s.t).cos();
    });
    let mid = yaw_midline(&tel, &segment_steps(&tel, &whole(10.0)));
    for p in &mid {
        assert!((p.yaw - rate * p.time).abs() < 0.5f64.to_radians());
    }
}

#[test]
fn mirrored_trajectory_mirrors_midline() {
    let f = 1.4;
    let shape = |s: &mut Sample| {
        s.hip_act = 0.6 * (TAU * f * s.t).sin() + 0.05;
        s.yaw = 0.3 * s.t + 0.1 * (TAU * f * s.t + 0.4).sin();
    };
    let tel = synth(10.0, Some(f), shape);
    let mirror = synth(10.0, Some(f), |s| {
        shape(s);
        s.hip_act = -s.hip_act;
        s.yaw = -s.yaw;
    });
    let a = yaw_midline(&tel, &segment_steps(&tel, &whole(10.0)));
    let b = yaw_midline(&mirror, &segment_steps(&mirror, &whole(10.0)));
    assert_eq!(a.len(), b.len());
    for (p, q) in a.iter().zip(&b) {
        assert_eq!(p.step, q.step);
        assert_relative_eq!(p.yaw, -q.yaw, epsilon = 1e-12);
    }
}

#[test]
fn cot_of_constant_power() {
    let p = stock_walker();
    assert_relative_eq!(p.total_mass(), 0.809, epsilon = 1e-12);
    let tel = synth(15.0, None, |s| s.cg_x = 0.16 * s.t);
    let power = PowerModel { baseline_power: 6.73, efficiency: 0.5 };
    let (total, mech) = cost_of_transport(&tel, &whole(15.0), &power, &p).unwrap();
    assert_relative_eq!(total, 6.73 / (0.809 * 9.81 * 0.16), epsilon = 1e-9);
    assert!((total - 5.30).abs() <= 0.01);
    assert_eq!(mech, 0.0);
}

#[test]
fn cot_zero_without_power() {
    let p = stock_walker();
    let tel = synth(15.0, None, |s| s.cg_x = 0.1 * s.t);
    let power = PowerModel { baseline_power: 0.0, efficiency: 0.5 };
    assert_eq!(cost_of_transport(&tel, &whole(15.0), &power, &p).unwrap(), (0.0, 0.0));
}

#[test]
fn cot_halves_with_double_distance() {
    let p = stock_walker();
    let power = PowerModel::default();
    let slow = synth(15.0, None, |s| s.cg_x = 0.1 * s.t);
    let fast = synth(15.0, None, |s| s.cg_x = 0.2 * s.t);
    let a = cost_of_transport(&slow, &whole(15.0), &power, &p).unwrap().0;
    let b = cost_of_transport(&fast, &whole(15.0), &power, &p).unwrap().0;
    assert_relative_eq!(a, 2.0 * b, epsilon = 1e-12);
}

#[test]
fn cot_requires_progress() {
    let p = stock_walker();
    let tel = synth(15.0, None, |_| {});
    assert_eq!(
        cost_of_transport(&tel, &whole(15.0), &PowerModel::default(), &p),
        Err(AnalysisError::NoProgress)
    );
}

proptest! {
    #[test]
    fn total_cot_bounds_mechanical(
        p0 in 0.0..5.0f64, eta in 0.05..=1.0f64, amp in 0.0..0.5f64, phase in 0.0..TAU,
    ) {
        let p = stock_walker();
        let tel = synth(5.0, None, |s| {
            s.cg_x = 0.1 * s.t;
            s.tau = amp * (9.0 * s.t).sin();
            s.hip_rate = 4.0 * (9.0 * s.t + phase).sin();
        });
        let power = PowerModel { baseline_power: p0, efficiency: eta };
        let (total, mech) = cost_of_transport(&tel, &whole(5.0), &power, &p).unwrap();
        prop_assert!(mech >= 0.0);
        prop_assert!(total >= mech - 1e-15);
        if p0 == 0.0 && eta == 1.0 {
            prop_assert!((total - mech).abs() < 1e-15);
        }
    }
}

#[test]
fn equality_only_for_ideal_drive() {
    let p = stock_walker();
    let tel = synth(5.0, None, |s| {
        s.cg_x = 0.1 * s.t;
        s.tau = 0.2;
        s.hip_rate = 1.0;
    });
    let ideal = PowerModel { baseline_power: 0.0, efficiency: 1.0 };
    let (t, m) = cost_of_transport(&tel, &whole(5.0), &ideal, &p).unwrap();
    assert_relative_eq!(t, m, epsilon = 1e-15);
    let lossy = PowerModel { baseline_power: 0.0, efficiency: 0.9 };
    let (t, m) = cost_of_transport(&tel, &whole(5.0), &lossy, &p).unwrap();
    assert!(t > m);
}

#[test]
fn stability_classification() {
    let walking = |s: &mut Sample| {
        walking_hip(s);
        if s.t >= 1.0 {
            s.hip_act = 0.6 * (TAU * 1.5 * (s.t - 1.0)).sin();
            s.cg_x = 0.05 * (s.t - 1.0);
        }
    };
    let good = synth(30.0, Some(1.5), walking);
    let w = find_window(&good).unwrap();
    assert!(classify_stability(&good, &w));

    let mut fallen = synth(12.0, Some(1.5), walking);
    fallen.fall_time = Some(12.0);
    let w = find_window(&fallen).unwrap();
    assert!(!classify_stability(&fallen, &w));

    let standing = synth(30.0, Some(1.5), |s| {
        if s.t >= 1.0 {
            s.hip_cmd = 0.5;
        }
    });
    let w = find_window(&standing).unwrap();
    assert!(!classify_stability(&standing, &w));
}
