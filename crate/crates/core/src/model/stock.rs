//! The stock walker: a primitive decomposition of each leg-and-arm body
//! tuned so the assembled robot matches the published whole-robot numbers.

use nalgebra::Vector3;

use super::mass::{compose_body, MassSpec, Primitive, Shape};
use super::params::{ContactMaterial, FootSphere, WalkerParams};
use crate::gait::ServoParams;

pub const STOCK_MASS: f64 = 0.809;
pub const STOCK_HEIGHT: f64 = 0.185;
pub const STOCK_FOOT_RADIUS: f64 = 0.12;
pub const STOCK_CG_Z: f64 = -0.054;
pub const STOCK_HIP_Z: f64 = 0.033;
pub const STOCK_HIP_X: f64 = -0.014;
pub const STOCK_FOOT_GAP: f64 = 0.032;

/// Lateral CG of the left body (mirrored for the right). The arm battery
/// pulls each body's CG most of the way to the centre line.
const BODY_CG_Y: f64 = 0.004;

fn foot_center_left() -> Vector3<f64> {
    Vector3::new(-STOCK_HIP_X, 0.5 * STOCK_FOOT_GAP, -STOCK_HIP_Z)
}

/// Parts of the left body other than the foot ballast.
fn left_parts() -> Vec<Primitive> {
    let foot = foot_center_left();
    vec![
        // foot shell: bottom 2 cm of the 12 cm sphere
        Primitive::new(
            Shape::SphereCap { radius: STOCK_FOOT_RADIUS, height: 0.02 },
            foot,
            MassSpec::Mass(0.035),
        ),
        // leg strut from hip to foot
        Primitive::new(
            Shape::Box { size: Vector3::new(0.025, 0.012, 0.12) },
            Vector3::new(0.006, 0.016, -0.07),
            MassSpec::Mass(0.04),
        ),
        // hip block (servo on the left, electronics on the right)
        Primitive::new(
            Shape::Box { size: Vector3::new(0.034, 0.026, 0.024) },
            Vector3::new(0.0, 0.01, 0.0),
            MassSpec::Mass(0.025),
        ),
        // arm reaching across to the opposite side
        Primitive::new(
            Shape::Box { size: Vector3::new(0.012, 0.07, 0.008) },
            Vector3::new(0.0, -0.02, 0.012),
            MassSpec::Mass(0.012),
        ),
        // battery carried on the arm
        Primitive::new(
            Shape::Box { size: Vector3::new(0.035, 0.018, 0.012) },
            Vector3::new(0.014, -0.05, 0.02),
            MassSpec::Mass(0.04),
        ),
    ]
}

/// Primitive decomposition of the left body. The foot ballast ("wheel
/// weights") is a point mass placed so the body hits the target mass and CG.
pub fn stock_left_primitives() -> Vec<Primitive> {
    let mut parts = left_parts();
    let body_mass = 0.5 * STOCK_MASS;
    let target_cg = Vector3::new(
        -STOCK_HIP_X,
        BODY_CG_Y,
        STOCK_CG_Z - STOCK_HIP_Z,
    );
    let known = compose_body(&parts).expect("stock parts are valid");
    let ballast_mass = body_mass - known.mass;
    let ballast_at = (body_mass * target_cg - known.mass * known.cg) / ballast_mass;
    parts.push(Primitive::point(ballast_mass, ballast_at));
    parts
}

pub fn stock_right_primitives() -> Vec<Primitive> {
    stock_left_primitives().iter().map(Primitive::mirrored_y).collect()
}

/// Default walker assembled from the stock primitives.
pub fn stock_walker() -> WalkerParams {
    let left_body = compose_body(&stock_left_primitives()).expect("stock body");
    let right_body = compose_body(&stock_right_primitives()).expect("stock body");
    let left_center = foot_center_left();
    let right_center = Vector3::new(left_center.x, -left_center.y, left_center.z);
    WalkerParams {
        left_body,
        right_body,
        left_foot: FootSphere { center_offset: left_center, radius: STOCK_FOOT_RADIUS },
        right_foot: FootSphere { center_offset: right_center, radius: STOCK_FOOT_RADIUS },
        total_height: STOCK_HEIGHT,
        material: ContactMaterial::default(),
        servo: ServoParams::default(),
        hip_damping: 0.0,
    }
}
