use nalgebra::{UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::model::WalkerParams;

/// Floating-base configuration and velocity of the two-body walker.
///
/// The base frame is the mean of the two body frames: its origin is the hip
/// axis midpoint, its y axis is the hip axis, and the left and right bodies
/// are rotated by `-hip_angle/2` and `+hip_angle/2` about that axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkerState {
    pub base_position: Vector3<f64>,
    pub base_orientation: UnitQuaternion<f64>,
    pub hip_angle: f64,
    /// World frame.
    pub base_linear_velocity: Vector3<f64>,
    /// Base frame.
    pub base_angular_velocity: Vector3<f64>,
    pub hip_rate: f64,
    pub time: f64,
}

impl WalkerState {
    /// Reference stance: upright, legs aligned, feet tangent to the floor, at rest.
    pub fn standing(params: &WalkerParams) -> Self {
        Self {
            base_position: Vector3::new(0.0, 0.0, params.hip_height()),
            base_orientation: UnitQuaternion::identity(),
            hip_angle: 0.0,
            base_linear_velocity: Vector3::zeros(),
            base_angular_velocity: Vector3::zeros(),
            hip_rate: 0.0,
            time: 0.0,
        }
    }

    /// Legs aligned and at rest but rolled by `roll` radians about the
    /// forward axis, lowered until the lower foot just touches the floor.
    pub fn tilted(params: &WalkerParams, roll: f64) -> Self {
        let mut s = Self::standing(params);
        s.base_orientation = UnitQuaternion::from_euler_angles(roll, 0.0, 0.0);
        s.base_position.z = 0.0;
        let lowest = [&params.left_foot, &params.right_foot]
            .iter()
            .map(|f| (s.base_orientation * f.center_offset).z - f.radius)
            .fold(f64::INFINITY, f64::min);
        s.base_position.z = -lowest;
        s
    }

    /// `(roll, pitch, yaw)` of the base frame, Z-Y-X convention.
    pub fn euler(&self) -> (f64, f64, f64) {
        self.base_orientation.euler_angles()
    }

    pub fn is_finite(&self) -> bool {
        self.base_position.iter().all(|v| v.is_finite())
            && self.base_orientation.coords.iter().all(|v| v.is_finite())
            && self.base_linear_velocity.iter().all(|v| v.is_finite())
            && self.base_angular_velocity.iter().all(|v| v.is_finite())
            && self.hip_angle.is_finite()
            && self.hip_rate.is_finite()
            && self.time.is_finite()
    }

    /// Reflection through the world x-z plane, matching
    /// [`WalkerParams::mirrored`].
    pub fn mirrored(&self) -> Self {
        let q = self.base_orientation.quaternion();
        let w = self.base_angular_velocity;
        Self {
            base_position: Vector3::new(self.base_position.x, -self.base_position.y, self.base_position.z),
            base_orientation: UnitQuaternion::new_unchecked(nalgebra::Quaternion::new(
                q.w, -q.i, q.j, -q.k,
            )),
            hip_angle: -self.hip_angle,
            base_linear_velocity: Vector3::new(
                self.base_linear_velocity.x,
                -self.base_linear_velocity.y,
                self.base_linear_velocity.z,
            ),
            base_angular_velocity: Vector3::new(-w.x, w.y, -w.z),
            hip_rate: -self.hip_rate,
            time: self.time,
        }
    }
}
