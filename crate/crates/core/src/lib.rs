//! Model, gait command, dynamics and analysis of a two-body, single-servo
//! bipedal walker.

pub mod analysis;
pub mod dynamics;
pub mod gait;
pub mod model;

/// m/s²
pub const GRAVITY: f64 = 9.81;
