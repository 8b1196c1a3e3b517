//! Floating-base dynamics of the walker: contact, equations of motion,
//! integration and trial simulation.

mod contact;
mod eom;
mod integrator;
mod simulate;
mod state;

pub use contact::{contact_wrench, foot_lowest_point, ContactPoint, Foot};
pub use eom::{
    angular_momentum, body_poses, body_tilts, center_of_mass, evaluate, forward_dynamics,
    mass_matrix, mechanical_energy, Accelerations, EnergyBreakdown, Evaluation,
};
pub use integrator::{drive_torque, integrate_step, MAX_STEP};
pub use simulate::{
    detect_fall, simulate, simulate_from, simulate_with, Sample, SimOptions, Telemetry,
    DEFAULT_DT, DEFAULT_SAMPLE_RATE,
};
pub use state::WalkerState;

#[derive(Debug, thiserror::Error)]
pub enum DynamicsError {
    #[error("simulation diverged at t = {time} s")]
    Diverged {
        time: f64,
        last_valid: Box<WalkerState>,
    },
    #[error("joint-space mass matrix is not positive definite")]
    SingularMassMatrix,
    #[error("time step {0} s outside (0, 1e-3]")]
    InvalidStep(f64),
    #[error("invalid simulation options: {0}")]
    InvalidOptions(String),
}
