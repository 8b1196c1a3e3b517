//! Equations of motion of the two-body floating-base system.
//!
//! Generalised velocity `u = [v_base (world), ω_base (base frame), θ̇]`.
//! Each body's CG velocity and angular velocity are linear in `u`
//! (`J_i u`); projecting both Newton-Euler equations through `J_iᵀ` removes
//! the hip constraint forces and yields `M(q) u̇ = Q(q, u)`.

use nalgebra::{Cholesky, Isometry3, Matrix3, SMatrix, SVector, Translation3, UnitQuaternion, Vector3};

use super::contact::{contact_wrench, foot_lowest_point, ContactPoint, Foot};
use super::state::WalkerState;
use super::DynamicsError;
use crate::model::{BodyMassProperties, FootSphere, WalkerParams};
use crate::GRAVITY;

pub type Jacobian = SMatrix<f64, 3, 7>;

/// Time derivative of the generalised velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Accelerations {
    /// World frame.
    pub base_linear: Vector3<f64>,
    /// Base frame.
    pub base_angular: Vector3<f64>,
    pub hip: f64,
}

impl Accelerations {
    fn from_vector(a: &SVector<f64, 7>) -> Self {
        Self {
            base_linear: Vector3::new(a[0], a[1], a[2]),
            base_angular: Vector3::new(a[3], a[4], a[5]),
            hip: a[6],
        }
    }
}

/// Position and velocity of one rigid body for a given state.
pub(crate) struct BodyKinematics<'a> {
    pub props: &'a BodyMassProperties,
    pub foot: &'a FootSphere,
    pub which: Foot,
    /// +1 for the right body, -1 for the left.
    pub sign: f64,
    pub orientation: UnitQuaternion<f64>,
    /// CG offset from the base origin, world frame.
    pub cg_offset: Vector3<f64>,
    pub inertia_world: Matrix3<f64>,
    pub omega: Vector3<f64>,
    pub cg_velocity: Vector3<f64>,
    /// Angular part of the Jacobian (world angular velocity = j_ang u).
    pub j_ang: Jacobian,
    /// Linear CG Jacobian.
    pub j_lin: Jacobian,
}

pub(crate) struct Kinematics<'a> {
    pub base_rotation: Matrix3<f64>,
    pub hip_axis: Vector3<f64>,
    pub bodies: [BodyKinematics<'a>; 2],
    pub u: SVector<f64, 7>,
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    v.cross_matrix()
}

pub(crate) fn generalized_velocity(state: &WalkerState) -> SVector<f64, 7> {
    let v = state.base_linear_velocity;
    let w = state.base_angular_velocity;
    SVector::<f64, 7>::from_column_slice(&[v.x, v.y, v.z, w.x, w.y, w.z, state.hip_rate])
}

impl<'a> Kinematics<'a> {
    pub fn new(state: &WalkerState, params: &'a WalkerParams) -> Self {
        let rb = *state.base_orientation.to_rotation_matrix().matrix();
        let axis = rb.column(1).into_owned();
        let u = generalized_velocity(state);
        let omega_base = rb * state.base_angular_velocity;
        let half = 0.5 * state.hip_angle;
        let make = |props: &'a BodyMassProperties, foot: &'a FootSphere, which: Foot, sign: f64| {
            let rel = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), sign * half);
            let orientation = state.base_orientation * rel;
            let rotation = *orientation.to_rotation_matrix().matrix();
            let cg_offset = rotation * props.cg;
            let omega = omega_base + 0.5 * sign * state.hip_rate * axis;

            let mut j_ang = Jacobian::zeros();
            j_ang.fixed_view_mut::<3, 3>(0, 3).copy_from(&rb);
            j_ang.set_column(6, &(0.5 * sign * axis));
            let mut j_lin = -skew(&cg_offset) * j_ang;
            j_lin.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());

            BodyKinematics {
                props,
                foot,
                which,
                sign,
                orientation,
                cg_offset,
                inertia_world: rotation * props.inertia * rotation.transpose(),
                omega,
                cg_velocity: state.base_linear_velocity + omega.cross(&cg_offset),
                j_ang,
                j_lin,
            }
        };
        Self {
            base_rotation: rb,
            hip_axis: axis,
            bodies: [
                make(&params.left_body, &params.left_foot, Foot::Left, -1.0),
                make(&params.right_body, &params.right_foot, Foot::Right, 1.0),
            ],
            u,
        }
    }

    /// Jacobian of the velocity of a point fixed to `body` at world offset
    /// `d` from the base origin.
    pub fn point_jacobian(&self, body: &BodyKinematics, d: &Vector3<f64>) -> Jacobian {
        let mut j = -skew(d) * body.j_ang;
        j.fixed_view_mut::<3, 3>(0, 0).copy_from(&Matrix3::identity());
        j
    }
}

/// Contact state of both feet plus the generalised force it produces.
pub(crate) fn contact_forces(
    state: &WalkerState,
    kin: &Kinematics,
    params: &WalkerParams,
) -> ([Option<ContactPoint>; 2], SVector<f64, 7>) {
    let mut q = SVector::<f64, 7>::zeros();
    let mut contacts = [None, None];
    for (slot, body) in contacts.iter_mut().zip(kin.bodies.iter()) {
        let pose = Isometry3::from_parts(Translation3::from(state.base_position), body.orientation);
        let (point, gap) = foot_lowest_point(body.foot, &pose);
        if gap >= 0.0 {
            continue;
        }
        let d = point - state.base_position;
        let jp = kin.point_jacobian(body, &d);
        let velocity = jp * kin.u;
        let spin_rate = body.omega.z;
        let (force, spin_torque) = contact_wrench(gap, &velocity, spin_rate, &params.material);
        q += jp.transpose() * force + body.j_ang.transpose() * (Vector3::z() * spin_torque);
        *slot = Some(ContactPoint {
            foot: body.which,
            world_point: point,
            penetration: -gap,
            normal_force: force.z,
            tangential_force: force.xy(),
            spin_torque,
        });
    }
    (contacts, q)
}

/// Mass matrix and velocity-dependent plus gravity generalised force.
fn mass_and_bias(kin: &Kinematics) -> (SMatrix<f64, 7, 7>, SVector<f64, 7>) {
    let mut m = SMatrix::<f64, 7, 7>::zeros();
    let mut q = SVector::<f64, 7>::zeros();
    let base_omega = kin.base_rotation * kin.u.fixed_rows::<3>(3);
    let hip_rate = kin.u[6];
    for b in &kin.bodies {
        let mass = b.props.mass;
        m += mass * b.j_lin.transpose() * b.j_lin + b.j_ang.transpose() * b.inertia_world * b.j_ang;
        // velocity-product accelerations (J̇ u)
        let alpha_bias = base_omega.cross(&(0.5 * b.sign * hip_rate * kin.hip_axis));
        let accel_bias = alpha_bias.cross(&b.cg_offset) + b.omega.cross(&b.omega.cross(&b.cg_offset));
        let force = mass * (Vector3::new(0.0, 0.0, -GRAVITY) - accel_bias);
        let torque = -(b.inertia_world * alpha_bias) - b.omega.cross(&(b.inertia_world * b.omega));
        q += b.j_lin.transpose() * force + b.j_ang.transpose() * torque;
    }
    (m, q)
}

/// Contacts evaluated at a state together with the resulting accelerations.
pub struct Evaluation {
    pub accelerations: Accelerations,
    pub contacts: [Option<ContactPoint>; 2],
}

pub fn evaluate(
    state: &WalkerState,
    hip_torque: f64,
    params: &WalkerParams,
) -> Result<Evaluation, DynamicsError> {
    let kin = Kinematics::new(state, params);
    let (mass, mut q) = mass_and_bias(&kin);
    let (contacts, q_contact) = contact_forces(state, &kin, params);
    q += q_contact;
    q[6] += hip_torque - params.hip_damping * state.hip_rate;
    let chol = Cholesky::new(mass).ok_or(DynamicsError::SingularMassMatrix)?;
    Ok(Evaluation {
        accelerations: Accelerations::from_vector(&chol.solve(&q)),
        contacts,
    })
}

/// Generalised accelerations under gravity, hip torque and foot contact.
pub fn forward_dynamics(
    state: &WalkerState,
    hip_torque: f64,
    params: &WalkerParams,
) -> Result<Accelerations, DynamicsError> {
    evaluate(state, hip_torque, params).map(|e| e.accelerations)
}

/// Joint-space mass matrix at a state.
pub fn mass_matrix(state: &WalkerState, params: &WalkerParams) -> SMatrix<f64, 7, 7> {
    mass_and_bias(&Kinematics::new(state, params)).0
}

/// World pose of each body frame (left, right).
pub fn body_poses(state: &WalkerState) -> [Isometry3<f64>; 2] {
    let half = 0.5 * state.hip_angle;
    let t = Translation3::from(state.base_position);
    [-1.0, 1.0].map(|sign: f64| {
        let rel = UnitQuaternion::from_axis_angle(&Vector3::y_axis(), sign * half);
        Isometry3::from_parts(t, state.base_orientation * rel)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub gravitational: f64,
    pub elastic: f64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.kinetic + self.gravitational + self.elastic
    }
}

/// Kinetic, gravitational (floor as datum) and contact-spring energy.
pub fn mechanical_energy(state: &WalkerState, params: &WalkerParams) -> EnergyBreakdown {
    let kin = Kinematics::new(state, params);
    let mut kinetic = 0.0;
    let mut gravitational = 0.0;
    let mut elastic = 0.0;
    for (b, pose) in kin.bodies.iter().zip(body_poses(state)) {
        let m = b.props.mass;
        kinetic += 0.5 * m * b.cg_velocity.norm_squared() + 0.5 * b.omega.dot(&(b.inertia_world * b.omega));
        gravitational += m * GRAVITY * (state.base_position.z + b.cg_offset.z);
        let (_, gap) = foot_lowest_point(b.foot, &pose);
        if gap < 0.0 {
            elastic += 0.5 * params.material.normal_stiffness * gap * gap;
        }
    }
    EnergyBreakdown { kinetic, gravitational, elastic }
}

/// Whole-robot CG position and velocity, world frame.
pub fn center_of_mass(state: &WalkerState, params: &WalkerParams) -> (Vector3<f64>, Vector3<f64>) {
    let kin = Kinematics::new(state, params);
    let total = params.total_mass();
    let mut pos = Vector3::zeros();
    let mut vel = Vector3::zeros();
    for b in &kin.bodies {
        pos += b.props.mass * (state.base_position + b.cg_offset);
        vel += b.props.mass * b.cg_velocity;
    }
    (pos / total, vel / total)
}

/// Angular momentum about the whole-robot CG, world frame.
pub fn angular_momentum(state: &WalkerState, params: &WalkerParams) -> Vector3<f64> {
    let kin = Kinematics::new(state, params);
    let (cg, vcg) = center_of_mass(state, params);
    kin.bodies.iter().fold(Vector3::zeros(), |acc, b| {
        let r = state.base_position + b.cg_offset - cg;
        acc + b.inertia_world * b.omega + b.props.mass * r.cross(&(b.cg_velocity - vcg))
    })
}

/// Tilt of each body's vertical axis away from the world vertical (left, right).
pub fn body_tilts(state: &WalkerState) -> [f64; 2] {
    body_poses(state).map(|pose| {
        let down = pose.rotation * Vector3::z();
        down.z.clamp(-1.0, 1.0).acos()
    })
}
