//! Rigid-body mass properties composed from simple primitives.
//!
//! Every primitive is described in its own local frame and placed in the
//! owning body frame by a rigid pose. Composition is exact (closed-form
//! primitive inertias plus the parallel-axis theorem); the Monte-Carlo
//! estimator in [`mass_properties_oracle`] exists to cross-check it.

use nalgebra::{Isometry3, Matrix3, Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::ModelError;

/// Geometric primitive, expressed in its local frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Solid box centred on the local origin; `size` holds full edge lengths.
    Box { size: Vector3<f64> },
    /// Solid cylinder centred on the local origin, axis along local z.
    Cylinder { radius: f64, length: f64 },
    /// Bottom cap of a solid sphere centred on the local origin: the part of
    /// the ball with `z <= -radius + height`.
    SphereCap { radius: f64, height: f64 },
    PointMass,
}

/// How much material a primitive holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassSpec {
    Mass(f64),
    Density(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Primitive {
    pub shape: Shape,
    pub pose: Isometry3<f64>,
    pub mass: MassSpec,
}

impl Primitive {
    pub fn new(shape: Shape, translation: Vector3<f64>, mass: MassSpec) -> Self {
        Self {
            shape,
            pose: Isometry3::translation(translation.x, translation.y, translation.z),
            mass,
        }
    }

    pub fn point(mass: f64, at: Vector3<f64>) -> Self {
        Self::new(Shape::PointMass, at, MassSpec::Mass(mass))
    }

    /// Mirror image about the body x-z plane (y -> -y).
    pub fn mirrored_y(&self) -> Self {
        let t = self.pose.translation.vector;
        let q = self.pose.rotation;
        // Reflection conjugation of a rotation about the x-z plane flips the
        // x and z quaternion components.
        let rot = nalgebra::UnitQuaternion::new_normalize(nalgebra::Quaternion::new(
            q.w, -q.i, q.j, -q.k,
        ));
        Self {
            shape: self.shape.clone(),
            pose: Isometry3::from_parts(Vector3::new(t.x, -t.y, t.z).into(), rot),
            mass: self.mass,
        }
    }

    fn volume(&self) -> f64 {
        match self.shape {
            Shape::Box { size } => size.x * size.y * size.z,
            Shape::Cylinder { radius, length } => PI * radius * radius * length,
            Shape::SphereCap { radius, height } => {
                PI * height * height * (3.0 * radius - height) / 3.0
            }
            Shape::PointMass => 0.0,
        }
    }

    fn validate(&self, index: usize) -> Result<(), ModelError> {
        let bad = |reason: &str| ModelError::InvalidPrimitive {
            index,
            reason: reason.to_string(),
        };
        match self.shape {
            Shape::Box { size } if !(size.x > 0.0 && size.y > 0.0 && size.z > 0.0) => {
                return Err(bad("box edges must be positive"))
            }
            Shape::Cylinder { radius, length } if !(radius > 0.0 && length > 0.0) => {
                return Err(bad("cylinder radius and length must be positive"))
            }
            Shape::SphereCap { radius, height } if !(radius > 0.0 && height > 0.0 && height <= 2.0 * radius) => {
                return Err(bad("cap height must lie in (0, 2r]"))
            }
            Shape::PointMass if matches!(self.mass, MassSpec::Density(_)) => {
                return Err(bad("a point mass needs an explicit mass"))
            }
            _ => {}
        }
        let m = self.resolved_mass();
        if !(m > 0.0 && m.is_finite()) {
            return Err(ModelError::NonPositiveMass { index });
        }
        Ok(())
    }

    fn resolved_mass(&self) -> f64 {
        match self.mass {
            MassSpec::Mass(m) => m,
            MassSpec::Density(rho) => rho * self.volume(),
        }
    }

    /// Local centroid and inertia about that centroid (local axes).
    fn local_properties(&self, m: f64) -> (Vector3<f64>, Matrix3<f64>) {
        match self.shape {
            Shape::Box { size } => {
                let (a2, b2, c2) = (size.x * size.x, size.y * size.y, size.z * size.z);
                let k = m / 12.0;
                (
                    Vector3::zeros(),
                    Matrix3::from_diagonal(&Vector3::new(k * (b2 + c2), k * (a2 + c2), k * (a2 + b2))),
                )
            }
            Shape::Cylinder { radius, length } => {
                let r2 = radius * radius;
                let side = m * (3.0 * r2 + length * length) / 12.0;
                (
                    Vector3::zeros(),
                    Matrix3::from_diagonal(&Vector3::new(side, side, 0.5 * m * r2)),
                )
            }
            Shape::SphereCap { radius, height } => sphere_cap_properties(radius, height, m),
            Shape::PointMass => (Vector3::zeros(), Matrix3::zeros()),
        }
    }

    /// Axis-aligned local bounding box used by the sampling oracle.
    fn local_bounds(&self) -> (Vector3<f64>, Vector3<f64>) {
        match self.shape {
            Shape::Box { size } => (-0.5 * size, 0.5 * size),
            Shape::Cylinder { radius, length } => (
                Vector3::new(-radius, -radius, -0.5 * length),
                Vector3::new(radius, radius, 0.5 * length),
            ),
            Shape::SphereCap { radius, height } => {
                let top = -radius + height;
                let half = if top >= 0.0 {
                    radius
                } else {
                    (radius * radius - top * top).sqrt()
                };
                (
                    Vector3::new(-half, -half, -radius),
                    Vector3::new(half, half, top),
                )
            }
            Shape::PointMass => (Vector3::zeros(), Vector3::zeros()),
        }
    }

    fn contains_local(&self, p: &Vector3<f64>) -> bool {
        match self.shape {
            Shape::Box { size } => {
                p.x.abs() <= 0.5 * size.x && p.y.abs() <= 0.5 * size.y && p.z.abs() <= 0.5 * size.z
            }
            Shape::Cylinder { radius, length } => {
                p.x * p.x + p.y * p.y <= radius * radius && p.z.abs() <= 0.5 * length
            }
            Shape::SphereCap { radius, height } => {
                p.norm_squared() <= radius * radius && p.z <= -radius + height
            }
            Shape::PointMass => true,
        }
    }
}

/// Disc-integration closed form for the bottom cap `z in [-R, -R + h]` of a
/// ball of radius `R` centred at the origin.
fn sphere_cap_properties(radius: f64, height: f64, m: f64) -> (Vector3<f64>, Matrix3<f64>) {
    let r2 = radius * radius;
    let (z0, z1) = (-radius, -radius + height);
    let span = |f: &dyn Fn(f64) -> f64| f(z1) - f(z0);
    // integrals of a^2, a^2 z, a^4 and a^2 z^2 where a^2 = R^2 - z^2
    let vol = span(&|z| r2 * z - z.powi(3) / 3.0);
    let first = span(&|z| r2 * z * z / 2.0 - z.powi(4) / 4.0);
    let quartic = span(&|z| r2 * r2 * z - 2.0 * r2 * z.powi(3) / 3.0 + z.powi(5) / 5.0);
    let second = span(&|z| r2 * z.powi(3) / 3.0 - z.powi(5) / 5.0);

    let zc = first / vol;
    let per_vol = m / vol;
    let axial = per_vol * 0.5 * quartic;
    let transverse_origin = per_vol * (0.25 * quartic + second);
    let transverse = transverse_origin - m * zc * zc;
    (
        Vector3::new(0.0, 0.0, zc),
        Matrix3::from_diagonal(&Vector3::new(transverse, transverse, axial)),
    )
}

/// Mass, centre of gravity and inertia about the CG, all in the body frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyMassProperties {
    pub mass: f64,
    pub cg: Vector3<f64>,
    pub inertia: Matrix3<f64>,
}

impl BodyMassProperties {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(ModelError::InvalidBody("mass must be positive".into()));
        }
        if self.cg.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidBody("cg must be finite".into()));
        }
        let asym = (self.inertia - self.inertia.transpose()).abs().max();
        if asym > 1e-12 * self.inertia.abs().max().max(1e-300) {
            return Err(ModelError::InvalidBody("inertia must be symmetric".into()));
        }
        let eig = self.inertia.symmetric_eigen().eigenvalues;
        if eig.iter().any(|&l| !(l > 0.0)) {
            return Err(ModelError::InvalidBody(
                "inertia must be positive definite".into(),
            ));
        }
        let tol = 1e-12 * eig.max();
        let (a, b, c) = (eig[0], eig[1], eig[2]);
        if a + b < c - tol || a + c < b - tol || b + c < a - tol {
            return Err(ModelError::InvalidBody(
                "principal moments violate the triangle inequality".into(),
            ));
        }
        Ok(())
    }

    /// Same body reflected through the x-z plane.
    pub fn mirrored_y(&self) -> Self {
        let s = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0));
        Self {
            mass: self.mass,
            cg: Vector3::new(self.cg.x, -self.cg.y, self.cg.z),
            inertia: s * self.inertia * s,
        }
    }

    /// Inertia about an arbitrary point `p` (same axes).
    pub fn inertia_about(&self, p: &Vector3<f64>) -> Matrix3<f64> {
        self.inertia + parallel_axis(self.mass, &(self.cg - p))
    }
}

fn parallel_axis(m: f64, d: &Vector3<f64>) -> Matrix3<f64> {
    m * (Matrix3::identity() * d.norm_squared() - d * d.transpose())
}

/// Exact composite mass properties of a list of primitives.
pub fn compose_body(primitives: &[Primitive]) -> Result<BodyMassProperties, ModelError> {
    if primitives.is_empty() {
        return Err(ModelError::EmptyBody);
    }
    let mut parts = Vec::with_capacity(primitives.len());
    for (i, p) in primitives.iter().enumerate() {
        p.validate(i)?;
        let m = p.resolved_mass();
        let (c_local, i_local) = p.local_properties(m);
        let rot = p.pose.rotation.to_rotation_matrix();
        let cg = p.pose.transform_point(&Point3::from(c_local)).coords;
        parts.push(BodyMassProperties {
            mass: m,
            cg,
            inertia: rot.matrix() * i_local * rot.matrix().transpose(),
        });
    }
    Ok(combine(&parts))
}

/// Sum of already-composed bodies expressed in a common frame.
pub fn combine(parts: &[BodyMassProperties]) -> BodyMassProperties {
    let mass: f64 = parts.iter().map(|p| p.mass).sum();
    let cg = parts.iter().fold(Vector3::zeros(), |acc, p| acc + p.mass * p.cg) / mass;
    let inertia = parts.iter().fold(Matrix3::zeros(), |acc, p| {
        acc + p.inertia + parallel_axis(p.mass, &(p.cg - cg))
    });
    BodyMassProperties {
        mass,
        cg,
        inertia: 0.5 * (inertia + inertia.transpose()),
    }
}

/// Minimum sample count accepted by [`mass_properties_oracle`].
pub const MIN_ORACLE_SAMPLES: usize = 100_000;

/// Monte-Carlo estimate of the same quantities [`compose_body`] computes.
///
/// Each volumetric primitive is rejection-sampled inside its local bounding
/// box with `n_samples` uniform draws; point masses contribute exactly. Only
/// shape membership tests are used, never the closed-form inertias.
pub fn mass_properties_oracle(
    primitives: &[Primitive],
    n_samples: usize,
    seed: u64,
) -> Result<BodyMassProperties, ModelError> {
    if primitives.is_empty() {
        return Err(ModelError::EmptyBody);
    }
    if n_samples < MIN_ORACLE_SAMPLES {
        return Err(ModelError::TooFewSamples(n_samples));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    let mut first = Vector3::zeros();
    let mut second = Matrix3::zeros();

    for (i, p) in primitives.iter().enumerate() {
        p.validate(i)?;
        let mut accumulate = |w: f64, x: Vector3<f64>| {
            total += w;
            first += w * x;
            second += w * x * x.transpose();
        };
        if p.shape == Shape::PointMass {
            accumulate(p.resolved_mass(), p.pose.translation.vector);
            continue;
        }
        let (lo, hi) = p.local_bounds();
        let span = hi - lo;
        let mut inside = Vec::new();
        for _ in 0..n_samples {
            let u = Vector3::new(rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>());
            let local = lo + span.component_mul(&u);
            if p.contains_local(&local) {
                inside.push(local);
            }
        }
        if inside.is_empty() {
            return Err(ModelError::InvalidPrimitive {
                index: i,
                reason: "no samples landed inside the shape".into(),
            });
        }
        let mass = match p.mass {
            MassSpec::Mass(m) => m,
            MassSpec::Density(rho) => {
                rho * span.x * span.y * span.z * inside.len() as f64 / n_samples as f64
            }
        };
        let w = mass / inside.len() as f64;
        for local in inside {
            accumulate(w, p.pose.transform_point(&Point3::from(local)).coords);
        }
    }

    let cg = first / total;
    // second moment tensor S = sum w x x^T; inertia about origin = tr(S) I - S
    let about_origin = Matrix3::identity() * second.trace() - second;
    let inertia = about_origin - parallel_axis(total, &cg);
    Ok(BodyMassProperties {
        mass: total,
        cg,
        inertia: 0.5 * (inertia + inertia.transpose()),
    })
}
