use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::mass::{combine, BodyMassProperties};
use super::ModelError;
use crate::gait::ServoParams;

/// Spherical rolling surface of one foot.
///
/// `center_offset` is the centre of curvature in the owning body frame,
/// whose origin sits on the hip axis midpoint (x forward, y left, z up).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FootSphere {
    pub center_offset: Vector3<f64>,
    pub radius: f64,
}

impl FootSphere {
    /// Height of the lowest point of the sphere relative to the hip axis
    /// when the body is upright.
    pub fn sole_height(&self) -> f64 {
        self.center_offset.z - self.radius
    }
}

/// Penalty contact and friction constants for the foot-floor interface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactMaterial {
    pub normal_stiffness: f64,
    pub normal_damping: f64,
    pub mu: f64,
    pub spin_patch_radius: f64,
    pub slip_regularization_velocity: f64,
}

impl Default for ContactMaterial {
    fn default() -> Self {
        Self {
            normal_stiffness: 2.0e4,
            normal_damping: 50.0,
            mu: 0.8,
            spin_patch_radius: 0.005,
            slip_regularization_velocity: 1.0e-3,
        }
    }
}

impl ContactMaterial {
    /// Contact constants under which the stock walker settles into a
    /// regular alternating gait across the default sweep grid: heavier
    /// impact damping and a wider torsional patch than the defaults.
    pub fn calibrated() -> Self {
        Self {
            normal_damping: 350.0,
            spin_patch_radius: 0.03,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fields = [
            ("normal_stiffness", self.normal_stiffness),
            ("normal_damping", self.normal_damping),
            ("mu", self.mu),
            ("spin_patch_radius", self.spin_patch_radius),
            ("slip_regularization_velocity", self.slip_regularization_velocity),
        ];
        for (name, v) in fields {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ModelError::InvalidField {
                    field: format!("material.{name}"),
                    reason: "must be positive".into(),
                });
            }
        }
        if self.mu > 2.0 {
            return Err(ModelError::InvalidField {
                field: "material.mu".into(),
                reason: "must lie in (0, 2]".into(),
            });
        }
        Ok(())
    }
}

/// Full physical description of the two-body walker.
///
/// The hip axis offset and foot gap are not stored: they follow from the
/// foot centres (see [`WalkerParams::hip_axis_offset`] and
/// [`WalkerParams::foot_gap`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkerParams {
    pub left_body: BodyMassProperties,
    pub right_body: BodyMassProperties,
    pub left_foot: FootSphere,
    pub right_foot: FootSphere,
    pub total_height: f64,
    pub material: ContactMaterial,
    pub servo: ServoParams,
    /// Viscous friction in the hip bearings, N·m·s/rad.
    #[serde(default)]
    pub hip_damping: f64,
}

impl WalkerParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.left_body.validate()?;
        self.right_body.validate()?;
        for (name, foot) in [("left_foot", &self.left_foot), ("right_foot", &self.right_foot)] {
            if !(foot.radius > 0.0 && foot.radius.is_finite()) {
                return Err(ModelError::InvalidField {
                    field: format!("{name}.radius"),
                    reason: "must be positive".into(),
                });
            }
            if foot.center_offset.iter().any(|v| !v.is_finite()) {
                return Err(ModelError::InvalidField {
                    field: format!("{name}.center_offset"),
                    reason: "must be finite".into(),
                });
            }
        }
        let mismatch = (self.left_foot.sole_height() - self.right_foot.sole_height()).abs();
        if mismatch > 1e-9 {
            return Err(ModelError::InvalidField {
                field: "right_foot.center_offset".into(),
                reason: format!("feet must be tangent to the same plane (off by {mismatch:.3e} m)"),
            });
        }
        if !(self.total_height > 0.0) {
            return Err(ModelError::InvalidField {
                field: "total_height".into(),
                reason: "must be positive".into(),
            });
        }
        if !(self.hip_damping >= 0.0 && self.hip_damping.is_finite()) {
            return Err(ModelError::InvalidField {
                field: "hip_damping".into(),
                reason: "must be non-negative".into(),
            });
        }
        self.material.validate()?;
        self.servo.validate()?;
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let params: Self = serde_json::from_str(s).map_err(|e| ModelError::Parse(e.to_string()))?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json_str(&text).map_err(|e| match e {
            ModelError::Parse(msg) => ModelError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("walker params serialize")
    }

    pub fn total_mass(&self) -> f64 {
        self.left_body.mass + self.right_body.mass
    }

    /// Whole-robot mass properties in the reference stance (legs aligned,
    /// both body frames coincident).
    pub fn whole_body(&self) -> BodyMassProperties {
        combine(&[self.left_body.clone(), self.right_body.clone()])
    }

    /// Mean foot centre of curvature in the reference stance.
    pub fn foot_center(&self) -> Vector3<f64> {
        0.5 * (self.left_foot.center_offset + self.right_foot.center_offset)
    }

    /// Hip axis position relative to the foot centre of curvature
    /// (x holds h_x, z holds h_z).
    pub fn hip_axis_offset(&self) -> Vector3<f64> {
        let c = self.foot_center();
        Vector3::new(-c.x, 0.0, -c.z)
    }

    /// Vertical offset of the whole-robot CG from the foot centre of curvature.
    pub fn cg_offset_z(&self) -> f64 {
        self.whole_body().cg.z - self.foot_center().z
    }

    /// Signed lateral distance between foot centres; positive when the left
    /// foot centre lies on the left.
    pub fn foot_gap(&self) -> f64 {
        self.left_foot.center_offset.y - self.right_foot.center_offset.y
    }

    pub fn foot_radius(&self) -> f64 {
        0.5 * (self.left_foot.radius + self.right_foot.radius)
    }

    /// Hip axis height above the floor in the reference stance.
    pub fn hip_height(&self) -> f64 {
        -self.left_foot.sole_height()
    }

    /// Reflection of the walker through its sagittal plane.
    pub fn mirrored(&self) -> Self {
        let flip = |f: &FootSphere| FootSphere {
            center_offset: Vector3::new(f.center_offset.x, -f.center_offset.y, f.center_offset.z),
            radius: f.radius,
        };
        Self {
            left_body: self.right_body.mirrored_y(),
            right_body: self.left_body.mirrored_y(),
            left_foot: flip(&self.right_foot),
            right_foot: flip(&self.left_foot),
            ..self.clone()
        }
    }

    /// Translate both body CGs, keeping each inertia about its CG.
    pub fn with_cg_shift(&self, shift: Vector3<f64>) -> Self {
        let mut p = self.clone();
        p.left_body.cg += shift;
        p.right_body.cg += shift;
        p
    }

    /// Move both foot centres, keeping their radii.
    pub fn with_foot_shift(&self, left: Vector3<f64>, right: Vector3<f64>) -> Self {
        let mut p = self.clone();
        p.left_foot.center_offset += left;
        p.right_foot.center_offset += right;
        p
    }
}
