//! Sphere-on-plane penalty contact with regularised Coulomb and torsional friction.

use nalgebra::{Isometry3, Point3, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::model::{ContactMaterial, FootSphere};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Foot {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactPoint {
    pub foot: Foot,
    pub world_point: Vector3<f64>,
    pub penetration: f64,
    pub normal_force: f64,
    pub tangential_force: Vector2<f64>,
    pub spin_torque: f64,
}

/// Lowest point of a foot sphere on a body placed at `body_pose`, and the
/// signed height of that point above the floor (negative when penetrating).
pub fn foot_lowest_point(foot: &FootSphere, body_pose: &Isometry3<f64>) -> (Vector3<f64>, f64) {
    let center = body_pose.transform_point(&Point3::from(foot.center_offset)).coords;
    let gap = center.z - foot.radius;
    (center - Vector3::z() * foot.radius, gap)
}

/// Force on the foot at the contact point (world frame) and torque about the
/// floor normal.
pub fn contact_wrench(
    gap: f64,
    point_velocity: &Vector3<f64>,
    spin_rate: f64,
    material: &ContactMaterial,
) -> (Vector3<f64>, f64) {
    if gap >= 0.0 {
        return (Vector3::zeros(), 0.0);
    }
    let normal = (material.normal_stiffness * -gap
        + material.normal_damping * (-point_velocity.z).max(0.0))
    .max(0.0);
    let slip = Vector2::new(point_velocity.x, point_velocity.y);
    let speed = slip.norm();
    let v_reg = material.slip_regularization_velocity;
    let tangential = if speed > 0.0 {
        -material.mu * normal * (speed / v_reg).tanh() / speed * slip
    } else {
        Vector2::zeros()
    };
    let r = material.spin_patch_radius;
    let spin = -material.mu * normal * r * (spin_rate * r / v_reg).tanh();
    (Vector3::new(tangential.x, tangential.y, normal), spin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::UnitQuaternion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn stock_foot() -> FootSphere {
        FootSphere {
            center_offset: Vector3::new(0.0, 0.016, 0.12),
            radius: 0.12,
        }
    }

    #[test]
    fn tangent_foot_at_identity() {
        let (p, gap) = foot_lowest_point(&stock_foot(), &Isometry3::identity());
        assert!((p - Vector3::new(0.0, 0.016, 0.0)).norm() < 1e-15);
        assert_eq!(gap, 0.0);
        let raised = Isometry3::translation(0.0, 0.0, 0.001);
        let (_, gap) = foot_lowest_point(&stock_foot(), &raised);
        assert!((gap - 0.001).abs() < 1e-15);
    }

    fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
        loop {
            let d = Vector3::new(
                rng.gen_range(-1.0..1.0f64),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = d.norm();
            if n > 1e-6 && n <= 1.0 {
                return d / n;
            }
        }
    }

    #[test]
    fn lowest_point_matches_surface_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let foot = stock_foot();
        for _ in 0..5 {
            let pose = Isometry3::from_parts(
                Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-0.2..0.2)).into(),
                UnitQuaternion::from_euler_angles(
                    rng.gen_range(-3.0..3.0),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-3.0..3.0),
                ),
            );
            let (p, gap) = foot_lowest_point(&foot, &pose);
            // brute force over body-frame surface samples, then local refinement
            let world = |dir: &Vector3<f64>| {
                pose.transform_point(&Point3::from(foot.center_offset + foot.radius * dir)).coords
            };
            let mut best_dir = Vector3::x();
            let mut best = world(&best_dir);
            for _ in 0..100_000 {
                let d = random_unit(&mut rng);
                let s = world(&d);
                if s.z < best.z {
                    best = s;
                    best_dir = d;
                }
            }
            let mut scale = 0.02;
            for _ in 0..6 {
                for _ in 0..5_000 {
                    let d = (best_dir + scale * random_unit(&mut rng)).normalize();
                    let s = world(&d);
                    if s.z < best.z {
                        best = s;
                        best_dir = d;
                    }
                }
                scale *= 0.1;
            }
            assert!((best.z - gap).abs() < 1e-6, "gap {gap} vs {}", best.z);
            assert!((best - p).norm() < 1e-6, "point {p:?} vs {best:?}");
        }
    }

    #[test]
    fn separation_gives_no_wrench() {
        let m = ContactMaterial::default();
        let (f, t) = contact_wrench(0.001, &Vector3::new(1.0, 0.0, -1.0), 3.0, &m);
        assert_eq!(f, Vector3::zeros());
        assert_eq!(t, 0.0);
    }

    #[test]
    fn static_penetration() {
        let m = ContactMaterial::default();
        let (f, t) = contact_wrench(-0.0005, &Vector3::zeros(), 0.0, &m);
        assert!((f.z - 10.0).abs() < 1e-12);
        assert_eq!(f.x, 0.0);
        assert_eq!(f.y, 0.0);
        assert_eq!(t, 0.0);
    }

    #[test]
    fn sliding_saturates_friction() {
        let m = ContactMaterial::default();
        let v = 10.0 * m.slip_regularization_velocity;
        let (f, _) = contact_wrench(-0.0005, &Vector3::new(0.6 * v, -0.8 * v, 0.0), 0.0, &m);
        let ratio = f.xy().norm() / (m.mu * f.z);
        assert!((0.99..=1.0).contains(&ratio), "{ratio}");
        // opposes slip
        assert!(f.x < 0.0 && f.y > 0.0);
    }

    #[test]
    fn spin_torque_opposes_spin() {
        let m = ContactMaterial::default();
        let (_, cw) = contact_wrench(-0.0005, &Vector3::zeros(), -2.0, &m);
        let (_, ccw) = contact_wrench(-0.0005, &Vector3::zeros(), 2.0, &m);
        assert!(cw > 0.0 && ccw < 0.0);
        assert!((cw + ccw).abs() < 1e-15);
        assert!(ccw.abs() <= m.mu * 10.0 * m.spin_patch_radius);
    }

    #[test]
    fn separating_velocity_is_not_sticky() {
        let m = ContactMaterial::default();
        let (f, _) = contact_wrench(-0.0001, &Vector3::new(0.0, 0.0, 5.0), 0.0, &m);
        assert!((f.z - 2.0).abs() < 1e-12);
    }
}
