//! Hand poses, pose error metrics and relative grasp transforms.
//!
//! Quaternions are scalar-first `(w, x, y, z)` everywhere they cross a file or
//! API boundary. Positions are meters.

use std::fmt;

use nalgebra::{Quaternion, UnitQuaternion};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Vec3;

/// Largest accepted deviation of a quaternion norm from 1 before it is renormalized.
pub const QUATERNION_NORM_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PoseError {
    #[error("quaternion norm {norm} deviates from 1 by more than {QUATERNION_NORM_TOLERANCE}")]
    NonUnitQuaternion { norm: f64 },
    #[error("initial and desired positions coincide; percentage error is undefined")]
    DegenerateTask,
    #[error("pose has a non-finite component")]
    NonFinite,
    #[error("pose needs 7 numbers [x, y, z, qw, qx, qy, qz], got {0}")]
    WrongLength(usize),
}

/// Scalar-first quaternion `(w, x, y, z)` to a unit quaternion, renormalizing small drift.
pub fn unit_quaternion(wxyz: [f64; 4]) -> Result<UnitQuaternion<f64>, PoseError> {
    if wxyz.iter().any(|c| !c.is_finite()) {
        return Err(PoseError::NonFinite);
    }
    let q = Quaternion::new(wxyz[0], wxyz[1], wxyz[2], wxyz[3]);
    let norm = q.norm();
    if (norm - 1.0).abs() > QUATERNION_NORM_TOLERANCE {
        return Err(PoseError::NonUnitQuaternion { norm });
    }
    Ok(UnitQuaternion::new_normalize(q))
}

/// Scalar-first components of a quaternion.
pub fn wxyz(q: &UnitQuaternion<f64>) -> [f64; 4] {
    [q.w, q.i, q.j, q.k]
}

/// Hand pose relative to the object frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub orientation: UnitQuaternion<f64>,
}

impl Pose {
    pub fn new(position: Vec3, orientation: UnitQuaternion<f64>) -> Self {
        Self { position, orientation }
    }

    pub fn identity() -> Self {
        Self::new(Vec3::zeros(), UnitQuaternion::identity())
    }

    /// `[x, y, z, qw, qx, qy, qz]`; the quaternion is renormalized if within tolerance.
    pub fn from_array(a: [f64; 7]) -> Result<Self, PoseError> {
        if a[..3].iter().any(|c| !c.is_finite()) {
            return Err(PoseError::NonFinite);
        }
        Ok(Self::new(
            Vec3::new(a[0], a[1], a[2]),
            unit_quaternion([a[3], a[4], a[5], a[6]])?,
        ))
    }

    pub fn from_slice(a: &[f64]) -> Result<Self, PoseError> {
        let arr: [f64; 7] = a.try_into().map_err(|_| PoseError::WrongLength(a.len()))?;
        Self::from_array(arr)
    }

    pub fn to_array(&self) -> [f64; 7] {
        let q = wxyz(&self.orientation);
        [self.position.x, self.position.y, self.position.z, q[0], q[1], q[2], q[3]]
    }

    /// Maps a point from this pose's local frame into the parent frame.
    pub fn transform_point(&self, p: &crate::Point3) -> crate::Point3 {
        crate::Point3::from(self.orientation * p.coords + self.position)
    }

    pub fn as_transform(&self) -> RigidTransform {
        RigidTransform {
            rotation: self.orientation,
            translation: self.position,
        }
    }
}

impl fmt::Display for Pose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.to_array();
        write!(
            f,
            "[{}, {}, {}, {}, {}, {}, {}]",
            a[0], a[1], a[2], a[3], a[4], a[5], a[6]
        )
    }
}

impl Serialize for Pose {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        Pose::from_slice(&values).map_err(serde::de::Error::custom)
    }
}

/// Rigid transform `x ↦ R x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: UnitQuaternion::identity(),
            translation: Vec3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let inv = self.rotation.inverse();
        RigidTransform {
            rotation: inv,
            translation: -(inv * self.translation),
        }
    }

    pub fn transform_point(&self, p: &crate::Point3) -> crate::Point3 {
        crate::Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn as_pose(&self) -> Pose {
        Pose::new(self.translation, self.rotation)
    }
}

/// `T = H_d · H_i⁻¹`, the transform taking `h_i` to `h_d`.
pub fn relative_transform(h_i: &Pose, h_d: &Pose) -> RigidTransform {
    h_d.as_transform().compose(&h_i.as_transform().inverse())
}

/// `T · H`: adapts a grasp expressed for one initial pose to another.
pub fn apply_transform(t: &RigidTransform, h: &Pose) -> Pose {
    t.compose(&h.as_transform()).as_pose()
}

/// `‖s_d − s_r‖₂` in meters.
pub fn position_error(s_d: &Vec3, s_r: &Vec3) -> f64 {
    (s_d - s_r).norm()
}

/// `100 · ‖s_d − s_r‖ / ‖s_d − s_i‖`. May exceed 100.
pub fn position_error_pct(s_i: &Vec3, s_d: &Vec3, s_r: &Vec3) -> Result<f64, PoseError> {
    let span = (s_d - s_i).norm();
    if span == 0.0 {
        return Err(PoseError::DegenerateTask);
    }
    Ok(100.0 * (s_d - s_r).norm() / span)
}

/// `100 · min(‖q_d − q_r‖, ‖q_d + q_r‖) / √2` over unit quaternions, in `[0, 100]`.
pub fn orientation_error_pct(q_d: &UnitQuaternion<f64>, q_r: &UnitQuaternion<f64>) -> f64 {
    let a = q_d.quaternion();
    let b = q_r.quaternion();
    let minus = (a - b).norm();
    let plus = (a + b).norm();
    (100.0 * minus.min(plus) / std::f64::consts::SQRT_2).min(100.0)
}

/// [`orientation_error_pct`] on raw scalar-first quaternions, validating their norms.
pub fn orientation_error_pct_wxyz(q_d: [f64; 4], q_r: [f64; 4]) -> Result<f64, PoseError> {
    Ok(orientation_error_pct(&unit_quaternion(q_d)?, &unit_quaternion(q_r)?))
}
