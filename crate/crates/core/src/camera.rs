//! Pinhole camera views: intrinsics plus a world→camera rigid pose.

use crate::error::CoreError;
use crate::geom::{Mat3, Quat, Vec3};
use serde::{Deserialize, Serialize};

/// Intrinsics `(fx, fy, cx, cy)` in pixels and a world→camera pose
/// (`x_cam = R x_world + t`), rotation stored as a scalar-last unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraView {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    /// World→camera rotation, scalar-last `[x, y, z, w]`.
    pub rotation: Quat,
    /// World→camera translation in meters.
    pub translation: Vec3,
}

impl CameraView {
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        rotation: Quat,
        translation: Vec3,
    ) -> Result<Self, CoreError> {
        if fx <= 0.0 || fy <= 0.0 {
            return Err(CoreError::domain("focal lengths must be positive"));
        }
        if (rotation.norm() - 1.0).abs() > 1e-9 {
            return Err(CoreError::domain("rotation quaternion must be unit-norm"));
        }
        Ok(CameraView { fx, fy, cx, cy, rotation, translation })
    }

    /// Pose looking from `eye` toward `target` with the given world-up hint.
    /// Camera `+y` points down in the image, so `-row_y` aligns with `up`.
    pub fn look_at(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        eye: Vec3,
        target: Vec3,
        up: Vec3,
    ) -> Result<Self, CoreError> {
        let forward = (target - eye).normalized();
        let right = up.cross(forward);
        if right.norm() < 1e-9 {
            return Err(CoreError::domain("look_at: view direction parallel to up"));
        }
        let right = right.normalized();
        let down = right.cross(forward).scale(-1.0);
        let rot = Mat3::from_rows(right, down, forward);
        let t = rot.mul_vec(eye).scale(-1.0);
        CameraView::new(fx, fy, cx, cy, rot.to_quat(), t)
    }

    /// World→camera rotation matrix.
    pub fn rotation_matrix(&self) -> Mat3 {
        self.rotation.to_mat3()
    }

    /// Camera center in world coordinates: `c = -R^T t`.
    pub fn center(&self) -> Vec3 {
        self.rotation_matrix().transpose().mul_vec(self.translation).scale(-1.0)
    }

    /// Map a world point into camera coordinates.
    pub fn world_to_camera(&self, p: Vec3) -> Vec3 {
        self.rotation.rotate(p) + self.translation
    }

    /// Map a camera-frame point back to world coordinates.
    pub fn camera_to_world(&self, p: Vec3) -> Vec3 {
        self.rotation.conjugate().rotate(p - self.translation)
    }

    /// Project a camera-frame point to pixel coordinates; `None` behind the
    /// camera.
    pub fn project_camera(&self, p: Vec3) -> Option<(f64, f64)> {
        if p.z <= 0.0 {
            return None;
        }
        Some((self.fx * p.x / p.z + self.cx, self.fy * p.y / p.z + self.cy))
    }

    /// Camera-frame ray direction through pixel-center `(x + 0.5, y + 0.5)`,
    /// unnormalized with `z = 1`.
    pub fn pixel_ray(&self, x: usize, y: usize) -> Vec3 {
        Vec3::new(
            (x as f64 + 0.5 - self.cx) / self.fx,
            (y as f64 + 0.5 - self.cy) / self.fy,
            1.0,
        )
    }

    /// Lift a pixel with known depth (camera-frame z) to world coordinates.
    pub fn lift_pixel(&self, x: usize, y: usize, depth: f64) -> Vec3 {
        let r = self.pixel_ray(x, y);
        self.camera_to_world(r.scale(depth))
    }

    /// Camera forward axis (optical axis) in world coordinates.
    pub fn forward_world(&self) -> Vec3 {
        self.rotation_matrix().row(2)
    }
}
