//! Depth-supported covisibility between calibrated views.

use crate::types::{AnnotatedView, ViewPair};
use crate::QaError;
use murk_core::{CameraView, DepthMap};

/// Default relative depth-association tolerance.
pub const DEFAULT_DEPTH_TOL: f64 = 0.03;

/// Fraction of valid pixels of `a` whose 3D lift reprojects into `b` within
/// frame and agrees with `b`'s stored depth to `depth_tol` (relative).
pub fn covisibility(
    a: (&CameraView, &DepthMap),
    b: (&CameraView, &DepthMap),
    depth_tol: f64,
) -> Result<f64, QaError> {
    let (cam_a, depth_a) = a;
    let (cam_b, depth_b) = b;
    let (w, h) = (depth_a.width(), depth_a.height());
    let (wb, hb) = (depth_b.width(), depth_b.height());
    let mut valid = 0u64;
    let mut consistent = 0u64;
    for y in 0..h {
        for x in 0..w {
            let d = depth_a.at(x, y);
            if d <= 0.0 {
                continue;
            }
            valid += 1;
            let world = cam_a.lift_pixel(x, y, d);
            let cam = cam_b.world_to_camera(world);
            let Some((u, v)) = cam_b.project_camera(cam) else {
                continue;
            };
            if u < 0.0 || v < 0.0 || u >= wb as f64 || v >= hb as f64 {
                continue;
            }
            let db = depth_b.at(u as usize, v as usize);
            if db > 0.0 && (cam.z - db).abs() <= depth_tol * db {
                consistent += 1;
            }
        }
    }
    if valid == 0 {
        return Err(QaError::domain("source view has no valid depth"));
    }
    Ok(consistent as f64 / valid as f64)
}

/// Pair-sampling thresholds.
#[derive(Debug, Clone, Copy)]
pub struct PairConstraints {
    pub min_covisibility: f64,
    pub min_baseline: f64,
    pub min_rotation_deg: f64,
    pub depth_tol: f64,
}

impl Default for PairConstraints {
    fn default() -> Self {
        PairConstraints {
            min_covisibility: 0.2,
            min_baseline: 0.5,
            min_rotation_deg: 5.0,
            depth_tol: DEFAULT_DEPTH_TOL,
        }
    }
}

/// All view pairs passing the covisibility floor, with baseline and relative
/// rotation attached (per-question minimums are applied downstream). The
/// stored covisibility is the minimum over both reprojection directions.
pub fn sample_view_pairs(
    views: &[AnnotatedView],
    constraints: &PairConstraints,
) -> Result<Vec<ViewPair>, QaError> {
    let mut pairs = Vec::new();
    for i in 0..views.len() {
        for j in (i + 1)..views.len() {
            let (va, vb) = (&views[i], &views[j]);
            let (Some(da), Some(db)) = (&va.depth, &vb.depth) else {
                continue;
            };
            let ab = covisibility((&va.camera, da), (&vb.camera, db), constraints.depth_tol)?;
            let ba = covisibility((&vb.camera, db), (&va.camera, da), constraints.depth_tol)?;
            let covis = ab.min(ba);
            if covis < constraints.min_covisibility {
                continue;
            }
            let baseline = (va.camera.center() - vb.camera.center()).norm();
            let rot_deg = va
                .camera
                .rotation
                .angle_between(vb.camera.rotation)
                .to_degrees();
            pairs.push(ViewPair {
                view_a: va.id.clone(),
                view_b: vb.id.clone(),
                covisibility: covis,
                baseline,
                relative_rotation_deg: rot_deg,
            });
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use murk_core::{Quat, Vec3};

    fn frontal_view_with_plane(
        eye: Vec3,
        target: Vec3,
        w: usize,
        h: usize,
        plane_z: f64,
    ) -> (CameraView, DepthMap) {
        let cam = CameraView::look_at(
            80.0,
            80.0,
            w as f64 / 2.0,
            h as f64 / 2.0,
            eye,
            target,
            Vec3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        // Depth of the z = plane_z wall in this camera: camera-frame z of the
        // ray hit; for a camera looking along +z it is (plane_z - eye.z).
        let mut depth = DepthMap::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                let ray = cam.pixel_ray(x, y);
                let dir_w = cam.rotation_matrix().transpose().mul_vec(ray);
                if dir_w.z.abs() < 1e-12 {
                    continue;
                }
                let t = (plane_z - eye.z) / dir_w.z;
                if t > 0.0 {
                    depth.set(x, y, t * ray.z); // camera z of hit (ray.z = 1)
                }
            }
        }
        (cam, depth)
    }

    #[test]
    fn self_pair_is_fully_covisible() {
        let (cam, depth) = frontal_view_with_plane(
            Vec3::ZERO,
            Vec3::new(0.0, 0.0, 3.0),
            32,
            24,
            3.0,
        );
        let c = covisibility((&cam, &depth), (&cam, &depth), DEFAULT_DEPTH_TOL).unwrap();
        assert!((c - 1.0).abs() < 1e-6, "covis {c}");
    }

    #[test]
    fn opposite_facing_views_share_nothing() {
        let (cam_a, depth_a) = frontal_view_with_plane(
            Vec3::ZERO,
            Vec3::new(0.0, 0.0, 3.0),
            32,
            24,
            3.0,
        );
        // Camera B behind the plane, looking away (-z).
        let cam_b = CameraView::look_at(
            80.0,
            80.0,
            16.0,
            12.0,
            Vec3::new(0.0, 0.0, 10.0),
            Vec3::new(0.0, 0.0, 20.0),
            Vec3::new(0.0, 1.0, 0.0),
        )
        .unwrap();
        let depth_b = DepthMap::filled(32, 24, 4.0);
        let c = covisibility((&cam_a, &depth_a), (&cam_b, &depth_b), DEFAULT_DEPTH_TOL).unwrap();
        assert_eq!(c, 0.0);
    }

    #[test]
    fn no_valid_depth_is_an_error() {
        let cam = CameraView::new(80.0, 80.0, 16.0, 12.0, Quat::IDENTITY, Vec3::ZERO).unwrap();
        let empty = DepthMap::zeros(32, 24);
        assert!(covisibility((&cam, &empty), (&cam, &empty), DEFAULT_DEPTH_TOL).is_err());
    }

    #[test]
    fn shifted_view_gives_partial_overlap() {
        let (cam_a, depth_a) = frontal_view_with_plane(
            Vec3::ZERO,
            Vec3::new(0.0, 0.0, 3.0),
            64,
            48,
            3.0,
        );
        let (cam_b, depth_b) = frontal_view_with_plane(
            Vec3::new(1.5, 0.0, 0.0),
            Vec3::new(1.5, 0.0, 3.0),
            64,
            48,
            3.0,
        );
        let c = covisibility((&cam_a, &depth_a), (&cam_b, &depth_b), DEFAULT_DEPTH_TOL).unwrap();
        assert!(c > 0.1 && c < 0.9, "covis {c}");
    }

    #[test]
    fn pair_sampling_applies_covisibility_floor() {
        let (cam_a, depth_a) = frontal_view_with_plane(
            Vec3::ZERO,
            Vec3::new(0.0, 0.0, 3.0),
            32,
            24,
            3.0,
        );
        let (cam_b, depth_b) = frontal_view_with_plane(
            Vec3::new(0.8, 0.0, 0.0),
            Vec3::new(0.8, 0.0, 3.0),
            32,
            24,
            3.0,
        );
        let views = vec![
            AnnotatedView { id: "a".into(), camera: cam_a, depth: Some(depth_a) },
            AnnotatedView { id: "b".into(), camera: cam_b, depth: Some(depth_b) },
        ];
        let pairs = sample_view_pairs(&views, &PairConstraints::default()).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].baseline - 0.8).abs() < 1e-9);

        let strict = PairConstraints { min_covisibility: 0.99, ..Default::default() };
        assert!(sample_view_pairs(&views, &strict).unwrap().is_empty());
    }
}
