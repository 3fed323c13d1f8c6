//! Primary-ray casting and shading.

use crate::scene::{Primitive, Scene, Shape};
use crate::RenderError;
use murk_core::{slerp, CameraView, DepthMap, LinearImage, RenderOutput, Renderer, Vec3};
use rayon::prelude::*;

const T_MIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub struct RenderRequest {
    pub view: CameraView,
    pub width: usize,
    pub height: usize,
}

impl RenderRequest {
    pub fn new(view: CameraView, width: usize, height: usize) -> Result<Self, RenderError> {
        if width < 8 || height < 8 {
            return Err(RenderError::domain("render size must be at least 8x8"));
        }
        Ok(RenderRequest { view, width, height })
    }
}

struct Hit {
    /// Ray parameter; equals camera-frame depth because rays use an
    /// unnormalized direction with camera z = 1.
    t: f64,
    normal: Vec3,
    uv: (f64, f64),
}

fn intersect(shape: &Shape, origin: Vec3, dir: Vec3) -> Option<Hit> {
    match shape {
        Shape::Plane { point, normal } => {
            let n = Vec3::from_array(*normal).normalized();
            let denom = dir.dot(n);
            if denom.abs() < 1e-12 {
                return None;
            }
            let t = (Vec3::from_array(*point) - origin).dot(n) / denom;
            if t <= T_MIN {
                return None;
            }
            let hit = origin + dir.scale(t);
            let (tu, tv) = plane_tangents(n);
            let rel = hit - Vec3::from_array(*point);
            Some(Hit { t, normal: n, uv: (rel.dot(tu), rel.dot(tv)) })
        }
        Shape::Sphere { center, radius } => {
            let c = Vec3::from_array(*center);
            let oc = origin - c;
            let a = dir.dot(dir);
            let b = 2.0 * oc.dot(dir);
            let cc = oc.dot(oc) - radius * radius;
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            let t = {
                let t0 = (-b - sq) / (2.0 * a);
                let t1 = (-b + sq) / (2.0 * a);
                if t0 > T_MIN {
                    t0
                } else if t1 > T_MIN {
                    t1
                } else {
                    return None;
                }
            };
            let hit = origin + dir.scale(t);
            let n = (hit - c).normalized();
            // Spherical surface coordinates scaled to meters.
            let u = n.z.atan2(n.x) * radius;
            let v = n.y.asin() * radius;
            Some(Hit { t, normal: n, uv: (u, v) })
        }
        Shape::AaBox { center, size } => {
            let c = Vec3::from_array(*center);
            let half = Vec3::new(size[0] * 0.5, size[1] * 0.5, size[2] * 0.5);
            let lo = c - half;
            let hi = c + half;
            let mut t_near = f64::NEG_INFINITY;
            let mut t_far = f64::INFINITY;
            let mut axis_near = 0usize;
            let o = origin.to_array();
            let d = dir.to_array();
            let lo_a = lo.to_array();
            let hi_a = hi.to_array();
            for axis in 0..3 {
                if d[axis].abs() < 1e-15 {
                    if o[axis] < lo_a[axis] || o[axis] > hi_a[axis] {
                        return None;
                    }
                    continue;
                }
                let mut t0 = (lo_a[axis] - o[axis]) / d[axis];
                let mut t1 = (hi_a[axis] - o[axis]) / d[axis];
                if t0 > t1 {
                    std::mem::swap(&mut t0, &mut t1);
                }
                if t0 > t_near {
                    t_near = t0;
                    axis_near = axis;
                }
                t_far = t_far.min(t1);
                if t_near > t_far {
                    return None;
                }
            }
            let t = if t_near > T_MIN {
                t_near
            } else if t_far > T_MIN {
                // Origin inside the box; use the exit face.
                axis_near = exit_axis(o, d, lo_a, hi_a);
                t_far
            } else {
                return None;
            };
            let hit = origin + dir.scale(t);
            let mut n = [0.0; 3];
            n[axis_near] = if d[axis_near] > 0.0 { -1.0 } else { 1.0 };
            let normal = Vec3::from_array(n);
            // Face-local coordinates: the two axes orthogonal to the face.
            let (a1, a2) = ((axis_near + 1) % 3, (axis_near + 2) % 3);
            let rel = hit - c;
            let rel_a = rel.to_array();
            Some(Hit { t, normal, uv: (rel_a[a1], rel_a[a2]) })
        }
    }
}

fn exit_axis(o: [f64; 3], d: [f64; 3], lo: [f64; 3], hi: [f64; 3]) -> usize {
    let mut best = 0;
    let mut best_t = f64::INFINITY;
    for axis in 0..3 {
        if d[axis].abs() < 1e-15 {
            continue;
        }
        let t = if d[axis] > 0.0 {
            (hi[axis] - o[axis]) / d[axis]
        } else {
            (lo[axis] - o[axis]) / d[axis]
        };
        if t < best_t {
            best_t = t;
            best = axis;
        }
    }
    best
}

/// Stable tangent basis for plane texturing.
fn plane_tangents(n: Vec3) -> (Vec3, Vec3) {
    let helper = if n.x.abs() < 0.9 {
        Vec3::new(1.0, 0.0, 0.0)
    } else {
        Vec3::new(0.0, 1.0, 0.0)
    };
    let tu = n.cross(helper).normalized();
    let tv = n.cross(tu);
    (tu, tv)
}

/// Render one frame: nearest-hit shading with `albedo * (ambient + lambert)`
/// plus constant emission, and camera-frame depth per pixel (0 = background).
pub fn render(scene: &Scene, req: &RenderRequest) -> Result<RenderOutput, RenderError> {
    scene.validate()?;
    let (w, h) = (req.width, req.height);
    if w < 8 || h < 8 {
        return Err(RenderError::domain("render size must be at least 8x8"));
    }
    let view = &req.view;
    let rot_t = view.rotation_matrix().transpose();
    let origin = view.center();
    let light = scene.light_dir_unit();

    let mut color = vec![0.0f64; w * h * 3];
    let mut depth = vec![0.0f64; w * h];

    color
        .par_chunks_mut(w * 3)
        .zip(depth.par_chunks_mut(w))
        .enumerate()
        .for_each(|(y, (crow, drow))| {
            for x in 0..w {
                // Unnormalized camera ray with z = 1 keeps t == depth.
                let dir_cam = view.pixel_ray(x, y);
                let dir = rot_t.mul_vec(dir_cam);
                let mut best: Option<(f64, usize, Hit)> = None;
                for (pi, prim) in scene.primitives.iter().enumerate() {
                    if let Some(hit) = intersect(&prim.shape, origin, dir) {
                        if best.as_ref().map_or(true, |(bt, _, _)| hit.t < *bt) {
                            best = Some((hit.t, pi, hit));
                        }
                    }
                }
                match best {
                    Some((t, pi, hit)) => {
                        let prim: &Primitive = &scene.primitives[pi];
                        let albedo = prim.texture.albedo(hit.uv.0, hit.uv.1);
                        // Double-sided shading: face the normal toward the ray.
                        let n = if hit.normal.dot(dir) > 0.0 {
                            hit.normal.scale(-1.0)
                        } else {
                            hit.normal
                        };
                        let lambert = n.dot(light).max(0.0);
                        let shade = scene.ambient + lambert;
                        for c in 0..3 {
                            crow[x * 3 + c] = (albedo[c] * shade + prim.emission).max(0.0);
                        }
                        drow[x] = t;
                    }
                    None => {
                        for c in 0..3 {
                            crow[x * 3 + c] = scene.background[c].max(0.0);
                        }
                        drow[x] = 0.0;
                    }
                }
            }
        });

    Ok(RenderOutput {
        color: LinearImage::new(w, h, color)?,
        depth: DepthMap::new(w, h, depth)?,
    })
}

/// Poses along the segment from `pose_start` to `pose_end` at
/// `t_i = i / (n - 1)` (a single start-pose frame when `n == 1`): rotation is
/// slerped, the camera center moves on the straight world-space line.
pub fn trajectory_poses(
    pose_start: &CameraView,
    pose_end: &CameraView,
    n: usize,
) -> Result<Vec<CameraView>, RenderError> {
    if n == 0 {
        return Err(RenderError::domain("trajectory needs at least one sub-step"));
    }
    let c0 = pose_start.center();
    let c1 = pose_end.center();
    let mut poses = Vec::with_capacity(n);
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let q = slerp(pose_start.rotation, pose_end.rotation, t)?;
        let c = c0.lerp(c1, t);
        let trans = q.to_mat3().mul_vec(c).scale(-1.0);
        poses.push(CameraView::new(
            pose_start.fx,
            pose_start.fy,
            pose_start.cx,
            pose_start.cy,
            q,
            trans,
        )?);
    }
    Ok(poses)
}

/// Render `n` frames along the interpolated trajectory, in order.
pub fn render_along_trajectory(
    scene: &Scene,
    pose_start: &CameraView,
    pose_end: &CameraView,
    n: usize,
    width: usize,
    height: usize,
) -> Result<Vec<RenderOutput>, RenderError> {
    let poses = trajectory_poses(pose_start, pose_end, n)?;
    poses
        .iter()
        .map(|p| render(scene, &RenderRequest { view: *p, width, height }))
        .collect()
}

impl Renderer for Scene {
    fn render_view(&self, view: &CameraView, width: usize, height: usize) -> RenderOutput {
        render(self, &RenderRequest { view: *view, width, height })
            .expect("render of a validated scene cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::Texture;
    use murk_core::Quat;

    fn plane_scene(z: f64) -> Scene {
        Scene {
            primitives: vec![Primitive {
                shape: Shape::Plane { point: [0.0, 0.0, z], normal: [0.0, 0.0, -1.0] },
                texture: Texture::Checker { cell: 0.3, seed: 3 },
                emission: 0.0,
            }],
            ambient: 0.3,
            background: [0.01, 0.01, 0.01],
            light_dir: [0.2, 0.5, -1.0],
            cameras: vec![],
        }
    }

    fn centered_view(w: usize, h: usize) -> CameraView {
        CameraView::new(
            120.0,
            120.0,
            w as f64 / 2.0,
            h as f64 / 2.0,
            Quat::IDENTITY,
            murk_core::Vec3::ZERO,
        )
        .unwrap()
    }

    #[test]
    fn frontal_plane_depth_is_analytic() {
        let scene = plane_scene(3.0);
        let view = centered_view(64, 48);
        let out = render(&scene, &RenderRequest { view, width: 64, height: 48 }).unwrap();
        for y in 0..48 {
            for x in 0..64 {
                assert!(
                    (out.depth.at(x, y) - 3.0).abs() < 1e-4,
                    "depth {} at ({x},{y})",
                    out.depth.at(x, y)
                );
            }
        }
    }

    #[test]
    fn moving_camera_toward_plane_reduces_depth() {
        let scene = plane_scene(3.0);
        let view = centered_view(64, 48);
        let moved = CameraView::new(
            view.fx,
            view.fy,
            view.cx,
            view.cy,
            Quat::IDENTITY,
            murk_core::Vec3::new(0.0, 0.0, -0.75), // camera center at z = +0.75
        )
        .unwrap();
        let a = render(&scene, &RenderRequest { view, width: 64, height: 48 }).unwrap();
        let b = render(&scene, &RenderRequest { view: moved, width: 64, height: 48 }).unwrap();
        for i in 0..a.depth.data().len() {
            assert!((a.depth.data()[i] - b.depth.data()[i] - 0.75).abs() < 1e-4);
        }
    }

    #[test]
    fn background_pixels_have_zero_depth_and_constant_color() {
        let mut scene = plane_scene(3.0);
        // Shrink the plane into a small box so most rays miss.
        scene.primitives[0].shape =
            Shape::AaBox { center: [0.0, 0.0, 3.0], size: [0.2, 0.2, 0.2] };
        let view = centered_view(32, 32);
        let out = render(&scene, &RenderRequest { view, width: 32, height: 32 }).unwrap();
        assert_eq!(out.depth.at(0, 0), 0.0);
        assert_eq!(out.color.pixel(0, 0), [0.01, 0.01, 0.01]);
        assert!(out.depth.at(16, 16) > 0.0);
    }

    #[test]
    fn render_is_bit_deterministic() {
        let scene = Scene::demo();
        let view = centered_view(48, 36);
        let a = render(&scene, &RenderRequest { view, width: 48, height: 36 }).unwrap();
        let b = render(&scene, &RenderRequest { view, width: 48, height: 36 }).unwrap();
        assert_eq!(a.color.data(), b.color.data());
        assert_eq!(a.depth.data(), b.depth.data());
    }

    #[test]
    fn trajectory_degenerate_and_endpoint_poses() {
        let scene = plane_scene(3.0);
        let v = centered_view(32, 32);
        let frames = render_along_trajectory(&scene, &v, &v, 5, 32, 32).unwrap();
        assert_eq!(frames.len(), 5);
        for f in &frames[1..] {
            assert_eq!(f.color.data(), frames[0].color.data());
        }

        let end = CameraView::new(
            v.fx,
            v.fy,
            v.cx,
            v.cy,
            Quat::IDENTITY,
            murk_core::Vec3::new(0.3, 0.0, 0.0),
        )
        .unwrap();
        let poses = trajectory_poses(&v, &end, 2).unwrap();
        assert!((poses[0].center() - v.center()).norm() < 1e-12);
        assert!((poses[1].center() - end.center()).norm() < 1e-12);
        assert!(trajectory_poses(&v, &end, 0).is_err());
    }

    #[test]
    fn trajectory_midpoint_is_half_rotation() {
        let v = centered_view(32, 32);
        let axis = murk_core::Vec3::new(0.0, 0.0, 1.0);
        let q_end = Quat::from_axis_angle(axis, std::f64::consts::FRAC_PI_2);
        let end = CameraView::new(v.fx, v.fy, v.cx, v.cy, q_end, murk_core::Vec3::ZERO).unwrap();
        let poses = trajectory_poses(&v, &end, 3).unwrap();
        let expect = Quat::from_axis_angle(axis, std::f64::consts::FRAC_PI_4);
        assert!(poses[1].rotation.dot(expect).abs() > 1.0 - 1e-12);
    }

    #[test]
    fn box_faces_shade_and_texture() {
        let scene = Scene::demo();
        let view = centered_view(64, 64);
        let out = render(&scene, &RenderRequest { view, width: 64, height: 64 }).unwrap();
        // All radiance finite and non-negative by construction.
        assert!(out.color.data().iter().all(|v| v.is_finite() && *v >= 0.0));
    }
}
