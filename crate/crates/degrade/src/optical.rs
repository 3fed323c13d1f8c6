//! Optical and dynamic degradations: thin-lens defocus, equidistant fisheye
//! distortion, and camera-motion blur.

use crate::DegradeError;
use murk_core::{CameraView, DepthMap, LinearImage, Quat, RenderOutput, Renderer, Rng, Vec3};
use rayon::prelude::*;

/// Thin-lens defocus: `aperture` scales the circle of confusion (in pixels),
/// `focus_depth` is the in-focus plane in meters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DefocusParams {
    pub aperture: f64,
    pub focus_depth: f64,
}

impl DefocusParams {
    pub fn validate(&self) -> Result<(), DegradeError> {
        if self.aperture <= 0.0 || self.focus_depth <= 0.0 {
            return Err(DegradeError::domain("defocus aperture and focus depth must be > 0"));
        }
        Ok(())
    }
}

/// Circle-of-confusion radius `a * |d - f| / d` in pixels.
pub fn coc_radius(d: f64, p: &DefocusParams) -> Result<f64, DegradeError> {
    p.validate()?;
    if d <= 0.0 {
        return Err(DegradeError::domain("coc_radius requires depth > 0"));
    }
    Ok(p.aperture * (d - p.focus_depth).abs() / d)
}

/// Sigma threshold below which a pixel passes through unblurred.
const SIGMA_EPS: f64 = 1e-4;

/// Depth-dependent Gaussian blur with per-pixel sigma from the CoC law.
///
/// Realized as a two-pass separable gather with unit-mass kernels and
/// replicate-edge boundary handling: constants are preserved exactly and at
/// locally constant depth the result equals the dense 2D convolution. Invalid
/// depth samples (background) blur with the far-field limit sigma = aperture.
pub fn apply_defocus(
    img: &LinearImage,
    depth: &DepthMap,
    p: &DefocusParams,
) -> Result<LinearImage, DegradeError> {
    p.validate()?;
    if img.width() != depth.width() || img.height() != depth.height() {
        return Err(DegradeError::domain("image and depth dimensions must match"));
    }
    let (w, h) = (img.width(), img.height());
    let sigma: Vec<f64> = depth
        .data()
        .iter()
        .map(|&d| {
            if d > 0.0 {
                p.aperture * (d - p.focus_depth).abs() / d
            } else {
                p.aperture
            }
        })
        .collect();

    let horizontal = blur_pass(img.data(), &sigma, w, h, true);
    let vertical = blur_pass(&horizontal, &sigma, w, h, false);
    Ok(LinearImage::new(w, h, vertical)?)
}

/// One separable pass; each output pixel gathers along the pass axis with its
/// own sigma. Kernel support is ceil(3 sigma), weights normalized to 1.
fn blur_pass(src: &[f64], sigma: &[f64], w: usize, h: usize, horizontal: bool) -> Vec<f64> {
    let mut out = vec![0.0f64; src.len()];
    out.par_chunks_mut(w * 3)
        .enumerate()
        .for_each(|(y, row)| {
            let mut kernel: Vec<f64> = Vec::new();
            let mut kernel_sigma = f64::NAN;
            for x in 0..w {
                let s = sigma[y * w + x];
                if s < SIGMA_EPS {
                    let i = (y * w + x) * 3;
                    row[x * 3..x * 3 + 3].copy_from_slice(&src[i..i + 3]);
                    continue;
                }
                if s != kernel_sigma {
                    build_kernel(&mut kernel, s);
                    kernel_sigma = s;
                }
                let r = kernel.len() - 1;
                let mut acc = [0.0f64; 3];
                let mut wsum = 0.0f64;
                for k in -(r as isize)..=(r as isize) {
                    let wgt = kernel[k.unsigned_abs()];
                    let (sx, sy) = if horizontal {
                        ((x as isize + k).clamp(0, w as isize - 1) as usize, y)
                    } else {
                        (x, (y as isize + k).clamp(0, h as isize - 1) as usize)
                    };
                    let i = (sy * w + sx) * 3;
                    acc[0] += wgt * src[i];
                    acc[1] += wgt * src[i + 1];
                    acc[2] += wgt * src[i + 2];
                    wsum += wgt;
                }
                for c in 0..3 {
                    row[x * 3 + c] = acc[c] / wsum;
                }
            }
        });
    out
}

/// Gaussian taps `exp(-i^2 / (2 sigma^2))` for `i = 0..=ceil(3 sigma)`,
/// computed by the incremental-product recurrence (one `exp` per kernel).
fn build_kernel(kernel: &mut Vec<f64>, sigma: f64) {
    let r = (3.0 * sigma).ceil() as usize;
    kernel.clear();
    kernel.reserve(r + 1);
    let q = (-0.5 / (sigma * sigma)).exp();
    let q2 = q * q;
    let mut w = 1.0f64;
    let mut f = q;
    kernel.push(w);
    for _ in 1..=r {
        w *= f;
        f *= q2;
        kernel.push(w);
    }
}

/// Radial polynomial fisheye distortion coefficients and field cutoff.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DistortionParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    /// Field cutoff in radians, in `(0, pi/2]`.
    pub max_theta: f64,
}

impl DistortionParams {
    pub fn validate(&self) -> Result<(), DegradeError> {
        if !(self.max_theta > 0.0 && self.max_theta <= std::f64::consts::FRAC_PI_2) {
            return Err(DegradeError::domain("max_theta must lie in (0, pi/2]"));
        }
        Ok(())
    }

    fn k(&self) -> [f64; 4] {
        [self.k1, self.k2, self.k3, self.k4]
    }

    /// theta_d(theta) without the domain check.
    fn eval(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        let k = self.k();
        let mut poly = 1.0;
        let mut pow = t2;
        for ki in k {
            poly += ki * pow;
            pow *= t2;
        }
        theta * poly
    }

    /// d(theta_d)/d(theta).
    fn derivative(&self, theta: f64) -> f64 {
        let t2 = theta * theta;
        let k = self.k();
        let mut d = 1.0;
        let mut pow = t2;
        for (i, ki) in k.iter().enumerate() {
            d += (2 * (i + 1) + 1) as f64 * ki * pow;
            pow *= t2;
        }
        d
    }

    /// Largest angle up to `max_theta` on which the polynomial is strictly
    /// increasing, found by scanning the derivative on a 1e-4 grid. Strong
    /// barrel coefficients fold the mapping back before `max_theta`; the
    /// usable field stops there.
    pub fn monotone_limit(&self) -> f64 {
        const STEP: f64 = 1e-4;
        let mut theta = 0.0;
        while theta <= self.max_theta {
            if self.derivative(theta) <= 0.0 {
                return (theta - STEP).max(0.0);
            }
            theta += STEP;
        }
        self.max_theta
    }
}

/// Distorted angle `theta * (1 + k1 t^2 + k2 t^4 + k3 t^6 + k4 t^8)`.
pub fn distort_angle(theta: f64, p: &DistortionParams) -> Result<f64, DegradeError> {
    p.validate()?;
    if !(0.0..=p.max_theta).contains(&theta) {
        return Err(DegradeError::domain(format!(
            "theta {theta} outside [0, {}]",
            p.max_theta
        )));
    }
    Ok(p.eval(theta))
}

/// Invert the distortion polynomial by Newton iteration (start at `theta_d`,
/// tolerance 1e-10, at most 30 steps) on the strictly monotone segment.
pub fn undistort_angle(theta_d: f64, p: &DistortionParams) -> Result<f64, DegradeError> {
    p.validate()?;
    undistort_with_limit(theta_d, p, p.monotone_limit())
}

fn undistort_with_limit(
    theta_d: f64,
    p: &DistortionParams,
    limit: f64,
) -> Result<f64, DegradeError> {
    if theta_d < 0.0 {
        return Err(DegradeError::domain("theta_d must be >= 0"));
    }
    if theta_d == 0.0 {
        return Ok(0.0);
    }
    let max_image = p.eval(limit);
    if theta_d > max_image + 1e-12 {
        return Err(DegradeError::solver(format!(
            "theta_d {theta_d} outside the invertible image [0, {max_image}]"
        )));
    }
    let mut theta = theta_d.min(limit);
    for _ in 0..30 {
        let f = p.eval(theta) - theta_d;
        if f.abs() < 1e-10 {
            return Ok(theta);
        }
        let d = p.derivative(theta);
        if d <= 1e-12 {
            return Err(DegradeError::solver("non-monotone interval in undistort"));
        }
        theta = (theta - f / d).clamp(0.0, limit);
    }
    Err(DegradeError::solver("undistort_angle did not converge in 30 iterations"))
}

/// Remap a pinhole frame through the fisheye model.
///
/// The output frame is equidistant in the distorted angle with focal
/// `half_diagonal / max_theta`, so `max_theta` lands on the image corner; the
/// input is read in angle-proportional coordinates through the view focals
/// (exact at the principal point, identity when all `k_i = 0` and the focals
/// match). Rays past the invertible field or outside the input frame go black.
pub fn apply_distortion(
    img: &LinearImage,
    view: &CameraView,
    p: &DistortionParams,
) -> Result<LinearImage, DegradeError> {
    Ok(remap_distortion(img, view, p, false)?.0)
}

/// Distortion remap that also warps a depth map through the same geometry
/// (nearest-neighbor, out-of-field samples become invalid).
pub fn apply_distortion_with_depth(
    img: &LinearImage,
    depth: &DepthMap,
    view: &CameraView,
    p: &DistortionParams,
) -> Result<(LinearImage, DepthMap), DegradeError> {
    if img.width() != depth.width() || img.height() != depth.height() {
        return Err(DegradeError::domain("image and depth dimensions must match"));
    }
    let (color, warped) = remap_distortion(img, view, p, true)?;
    let mut out_depth = DepthMap::zeros(depth.width(), depth.height());
    if let Some(coords) = warped {
        for (i, d) in out_depth.data_mut().iter_mut().enumerate() {
            if let Some((u, v)) = coords[i] {
                let x = u.round().clamp(0.0, (depth.width() - 1) as f64) as usize;
                let y = v.round().clamp(0.0, (depth.height() - 1) as f64) as usize;
                *d = depth.at(x, y);
            }
        }
    }
    Ok((color, out_depth))
}

type WarpCoords = Vec<Option<(f64, f64)>>;

fn remap_distortion(
    img: &LinearImage,
    view: &CameraView,
    p: &DistortionParams,
    keep_coords: bool,
) -> Result<(LinearImage, Option<WarpCoords>), DegradeError> {
    p.validate()?;
    let (w, h) = (img.width(), img.height());
    let half_diag = ((w as f64 / 2.0).powi(2) + (h as f64 / 2.0).powi(2)).sqrt();
    let f_eq = half_diag / p.max_theta;
    let limit = p.monotone_limit();
    let max_image = p.eval(limit);

    let mut out = vec![0.0f64; w * h * 3];
    let mut coords: WarpCoords = if keep_coords { vec![None; w * h] } else { Vec::new() };

    let rows: Vec<(usize, Vec<f64>, Vec<Option<(f64, f64)>>)> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut row = vec![0.0f64; w * 3];
            let mut crow: Vec<Option<(f64, f64)>> =
                if keep_coords { vec![None; w] } else { Vec::new() };
            for x in 0..w {
                let dx = (x as f64 + 0.5 - view.cx) / f_eq;
                let dy = (y as f64 + 0.5 - view.cy) / f_eq;
                let theta_d = (dx * dx + dy * dy).sqrt();
                if theta_d > max_image {
                    continue; // outside the invertible fisheye field
                }
                let theta = match undistort_with_limit(theta_d, p, limit) {
                    Ok(t) => t,
                    Err(_) => continue,
                };
                let (su, sv) = if theta_d > 0.0 {
                    let phi = dy.atan2(dx);
                    (
                        view.cx + view.fx * theta * phi.cos(),
                        view.cy + view.fy * theta * phi.sin(),
                    )
                } else {
                    (view.cx, view.cy)
                };
                // Pixel-center continuous coords -> index space. Anything
                // inside a border pixel's footprint counts as in-frame.
                let (ix, iy) = (su - 0.5, sv - 0.5);
                if ix < -0.5 || iy < -0.5 || ix > w as f64 - 0.5 || iy > h as f64 - 0.5 {
                    continue; // beyond the pinhole frustum
                }
                let rgb = img.sample_bilinear(ix, iy);
                row[x * 3..x * 3 + 3].copy_from_slice(&rgb);
                if keep_coords {
                    crow[x] = Some((ix, iy));
                }
            }
            (y, row, crow)
        })
        .collect();

    for (y, row, crow) in rows {
        out[y * w * 3..(y + 1) * w * 3].copy_from_slice(&row);
        if keep_coords {
            for (x, c) in crow.into_iter().enumerate() {
                coords[y * w + x] = c;
            }
        }
    }

    let color = LinearImage::new(w, h, out)?;
    Ok((color, if keep_coords { Some(coords) } else { None }))
}

/// Camera-shake magnitude and sampling resolution for motion blur.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MotionBlurParams {
    /// Total camera-center displacement in meters.
    pub trans: f64,
    /// Total rotation magnitude in radians.
    pub rot: f64,
    /// Number of accumulated sub-frames.
    pub sub_steps: usize,
    /// Seed for the random displacement direction and rotation axis.
    pub direction_seed: u64,
}

impl MotionBlurParams {
    pub fn validate(&self) -> Result<(), DegradeError> {
        if self.sub_steps < 1 {
            return Err(DegradeError::domain("motion blur needs at least one sub-step"));
        }
        if self.trans < 0.0 || self.rot < 0.0 {
            return Err(DegradeError::domain("motion magnitudes must be >= 0"));
        }
        Ok(())
    }
}

/// End-of-exposure pose: the camera center displaced by `trans` along a seeded
/// camera-frame unit direction, orientation rotated by `rot` about a seeded
/// camera-frame unit axis.
pub fn motion_end_pose(pose: &CameraView, p: &MotionBlurParams) -> CameraView {
    let root = Rng::new(p.direction_seed);
    let dir_cam = root.stream("motion/direction").next_unit_vec3();
    let axis_cam = root.stream("motion/axis").next_unit_vec3();

    let rot_t = pose.rotation_matrix().transpose();
    let center_end = pose.center() + rot_t.mul_vec(dir_cam).scale(p.trans);
    let q_delta = Quat::from_axis_angle(axis_cam, p.rot);
    let q_end = q_delta.mul(pose.rotation).normalized();
    let t_end = q_end.to_mat3().mul_vec(center_end).scale(-1.0);
    CameraView::new(pose.fx, pose.fy, pose.cx, pose.cy, q_end, t_end)
        .expect("end pose built from a valid start pose")
}

/// Poses along the exposure at `t_i = i / (N - 1)`: slerped rotation, camera
/// center on the straight world-space segment.
pub fn motion_poses(
    pose: &CameraView,
    p: &MotionBlurParams,
) -> Result<Vec<CameraView>, DegradeError> {
    p.validate()?;
    let end = motion_end_pose(pose, p);
    let c0 = pose.center();
    let c1 = end.center();
    let n = p.sub_steps;
    let mut poses = Vec::with_capacity(n);
    for i in 0..n {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        let q = murk_core::slerp(pose.rotation, end.rotation, t)?;
        let c = c0.lerp(c1, t);
        let trans = q.to_mat3().mul_vec(c).scale(-1.0);
        poses.push(CameraView::new(pose.fx, pose.fy, pose.cx, pose.cy, q, trans)?);
    }
    Ok(poses)
}

/// Average `N` re-rendered frames along the exposure trajectory in linear
/// light. Frames render independently; accumulation is compensated summation
/// in frame order, so the result is independent of render scheduling.
pub fn apply_motion_blur(
    renderer: &(dyn Renderer + Sync),
    pose: &CameraView,
    width: usize,
    height: usize,
    p: &MotionBlurParams,
) -> Result<LinearImage, DegradeError> {
    let poses = motion_poses(pose, p)?;
    let frames: Vec<RenderOutput> = poses
        .par_iter()
        .map(|v| renderer.render_view(v, width, height))
        .collect();
    average_frames(frames.iter().map(|f| &f.color), width, height)
}

/// Kahan-compensated per-pixel mean of equally sized frames.
pub fn average_frames<'a>(
    frames: impl Iterator<Item = &'a LinearImage>,
    width: usize,
    height: usize,
) -> Result<LinearImage, DegradeError> {
    let mut sum = vec![0.0f64; width * height * 3];
    let mut comp = vec![0.0f64; width * height * 3];
    let mut count = 0usize;
    for frame in frames {
        if frame.width() != width || frame.height() != height {
            return Err(DegradeError::domain("sub-frame dimensions must match"));
        }
        for (i, &v) in frame.data().iter().enumerate() {
            let y = v - comp[i];
            let t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
        count += 1;
    }
    if count == 0 {
        return Err(DegradeError::domain("no frames to average"));
    }
    let inv = 1.0 / count as f64;
    for v in &mut sum {
        *v *= inv;
    }
    Ok(LinearImage::new(width, height, sum)?)
}

/// Image-only motion blur fallback: forward-reproject the single input frame
/// through each sub-step pose using its depth, fill holes from the nearest
/// valid neighbor, and average. An approximation of true re-rendering;
/// callers flag it in their manifests.
pub fn motion_blur_warp(
    img: &LinearImage,
    depth: &DepthMap,
    view: &CameraView,
    p: &MotionBlurParams,
) -> Result<LinearImage, DegradeError> {
    if img.width() != depth.width() || img.height() != depth.height() {
        return Err(DegradeError::domain("image and depth dimensions must match"));
    }
    let poses = motion_poses(view, p)?;
    let (w, h) = (img.width(), img.height());
    let frames: Vec<LinearImage> = poses
        .par_iter()
        .map(|target| warp_frame(img, depth, view, target))
        .collect();
    average_frames(frames.iter(), w, h)
}

fn warp_frame(
    img: &LinearImage,
    depth: &DepthMap,
    src_view: &CameraView,
    dst_view: &CameraView,
) -> LinearImage {
    let (w, h) = (img.width(), img.height());
    let mut zbuf = vec![f64::INFINITY; w * h];
    let mut color: Vec<Option<[f64; 3]>> = vec![None; w * h];
    for y in 0..h {
        for x in 0..w {
            let d = depth.at(x, y);
            if d <= 0.0 {
                continue;
            }
            let world = src_view.lift_pixel(x, y, d);
            let cam = dst_view.world_to_camera(world);
            if let Some((u, v)) = dst_view.project_camera(cam) {
                let tx = (u - 0.5).round() as isize;
                let ty = (v - 0.5).round() as isize;
                if tx < 0 || ty < 0 || tx >= w as isize || ty >= h as isize {
                    continue;
                }
                let ti = ty as usize * w + tx as usize;
                if cam.z < zbuf[ti] {
                    zbuf[ti] = cam.z;
                    color[ti] = Some(img.pixel(x, y));
                }
            }
        }
    }
    // Nearest-neighbor hole filling with a bounded ring search; holes that
    // stay unfilled fall back to the source pixel.
    let mut out = LinearImage::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let rgb = match color[i] {
                Some(c) => c,
                None => nearest_filled(&color, w, h, x, y).unwrap_or_else(|| img.pixel(x, y)),
            };
            out.set_pixel(x, y, rgb);
        }
    }
    out
}

fn nearest_filled(
    color: &[Option<[f64; 3]>],
    w: usize,
    h: usize,
    x: usize,
    y: usize,
) -> Option<[f64; 3]> {
    for r in 1..=8isize {
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs() != r && dy.abs() != r {
                    continue;
                }
                let nx = x as isize + dx;
                let ny = y as isize + dy;
                if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                    continue;
                }
                if let Some(c) = color[ny as usize * w + nx as usize] {
                    return Some(c);
                }
            }
        }
    }
    None
}
