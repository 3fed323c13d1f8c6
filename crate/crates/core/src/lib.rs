//! Shared foundation for the murk toolkit: image buffers in linear and sRGB
//! light, depth maps, pinhole camera views with quaternion poses, the seeded
//! counter RNG every stochastic stage draws from, and raster file I/O.
//!
//! Conventions used throughout the workspace:
//!
//! - Pixel data is interleaved RGB, row-major, `f64` in memory. Linear images
//!   are non-negative radiance; sRGB images live in `[0, 1]`.
//! - Camera poses are world→camera: `x_cam = R * x_world + t`. Quaternions are
//!   stored scalar-last `[x, y, z, w]`.
//! - Camera axes: `+x` right, `+y` down, `+z` forward (optical axis).
//! - Depth is the camera-frame `z` of the surface point, in meters; `0` marks
//!   an invalid/background sample.

pub mod camera;
pub mod color;
pub mod error;
pub mod geom;
pub mod image_buf;
pub mod raster;
pub mod rng;

pub use camera::CameraView;
pub use error::CoreError;
pub use geom::{slerp, Mat3, Quat, Vec3};
pub use image_buf::{DepthMap, LinearImage, SrgbImage};
pub use rng::Rng;

/// Color + depth pair produced by a renderer for one camera view.
#[derive(Debug, Clone)]
pub struct RenderOutput {
    pub color: LinearImage,
    pub depth: DepthMap,
}

/// Anything that can produce a frame for an arbitrary camera pose.
///
/// Degradations that integrate over camera motion consume this capability
/// rather than a concrete scene type, so any pose-parameterized image source
/// can stand in for the built-in raytracer.
pub trait Renderer {
    fn render_view(&self, view: &CameraView, width: usize, height: usize) -> RenderOutput;
}
