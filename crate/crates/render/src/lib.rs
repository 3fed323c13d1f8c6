//! Deterministic synthetic scene renderer.
//!
//! One primary ray per pixel through the pinhole model, nearest-hit shading
//! with a single fixed directional light plus an ambient term, and depth equal
//! to the camera-frame `z` of the hit. No randomness at render time: textures
//! are procedural functions of their seed, so equal inputs give bit-identical
//! frames.

mod scene;
mod trace;

pub use scene::{CameraPreset, Primitive, Scene, Shape, Texture};
pub use trace::{render, render_along_trajectory, RenderRequest};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("scene file error: {0}")]
    SceneFile(String),

    #[error(transparent)]
    Core(#[from] murk_core::CoreError),
}

impl RenderError {
    pub fn domain(msg: impl Into<String>) -> Self {
        RenderError::Domain(msg.into())
    }
}
