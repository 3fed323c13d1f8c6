//! Physically grounded image degradations.
//!
//! Four families, each matching its formation model:
//!
//! - [`optical`]: thin-lens defocus, equidistant fisheye distortion, and
//!   motion blur by averaging re-rendered sub-frames in linear light.
//! - [`meteo`]: exponential-attenuation haze and procedural lens droplets.
//! - [`photo`]: Poisson-Gaussian sensor noise driving low-light and
//!   over-exposure, strictly in the linear domain.
//! - [`digital`]: DCT block quantization and low-resolution round-trips on
//!   encoded rasters.
//!
//! [`pipeline`] layers severity presets, the six mixture recipes, canonical
//! stage ordering, and replayable manifests on top.

pub mod digital;
pub mod meteo;
pub mod optical;
pub mod photo;
pub mod pipeline;
pub mod presets;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DegradeError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Core(#[from] murk_core::CoreError),
}

impl DegradeError {
    pub fn domain(msg: impl Into<String>) -> Self {
        DegradeError::Domain(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        DegradeError::Solver(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        DegradeError::Format(msg.into())
    }
}
