//! sRGB transfer functions.
//!
//! The piecewise IEC 61966-2-1 curve (linear toe below 0.04045, power-2.4
//! segment above) rather than a bare power law, so values round-trip against
//! ordinary image files.

use crate::error::CoreError;
use crate::image_buf::{LinearImage, SrgbImage};

/// Decode one encoded sample to linear light.
#[inline]
pub fn srgb_to_linear_scalar(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// Encode one linear sample, clipping to `[0, 1]` first.
#[inline]
pub fn linear_to_srgb_scalar(v: f64) -> f64 {
    if v >= 1.0 {
        return 1.0;
    }
    let v = v.max(0.0);
    if v <= 0.003_130_8 {
        v * 12.92
    } else {
        1.055 * v.powf(1.0 / 2.4) - 0.055
    }
}

/// Decode an sRGB raster to linear radiance.
pub fn srgb_to_linear(img: &SrgbImage) -> LinearImage {
    let data = img.data().iter().map(|&v| srgb_to_linear_scalar(v)).collect();
    LinearImage::new(img.width(), img.height(), data)
        .expect("decoded samples are finite and non-negative")
}

/// Encode a linear raster to sRGB; values above 1 clip to 1 by contract.
pub fn linear_to_srgb(img: &LinearImage) -> SrgbImage {
    let data = img.data().iter().map(|&v| linear_to_srgb_scalar(v)).collect();
    SrgbImage::new(img.width(), img.height(), data).expect("encoded samples lie in [0, 1]")
}

/// Validate that a buffer is a legal sRGB raster before decoding it.
pub fn check_srgb_domain(data: &[f64]) -> Result<(), CoreError> {
    if data.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
        return Err(CoreError::domain("sample outside [0, 1]"));
    }
    Ok(())
}
