//! Raster buffers: linear-radiance RGB, encoded sRGB, and metric depth.

use crate::error::CoreError;

/// H×W×3 non-negative linear-radiance raster; interleaved RGB, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl LinearImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, CoreError> {
        if data.len() != width * height * 3 {
            return Err(CoreError::domain(format!(
                "linear image data length {} != {}x{}x3",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CoreError::domain("linear image samples must be finite and >= 0"));
        }
        Ok(LinearImage { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        LinearImage { width, height, data: vec![0.0; width * height * 3] }
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        LinearImage { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Bilinear sample at a continuous pixel-center position, edge-clamped.
    /// Integer coordinates return the pixel value exactly.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> [f64; 3] {
        sample_bilinear(&self.data, self.width, self.height, 3, x, y)
    }

    pub fn total_energy(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// H×W×3 gamma-encoded raster with samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SrgbImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl SrgbImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, CoreError> {
        if data.len() != width * height * 3 {
            return Err(CoreError::domain(format!(
                "srgb image data length {} != {}x{}x3",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0 || *v > 1.0) {
            return Err(CoreError::domain("srgb samples must lie in [0, 1]"));
        }
        Ok(SrgbImage { width, height, data })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&rgb);
        }
        SrgbImage { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Quantize to interleaved 8-bit RGB (round-to-nearest).
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self, CoreError> {
        if bytes.len() != width * height * 3 {
            return Err(CoreError::format("rgb8 buffer length mismatch"));
        }
        let data = bytes.iter().map(|&b| f64::from(b) / 255.0).collect();
        Ok(SrgbImage { width, height, data })
    }
}

/// H×W metric depth in meters; `0` marks an invalid sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, CoreError> {
        if data.len() != width * height {
            return Err(CoreError::domain(format!(
                "depth map data length {} != {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CoreError::domain("depth samples must be finite and >= 0"));
        }
        Ok(DepthMap { width, height, data })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        DepthMap { width, height, data: vec![0.0; width * height] }
    }

    pub fn filled(width: usize, height: usize, depth: f64) -> Self {
        DepthMap { width, height, data: vec![depth; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, d: f64) {
        self.data[y * self.width + x] = d;
    }

    /// Percentile of the valid (> 0) depths via nearest-rank on the sorted
    /// values. Returns `None` when no sample is valid.
    pub fn valid_percentile(&self, p: f64) -> Option<f64> {
        let mut valid: Vec<f64> = self.data.iter().copied().filter(|d| *d > 0.0).collect();
        if valid.is_empty() {
            return None;
        }
        valid.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let idx = ((valid.len() - 1) as f64 * p).round() as usize;
        Some(valid[idx])
    }
}

/// Edge-clamped bilinear sampling over an interleaved buffer.
pub(crate) fn sample_bilinear(
    data: &[f64],
    width: usize,
    height: usize,
    channels: usize,
    x: f64,
    y: f64,
) -> [f64; 3] {
    let clamp = |v: f64, hi: usize| v.clamp(0.0, (hi - 1) as f64);
    let x = clamp(x, width);
    let y = clamp(y, height);
    let x0 = x.floor() as usize;
    let y0 = y.floor() as usize;
    let x1 = (x0 + 1).min(width - 1);
    let y1 = (y0 + 1).min(height - 1);
    let fx = x - x0 as f64;
    let fy = y - y0 as f64;
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate().take(channels) {
        let p00 = data[(y0 * width + x0) * channels + c];
        let p10 = data[(y0 * width + x1) * channels + c];
        let p01 = data[(y1 * width + x0) * channels + c];
        let p11 = data[(y1 * width + x1) * channels + c];
        *o = p00 * (1.0 - fx) * (1.0 - fy)
            + p10 * fx * (1.0 - fy)
            + p01 * (1.0 - fx) * fy
            + p11 * fx * fy;
    }
    out
}
