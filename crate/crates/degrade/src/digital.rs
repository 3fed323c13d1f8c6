//! Digital degradations on encoded rasters: DCT block quantization (the
//! pixel-domain core of JPEG, no bitstream) and low-resolution round-trips.

use crate::DegradeError;
use murk_core::SrgbImage;
use rayon::prelude::*;

/// JPEG quality factor, 1..=100.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct JpegParams {
    pub quality: u32,
}

impl JpegParams {
    pub fn validate(&self) -> Result<(), DegradeError> {
        if !(1..=100).contains(&self.quality) {
            return Err(DegradeError::domain("jpeg quality must lie in 1..=100"));
        }
        Ok(())
    }
}

/// Baseline luminance quantization table (ITU T.81 Annex K.1), row-major.
pub const LUMA_TABLE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, //
    12, 12, 14, 19, 26, 58, 60, 55, //
    14, 13, 16, 24, 40, 57, 69, 56, //
    14, 17, 22, 29, 51, 87, 80, 62, //
    18, 22, 37, 56, 68, 109, 103, 77, //
    24, 35, 55, 64, 81, 104, 113, 92, //
    49, 64, 78, 87, 103, 121, 120, 101, //
    72, 92, 95, 98, 112, 100, 103, 99,
];

/// Baseline chrominance quantization table (ITU T.81 Annex K.2), row-major.
pub const CHROMA_TABLE: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, //
    18, 21, 26, 66, 99, 99, 99, 99, //
    24, 26, 56, 99, 99, 99, 99, 99, //
    47, 66, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99, //
    99, 99, 99, 99, 99, 99, 99, 99,
];

/// IJG quality-to-scale law in integer arithmetic:
/// `S = q < 50 ? 5000/q : 200 - 2q`.
pub fn quality_scale(quality: u32) -> i64 {
    let q = i64::from(quality);
    if q < 50 {
        5000 / q
    } else {
        200 - 2 * q
    }
}

/// Scale a base table: `Q' = clamp((Q*S + 50) / 100, 1, 255)`.
pub fn scale_table(base: &[u16; 64], quality: u32) -> [u16; 64] {
    let s = quality_scale(quality);
    let mut out = [0u16; 64];
    for (o, &q) in out.iter_mut().zip(base.iter()) {
        *o = ((i64::from(q) * s + 50) / 100).clamp(1, 255) as u16;
    }
    out
}

/// Orthonormal 1D DCT-II basis matrix: `C[u][x] = a_u cos((2x+1) u pi / 16)`
/// with `a_0 = sqrt(1/8)`, `a_u = 1/2`.
fn dct_matrix() -> [[f64; 8]; 8] {
    let mut c = [[0.0f64; 8]; 8];
    for (u, row) in c.iter_mut().enumerate() {
        let a = if u == 0 { (1.0f64 / 8.0).sqrt() } else { 0.5 };
        for (x, cell) in row.iter_mut().enumerate() {
            *cell = a * ((2.0 * x as f64 + 1.0) * u as f64 * std::f64::consts::PI / 16.0).cos();
        }
    }
    c
}

fn dct2d(block: &[f64; 64], c: &[[f64; 8]; 8]) -> [f64; 64] {
    // rows: T = f * C^T, then F = C * T.
    let mut t = [0.0f64; 64];
    for y in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for x in 0..8 {
                acc += block[y * 8 + x] * c[u][x];
            }
            t[y * 8 + u] = acc;
        }
    }
    let mut f = [0.0f64; 64];
    for v in 0..8 {
        for u in 0..8 {
            let mut acc = 0.0;
            for y in 0..8 {
                acc += c[v][y] * t[y * 8 + u];
            }
            f[v * 8 + u] = acc;
        }
    }
    f
}

fn idct2d(coef: &[f64; 64], c: &[[f64; 8]; 8]) -> [f64; 64] {
    // f = C^T * F * C.
    let mut t = [0.0f64; 64];
    for v in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for u in 0..8 {
                acc += coef[v * 8 + u] * c[u][x];
            }
            t[v * 8 + x] = acc;
        }
    }
    let mut f = [0.0f64; 64];
    for y in 0..8 {
        for x in 0..8 {
            let mut acc = 0.0;
            for v in 0..8 {
                acc += c[v][y] * t[v * 8 + x];
            }
            f[y * 8 + x] = acc;
        }
    }
    f
}

/// Forward DCT, quantize/dequantize against `table`, inverse DCT. Input is a
/// level-shifted 8x8 block (values around 0); rounding is half-away-from-zero.
pub fn quantize_block_roundtrip(block: &[f64; 64], table: &[u16; 64]) -> [f64; 64] {
    let c = dct_matrix();
    let mut coef = dct2d(block, &c);
    for (v, &q) in coef.iter_mut().zip(table.iter()) {
        let q = f64::from(q);
        *v = (*v / q).round() * q;
    }
    idct2d(&coef, &c)
}

/// Quantized integer coefficients of a level-shifted block (oracle hook).
pub fn quantize_block_coefficients(block: &[f64; 64], table: &[u16; 64]) -> [i32; 64] {
    let c = dct_matrix();
    let coef = dct2d(block, &c);
    let mut out = [0i32; 64];
    for i in 0..64 {
        out[i] = (coef[i] / f64::from(table[i])).round() as i32;
    }
    out
}

/// Quantize a full plane (values in 0..255) blockwise with edge replication.
fn quantize_plane(plane: &mut [f64], w: usize, h: usize, table: &[u16; 64]) {
    let bw = w.div_ceil(8);
    let bh = h.div_ceil(8);
    let blocks: Vec<(usize, usize, [f64; 64])> = (0..bw * bh)
        .into_par_iter()
        .map(|bi| {
            let bx = bi % bw;
            let by = bi / bw;
            let mut block = [0.0f64; 64];
            for y in 0..8 {
                for x in 0..8 {
                    let sx = (bx * 8 + x).min(w - 1);
                    let sy = (by * 8 + y).min(h - 1);
                    block[y * 8 + x] = plane[sy * w + sx] - 128.0;
                }
            }
            (bx, by, quantize_block_roundtrip(&block, table))
        })
        .collect();
    for (bx, by, block) in blocks {
        for y in 0..8 {
            let sy = by * 8 + y;
            if sy >= h {
                continue;
            }
            for x in 0..8 {
                let sx = bx * 8 + x;
                if sx >= w {
                    continue;
                }
                plane[sy * w + sx] = block[y * 8 + x] + 128.0;
            }
        }
    }
}

/// 2x box downsample of a plane (odd trailing samples average what exists).
fn chroma_downsample(plane: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let cw = w.div_ceil(2);
    let ch = h.div_ceil(2);
    let mut out = vec![0.0f64; cw * ch];
    for cy in 0..ch {
        for cx in 0..cw {
            let mut acc = 0.0;
            let mut n = 0.0;
            for dy in 0..2 {
                for dx in 0..2 {
                    let x = cx * 2 + dx;
                    let y = cy * 2 + dy;
                    if x < w && y < h {
                        acc += plane[y * w + x];
                        n += 1.0;
                    }
                }
            }
            out[cy * cw + cx] = acc / n;
        }
    }
    (out, cw, ch)
}

/// Bilinear chroma upsample with half-pixel center alignment.
fn chroma_upsample(plane: &[f64], cw: usize, ch: usize, w: usize, h: usize) -> Vec<f64> {
    let mut out = vec![0.0f64; w * h];
    for y in 0..h {
        let fy = ((y as f64 - 0.5) / 2.0).clamp(0.0, (ch - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(ch - 1);
        let ty = fy - y0 as f64;
        for x in 0..w {
            let fx = ((x as f64 - 0.5) / 2.0).clamp(0.0, (cw - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(cw - 1);
            let tx = fx - x0 as f64;
            let v = plane[y0 * cw + x0] * (1.0 - tx) * (1.0 - ty)
                + plane[y0 * cw + x1] * tx * (1.0 - ty)
                + plane[y1 * cw + x0] * (1.0 - tx) * ty
                + plane[y1 * cw + x1] * tx * ty;
            out[y * w + x] = v;
        }
    }
    out
}

/// Pixel-domain JPEG: BT.601 full-range YCbCr, 4:2:0 chroma (box down,
/// bilinear up), per-block DCT quantization with the IJG-scaled baseline
/// tables, back to RGB with a final clamp. No entropy coding — the artifacts,
/// not the bitstream, are the product.
pub fn apply_jpeg(img: &SrgbImage, p: &JpegParams) -> Result<SrgbImage, DegradeError> {
    p.validate()?;
    let (w, h) = (img.width(), img.height());
    let n = w * h;
    let mut y_plane = vec![0.0f64; n];
    let mut cb_plane = vec![0.0f64; n];
    let mut cr_plane = vec![0.0f64; n];
    for i in 0..n {
        let r = img.data()[i * 3] * 255.0;
        let g = img.data()[i * 3 + 1] * 255.0;
        let b = img.data()[i * 3 + 2] * 255.0;
        y_plane[i] = 0.299 * r + 0.587 * g + 0.114 * b;
        cb_plane[i] = 128.0 - 0.168_735_89 * r - 0.331_264_11 * g + 0.5 * b;
        cr_plane[i] = 128.0 + 0.5 * r - 0.418_687_59 * g - 0.081_312_41 * b;
    }

    let luma_q = scale_table(&LUMA_TABLE, p.quality);
    let chroma_q = scale_table(&CHROMA_TABLE, p.quality);

    quantize_plane(&mut y_plane, w, h, &luma_q);

    let (mut cb_small, cw, ch) = chroma_downsample(&cb_plane, w, h);
    let (mut cr_small, _, _) = chroma_downsample(&cr_plane, w, h);
    quantize_plane(&mut cb_small, cw, ch, &chroma_q);
    quantize_plane(&mut cr_small, cw, ch, &chroma_q);
    let cb_up = chroma_upsample(&cb_small, cw, ch, w, h);
    let cr_up = chroma_upsample(&cr_small, cw, ch, w, h);

    let mut data = vec![0.0f64; n * 3];
    for i in 0..n {
        let yv = y_plane[i];
        let cb = cb_up[i] - 128.0;
        let cr = cr_up[i] - 128.0;
        let r = yv + 1.402 * cr;
        let g = yv - 0.344_136_29 * cb - 0.714_136_28 * cr;
        let b = yv + 1.772 * cb;
        data[i * 3] = (r / 255.0).clamp(0.0, 1.0);
        data[i * 3 + 1] = (g / 255.0).clamp(0.0, 1.0);
        data[i * 3 + 2] = (b / 255.0).clamp(0.0, 1.0);
    }
    Ok(SrgbImage::new(w, h, data)?)
}

/// Resolution reduction factor in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LowResParams {
    pub scale: f64,
}

impl LowResParams {
    pub fn validate(&self) -> Result<(), DegradeError> {
        if !(self.scale > 0.0 && self.scale <= 1.0) {
            return Err(DegradeError::domain("low-res scale must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Box-filter area downsample of one channel-interleaved raster to
/// `(tw, th)`, exact fractional pixel coverage, separable.
fn box_downsample(data: &[f64], w: usize, h: usize, tw: usize, th: usize) -> Vec<f64> {
    // Horizontal pass.
    let fx = w as f64 / tw as f64;
    let mut mid = vec![0.0f64; tw * h * 3];
    for y in 0..h {
        for txi in 0..tw {
            let lo = txi as f64 * fx;
            let hi = (txi + 1) as f64 * fx;
            let mut acc = [0.0f64; 3];
            let mut x = lo.floor() as usize;
            while (x as f64) < hi && x < w {
                let cover = (hi.min(x as f64 + 1.0) - lo.max(x as f64)).max(0.0);
                let i = (y * w + x) * 3;
                for c in 0..3 {
                    acc[c] += data[i + c] * cover;
                }
                x += 1;
            }
            let span = hi - lo;
            for c in 0..3 {
                mid[(y * tw + txi) * 3 + c] = acc[c] / span;
            }
        }
    }
    // Vertical pass.
    let fy = h as f64 / th as f64;
    let mut out = vec![0.0f64; tw * th * 3];
    for tyi in 0..th {
        let lo = tyi as f64 * fy;
        let hi = (tyi + 1) as f64 * fy;
        for x in 0..tw {
            let mut acc = [0.0f64; 3];
            let mut y = lo.floor() as usize;
            while (y as f64) < hi && y < h {
                let cover = (hi.min(y as f64 + 1.0) - lo.max(y as f64)).max(0.0);
                let i = (y * tw + x) * 3;
                for c in 0..3 {
                    acc[c] += mid[i + c] * cover;
                }
                y += 1;
            }
            let span = hi - lo;
            for c in 0..3 {
                out[(tyi * tw + x) * 3 + c] = acc[c] / span;
            }
        }
    }
    out
}

/// Bilinear upsample with pixel-center alignment.
fn bilinear_upsample(data: &[f64], sw: usize, sh: usize, tw: usize, th: usize) -> Vec<f64> {
    let rx = sw as f64 / tw as f64;
    let ry = sh as f64 / th as f64;
    let mut out = vec![0.0f64; tw * th * 3];
    for y in 0..th {
        let fy = ((y as f64 + 0.5) * ry - 0.5).clamp(0.0, (sh - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(sh - 1);
        let ty = fy - y0 as f64;
        for x in 0..tw {
            let fx = ((x as f64 + 0.5) * rx - 0.5).clamp(0.0, (sw - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(sw - 1);
            let tx = fx - x0 as f64;
            for c in 0..3 {
                let p00 = data[(y0 * sw + x0) * 3 + c];
                let p10 = data[(y0 * sw + x1) * 3 + c];
                let p01 = data[(y1 * sw + x0) * 3 + c];
                let p11 = data[(y1 * sw + x1) * 3 + c];
                out[(y * tw + x) * 3 + c] = p00 * (1.0 - tx) * (1.0 - ty)
                    + p10 * tx * (1.0 - ty)
                    + p01 * (1.0 - tx) * ty
                    + p11 * tx * ty;
            }
        }
    }
    out
}

/// Box-downsample to `(ceil(s*w), ceil(s*h))`, bilinear-upsample back.
/// Dimensions are unchanged; `s = 1` is the bit-exact identity.
pub fn apply_low_res(img: &SrgbImage, p: &LowResParams) -> Result<SrgbImage, DegradeError> {
    p.validate()?;
    let (w, h) = (img.width(), img.height());
    if ((p.scale * w.min(h) as f64).floor() as usize) < 2 {
        return Err(DegradeError::domain("low-res target smaller than 2 px"));
    }
    if p.scale == 1.0 {
        return Ok(img.clone());
    }
    let tw = (p.scale * w as f64).ceil() as usize;
    let th = (p.scale * h as f64).ceil() as usize;
    let small = box_downsample(img.data(), w, h, tw, th);
    let up = bilinear_upsample(&small, tw, th, w, h);
    let clamped: Vec<f64> = up.iter().map(|v| v.clamp(0.0, 1.0)).collect();
    Ok(SrgbImage::new(w, h, clamped)?)
}

/// Peak signal-to-noise ratio between two same-size rasters, dB.
pub fn psnr(a: &SrgbImage, b: &SrgbImage) -> f64 {
    let mse = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        / a.data().len() as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * (mse).log10()
    }
}
