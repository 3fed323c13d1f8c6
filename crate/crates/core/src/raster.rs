//! Raster file I/O.
//!
//! Two on-disk forms:
//! - 8-bit RGB PNG for encoded sRGB images.
//! - A small planar float32 format (`.fr`) for linear images and depth maps:
//!   magic `FRAS`, one format-version byte, one channel-count byte, u32-LE
//!   width and height, then `channels` planes of f32-LE samples.

use crate::error::CoreError;
use crate::image_buf::{DepthMap, LinearImage, SrgbImage};
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

const MAGIC: &[u8; 4] = b"FRAS";
const VERSION: u8 = 1;

fn write_header(out: &mut Vec<u8>, channels: u8, width: usize, height: usize) {
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.push(channels);
    out.extend_from_slice(&(width as u32).to_le_bytes());
    out.extend_from_slice(&(height as u32).to_le_bytes());
}

fn read_header(bytes: &[u8]) -> Result<(u8, usize, usize), CoreError> {
    if bytes.len() < 14 || &bytes[0..4] != MAGIC {
        return Err(CoreError::format("not a float raster file"));
    }
    if bytes[4] != VERSION {
        return Err(CoreError::format(format!("unsupported float raster version {}", bytes[4])));
    }
    let channels = bytes[5];
    let width = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
    let expected = 14 + width * height * channels as usize * 4;
    if bytes.len() != expected {
        return Err(CoreError::format(format!(
            "float raster payload {} bytes, expected {}",
            bytes.len(),
            expected
        )));
    }
    Ok((channels, width, height))
}

fn encode_planes(out: &mut Vec<u8>, data: &[f64], channels: usize) {
    for c in 0..channels {
        for chunk in data.chunks_exact(channels) {
            out.extend_from_slice(&(chunk[c] as f32).to_le_bytes());
        }
    }
}

fn decode_planes(bytes: &[u8], pixels: usize, channels: usize) -> Vec<f64> {
    let mut data = vec![0.0f64; pixels * channels];
    for c in 0..channels {
        for i in 0..pixels {
            let off = (c * pixels + i) * 4;
            let v = f32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
            data[i * channels + c] = f64::from(v);
        }
    }
    data
}

pub fn save_linear(img: &LinearImage, path: &Path) -> Result<(), CoreError> {
    let mut out = Vec::with_capacity(14 + img.data().len() * 4);
    write_header(&mut out, 3, img.width(), img.height());
    encode_planes(&mut out, img.data(), 3);
    let mut f = fs::File::create(path)?;
    f.write_all(&out)?;
    Ok(())
}

pub fn load_linear(path: &Path) -> Result<LinearImage, CoreError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let (channels, width, height) = read_header(&bytes)?;
    if channels != 3 {
        return Err(CoreError::format("linear raster must have 3 channels"));
    }
    let data = decode_planes(&bytes[14..], width * height, 3);
    LinearImage::new(width, height, data)
}

pub fn save_depth(depth: &DepthMap, path: &Path) -> Result<(), CoreError> {
    let mut out = Vec::with_capacity(14 + depth.data().len() * 4);
    write_header(&mut out, 1, depth.width(), depth.height());
    encode_planes(&mut out, depth.data(), 1);
    let mut f = fs::File::create(path)?;
    f.write_all(&out)?;
    Ok(())
}

pub fn load_depth(path: &Path) -> Result<DepthMap, CoreError> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let (channels, width, height) = read_header(&bytes)?;
    if channels != 1 {
        return Err(CoreError::format("depth raster must have 1 channel"));
    }
    let data = decode_planes(&bytes[14..], width * height, 1);
    DepthMap::new(width, height, data)
}

pub fn save_srgb_png(img: &SrgbImage, path: &Path) -> Result<(), CoreError> {
    let buf = img.to_rgb8();
    let out: image::RgbImage =
        image::ImageBuffer::from_raw(img.width() as u32, img.height() as u32, buf)
            .expect("buffer sized from image dims");
    out.save_with_format(path, image::ImageFormat::Png)?;
    Ok(())
}

pub fn load_srgb_png(path: &Path) -> Result<SrgbImage, CoreError> {
    let img = image::open(path)?.into_rgb8();
    SrgbImage::from_rgb8(img.width() as usize, img.height() as usize, img.as_raw())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_raster_roundtrip() {
        let dir = std::env::temp_dir().join("murk-core-raster-test");
        fs::create_dir_all(&dir).unwrap();

        let mut img = LinearImage::zeros(3, 2);
        img.set_pixel(2, 1, [0.25, 1.5, 0.0]);
        let p = dir.join("img.fr");
        save_linear(&img, &p).unwrap();
        let back = load_linear(&p).unwrap();
        assert_eq!(back.width(), 3);
        assert_eq!(back.height(), 2);
        assert_eq!(back.pixel(2, 1), [0.25, 1.5, 0.0]);

        let mut d = DepthMap::zeros(2, 2);
        d.set(1, 0, 3.5);
        let pd = dir.join("depth.fr");
        save_depth(&d, &pd).unwrap();
        let back = load_depth(&pd).unwrap();
        assert_eq!(back.at(1, 0), 3.5);
    }

    #[test]
    fn rejects_wrong_magic_and_truncation() {
        let dir = std::env::temp_dir().join("murk-core-raster-bad");
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.fr");
        fs::write(&p, b"NOPE").unwrap();
        assert!(load_linear(&p).is_err());

        let img = LinearImage::zeros(4, 4);
        save_linear(&img, &p).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        bytes.truncate(bytes.len() - 1);
        fs::write(&p, &bytes).unwrap();
        assert!(load_linear(&p).is_err());
    }

    #[test]
    fn png_roundtrip_8bit() {
        let dir = std::env::temp_dir().join("murk-core-png-test");
        fs::create_dir_all(&dir).unwrap();
        let img = SrgbImage::new(2, 1, vec![0.0, 0.5, 1.0, 0.25, 0.75, 0.1]).unwrap();
        let p = dir.join("img.png");
        save_srgb_png(&img, &p).unwrap();
        let back = load_srgb_png(&p).unwrap();
        // 8-bit quantization only.
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }
}
