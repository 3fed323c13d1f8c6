//! Photometric degradations in strict linear light: exposure scaling with a
//! Poisson-Gaussian sensor model, low-light, and over-exposure saturation.

use crate::DegradeError;
use murk_core::{LinearImage, Rng};
use rayon::prelude::*;

/// Sensor model: system gain (linear units per photo-electron) and the
/// standard deviation of the Gaussian read noise.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SensorModel {
    pub gain: f64,
    pub read_sigma: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        // Mid-gray at e = 0.004 gives lambda = 8: visibly noisy but readable.
        SensorModel { gain: 2.5e-4, read_sigma: 2e-3 }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<(), DegradeError> {
        if self.gain <= 0.0 {
            return Err(DegradeError::domain("sensor gain must be > 0"));
        }
        if self.read_sigma < 0.0 {
            return Err(DegradeError::domain("read noise sigma must be >= 0"));
        }
        Ok(())
    }
}

/// Dimensionless exposure multiplier.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExposureParams {
    pub exposure: f64,
}

impl ExposureParams {
    pub fn validate(&self) -> Result<(), DegradeError> {
        if self.exposure <= 0.0 {
            return Err(DegradeError::domain("exposure must be > 0"));
        }
        Ok(())
    }
}

/// Poisson-Gaussian sensor sampling, per pixel and channel:
/// `out = Poisson(e * I / k) * k + N(0, read_sigma^2)`.
///
/// No clamping here: negative excursions from the read noise are the caller's
/// clip step to resolve. Rows draw from independent sub-streams of `rng`, so
/// the result does not depend on scheduling.
pub fn apply_sensor_noise(
    img: &LinearImage,
    e: &ExposureParams,
    s: &SensorModel,
    rng: &Rng,
) -> Result<Vec<f64>, DegradeError> {
    e.validate()?;
    s.validate()?;
    let (w, h) = (img.width(), img.height());
    let mut out = vec![0.0f64; w * h * 3];
    out.par_chunks_mut(w * 3)
        .enumerate()
        .for_each(|(y, row)| {
            let mut row_rng = rng.stream_idx("sensor/row", y as u64);
            let src = &img.data()[y * w * 3..(y + 1) * w * 3];
            for (o, &v) in row.iter_mut().zip(src.iter()) {
                let lambda = e.exposure * v / s.gain;
                let shot = row_rng.next_poisson(lambda) as f64 * s.gain;
                let read = if s.read_sigma > 0.0 {
                    s.read_sigma * row_rng.next_gaussian()
                } else {
                    0.0
                };
                *o = shot + read;
            }
        });
    Ok(out)
}

/// Low-light capture: exposure `e <= 1`, sensor noise, clamp to `[0, 1]`.
/// The frame stays dark; no digital re-brightening.
pub fn apply_low_light(
    img: &LinearImage,
    e: &ExposureParams,
    s: &SensorModel,
    rng: &Rng,
) -> Result<LinearImage, DegradeError> {
    e.validate()?;
    if e.exposure > 1.0 {
        return Err(DegradeError::domain(
            "low light requires exposure <= 1 (use over-exposure instead)",
        ));
    }
    let mut data = apply_sensor_noise(img, e, s, rng)?;
    for v in &mut data {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(LinearImage::new(img.width(), img.height(), data)?)
}

/// Over-exposure: gain `e >= 1`, sensor noise, strict clip to `[0, 1]`
/// before any downstream gamma encoding.
pub fn apply_over_exposure(
    img: &LinearImage,
    e: &ExposureParams,
    s: &SensorModel,
    rng: &Rng,
) -> Result<LinearImage, DegradeError> {
    e.validate()?;
    if e.exposure < 1.0 {
        return Err(DegradeError::domain(
            "over-exposure requires exposure >= 1 (use low light instead)",
        ));
    }
    let mut data = apply_sensor_noise(img, e, s, rng)?;
    for v in &mut data {
        *v = v.clamp(0.0, 1.0);
    }
    Ok(LinearImage::new(img.width(), img.height(), data)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_signal_zero_read_noise_is_exactly_zero() {
        let img = LinearImage::zeros(8, 8);
        let e = ExposureParams { exposure: 0.5 };
        let s = SensorModel { gain: 2.5e-4, read_sigma: 0.0 };
        let out = apply_sensor_noise(&img, &e, &s, &Rng::new(1)).unwrap();
        assert!(out.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let img = LinearImage::filled(16, 16, [0.5, 0.4, 0.3]);
        let e = ExposureParams { exposure: 0.004 };
        let s = SensorModel::default();
        let a = apply_low_light(&img, &e, &s, &Rng::new(9)).unwrap();
        let b = apply_low_light(&img, &e, &s, &Rng::new(9)).unwrap();
        assert_eq!(a.data(), b.data());
        let c = apply_low_light(&img, &e, &s, &Rng::new(10)).unwrap();
        assert_ne!(a.data(), c.data());
    }

    #[test]
    fn poisson_shot_term_mean_matches_analytic() {
        // lambda = e I / k = 16 per sample; shot mean must be 16 k within 1%.
        let s = SensorModel { gain: 2.5e-4, read_sigma: 0.0 };
        let e = ExposureParams { exposure: 0.008 };
        let i_val = 16.0 * s.gain / e.exposure;
        let img = LinearImage::filled(620, 540, [i_val; 3]); // ~1e6 samples
        let out = apply_sensor_noise(&img, &e, &s, &Rng::new(3)).unwrap();
        let mean = out.iter().sum::<f64>() / out.len() as f64;
        let expect = 16.0 * s.gain;
        assert!((mean - expect).abs() / expect < 0.01, "mean {mean} expect {expect}");
    }

    #[test]
    fn low_light_mean_and_variance_match_poisson_gaussian_model() {
        // Uniform I = 0.8 at e = 0.004: pre-clamp mean e*I and variance
        // k*e*I + read_sigma^2 over 1e5 samples.
        let s = SensorModel::default();
        let e = ExposureParams { exposure: 0.004 };
        let img = LinearImage::filled(183, 183, [0.8; 3]); // ~1e5 samples
        let out = apply_sensor_noise(&img, &e, &s, &Rng::new(17)).unwrap();
        let n = out.len() as f64;
        let mean = out.iter().sum::<f64>() / n;
        let var = out.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let expect_mean = e.exposure * 0.8;
        let expect_var = s.gain * e.exposure * 0.8 + s.read_sigma * s.read_sigma;
        assert!(
            (mean - expect_mean).abs() / expect_mean < 0.02,
            "mean {mean} vs {expect_mean}"
        );
        assert!(
            (var - expect_var).abs() / expect_var < 0.05,
            "var {var} vs {expect_var}"
        );
    }

    #[test]
    fn near_noiseless_limit_reproduces_input() {
        // Tiny gain: Poisson variance k*e*I vanishes, output ~ e*I = I at e=1.
        let img = LinearImage::filled(32, 32, [0.356, 0.5, 0.7]);
        let e = ExposureParams { exposure: 1.0 };
        let s = SensorModel { gain: 1e-8, read_sigma: 0.0 };
        let out = apply_low_light(&img, &e, &s, &Rng::new(5)).unwrap();
        for (a, b) in out.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn exposure_path_preconditions() {
        let img = LinearImage::zeros(8, 8);
        let s = SensorModel::default();
        assert!(apply_low_light(&img, &ExposureParams { exposure: 2.0 }, &s, &Rng::new(0))
            .is_err());
        assert!(apply_over_exposure(&img, &ExposureParams { exposure: 0.5 }, &s, &Rng::new(0))
            .is_err());
        assert!(apply_low_light(&img, &ExposureParams { exposure: 0.0 }, &s, &Rng::new(0))
            .is_err());
    }

    #[test]
    fn over_exposure_saturates_and_preserves_dark_regions() {
        let s = SensorModel { gain: 1e-8, read_sigma: 0.0 };
        let e = ExposureParams { exposure: 8.0 };
        let mut img = LinearImage::zeros(8, 8);
        img.set_pixel(0, 0, [0.5, 0.5, 0.5]); // 4.0 -> clipped to 1
        img.set_pixel(1, 0, [0.05, 0.05, 0.05]); // 0.4 stays linear
        let out = apply_over_exposure(&img, &e, &s, &Rng::new(2)).unwrap();
        assert!((out.pixel(0, 0)[0] - 1.0).abs() < 1e-9);
        assert!((out.pixel(1, 0)[0] - 0.4).abs() < 1e-3);
        assert!(out.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn over_exposure_monotone_in_gain_noiseless() {
        let s = SensorModel { gain: 1e-8, read_sigma: 0.0 };
        let mut img = LinearImage::zeros(16, 16);
        for y in 0..16 {
            for x in 0..16 {
                img.set_pixel(x, y, [(x + y) as f64 / 40.0; 3]);
            }
        }
        let lo = apply_over_exposure(&img, &ExposureParams { exposure: 2.0 }, &s, &Rng::new(4))
            .unwrap();
        let hi = apply_over_exposure(&img, &ExposureParams { exposure: 6.0 }, &s, &Rng::new(4))
            .unwrap();
        for (a, b) in lo.data().iter().zip(hi.data()) {
            assert!(a <= &(b + 1e-6));
        }
    }
}
