//! Severity presets and mixture recipes.
//!
//! `bench` ranges reproduce the benchmark rendering configuration; `easy`
//! draws from the milder half of each range (which half is milder depends on
//! the parameter: larger exposure or scale is milder, larger aperture or
//! density is harsher).

use crate::digital::{JpegParams, LowResParams};
use crate::meteo::{DropletParams, HazeParams};
use crate::optical::{DefocusParams, DistortionParams, MotionBlurParams};
use crate::photo::ExposureParams;
use crate::DegradeError;
use murk_core::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegradationKind {
    Defocus,
    Distortion,
    Haze,
    JpegCompression,
    LowLight,
    LowRes,
    MotionBlur,
    OverExposure,
    WaterDroplets,
}

impl DegradationKind {
    pub const ALL: [DegradationKind; 9] = [
        DegradationKind::Defocus,
        DegradationKind::Distortion,
        DegradationKind::Haze,
        DegradationKind::JpegCompression,
        DegradationKind::LowLight,
        DegradationKind::LowRes,
        DegradationKind::MotionBlur,
        DegradationKind::OverExposure,
        DegradationKind::WaterDroplets,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DegradationKind::Defocus => "defocus",
            DegradationKind::Distortion => "distortion",
            DegradationKind::Haze => "haze",
            DegradationKind::JpegCompression => "jpeg_compression",
            DegradationKind::LowLight => "low_light",
            DegradationKind::LowRes => "low_res",
            DegradationKind::MotionBlur => "motion_blur",
            DegradationKind::OverExposure => "over_exposure",
            DegradationKind::WaterDroplets => "water_droplets",
        }
    }

    pub fn parse(name: &str) -> Result<Self, DegradeError> {
        DegradationKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| DegradeError::domain(format!("unknown degradation kind '{name}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Bench,
    Easy,
}

/// Which half of a bench range is the milder one.
#[derive(Debug, Clone, Copy)]
enum Milder {
    LowerHalf,
    UpperHalf,
}

/// One scalar parameter range with its mildness direction.
#[derive(Debug, Clone, Copy)]
struct ParamRange {
    lo: f64,
    hi: f64,
    milder: Milder,
}

impl ParamRange {
    fn interval(&self, severity: Severity) -> (f64, f64) {
        match severity {
            Severity::Bench => (self.lo, self.hi),
            Severity::Easy => {
                let mid = 0.5 * (self.lo + self.hi);
                match self.milder {
                    Milder::LowerHalf => (self.lo, mid),
                    Milder::UpperHalf => (mid, self.hi),
                }
            }
        }
    }

    fn sample(&self, severity: Severity, rng: &mut Rng) -> f64 {
        let (lo, hi) = self.interval(severity);
        rng.uniform(lo, hi)
    }

    fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

const R_APERTURE: ParamRange = ParamRange { lo: 10.0, hi: 15.0, milder: Milder::LowerHalf };
const R_FOCUS: ParamRange = ParamRange { lo: 1.0, hi: 8.0, milder: Milder::LowerHalf };
const R_K1: ParamRange = ParamRange { lo: -0.24, hi: -0.23, milder: Milder::UpperHalf };
const R_K2: ParamRange = ParamRange { lo: 1e-4, hi: 3e-4, milder: Milder::LowerHalf };
const R_K3: ParamRange = ParamRange { lo: 1e-4, hi: 2e-4, milder: Milder::LowerHalf };
const R_K4: ParamRange = ParamRange { lo: 0.0, hi: 1e-4, milder: Milder::LowerHalf };
pub const MAX_THETA: f64 = 1.5;
const R_HAZE_DENSITY: ParamRange = ParamRange { lo: 3.5, hi: 6.0, milder: Milder::LowerHalf };
const R_LOW_LIGHT_E: ParamRange =
    ParamRange { lo: 0.003, hi: 0.005, milder: Milder::UpperHalf };
const R_LOW_RES_S: ParamRange = ParamRange { lo: 0.02, hi: 0.05, milder: Milder::UpperHalf };
const R_MB_TRANS: ParamRange = ParamRange { lo: 0.2, hi: 0.35, milder: Milder::LowerHalf };
const R_MB_ROT: ParamRange = ParamRange { lo: 0.06, hi: 0.12, milder: Milder::LowerHalf };
pub const MB_SUB_STEPS: usize = 80;
const R_OVER_E: ParamRange = ParamRange { lo: 7.0, hi: 10.0, milder: Milder::LowerHalf };
const R_WD_SCALE: ParamRange = ParamRange { lo: 2.5, hi: 4.0, milder: Milder::LowerHalf };
const R_WD_RADIUS: ParamRange = ParamRange { lo: 0.25, hi: 0.75, milder: Milder::LowerHalf };
const R_WD_STRENGTH: ParamRange = ParamRange { lo: 0.3, hi: 0.5, milder: Milder::LowerHalf };
const R_WD_BLUR_SIGMA: ParamRange = ParamRange { lo: 2.0, hi: 2.5, milder: Milder::LowerHalf };
pub const WD_BLUR_KERNEL: usize = 9;
const JPEG_Q_LO: u32 = 2;
const JPEG_Q_HI: u32 = 5;

/// Resolved parameter set of one degradation stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegradationParams {
    Defocus(DefocusParams),
    Distortion(DistortionParams),
    Haze(HazeParams),
    JpegCompression(JpegParams),
    LowLight(ExposureParams),
    LowRes(LowResParams),
    MotionBlur(MotionBlurParams),
    OverExposure(ExposureParams),
    WaterDroplets(DropletParams),
}

impl DegradationParams {
    pub fn kind(&self) -> DegradationKind {
        match self {
            DegradationParams::Defocus(_) => DegradationKind::Defocus,
            DegradationParams::Distortion(_) => DegradationKind::Distortion,
            DegradationParams::Haze(_) => DegradationKind::Haze,
            DegradationParams::JpegCompression(_) => DegradationKind::JpegCompression,
            DegradationParams::LowLight(_) => DegradationKind::LowLight,
            DegradationParams::LowRes(_) => DegradationKind::LowRes,
            DegradationParams::MotionBlur(_) => DegradationKind::MotionBlur,
            DegradationParams::OverExposure(_) => DegradationKind::OverExposure,
            DegradationParams::WaterDroplets(_) => DegradationKind::WaterDroplets,
        }
    }
}

/// Uniform draw inside the preset interval of every parameter of `kind`.
/// Seeds carried inside parameter sets (motion-blur direction, droplet
/// layout) are drawn from the same stream so a spec seed pins everything.
pub fn sample_params(
    kind: DegradationKind,
    severity: Severity,
    rng: &mut Rng,
) -> DegradationParams {
    match kind {
        DegradationKind::Defocus => DegradationParams::Defocus(DefocusParams {
            aperture: R_APERTURE.sample(severity, rng),
            focus_depth: R_FOCUS.sample(severity, rng),
        }),
        DegradationKind::Distortion => DegradationParams::Distortion(DistortionParams {
            k1: R_K1.sample(severity, rng),
            k2: R_K2.sample(severity, rng),
            k3: R_K3.sample(severity, rng),
            k4: R_K4.sample(severity, rng),
            max_theta: MAX_THETA,
        }),
        DegradationKind::Haze => DegradationParams::Haze(HazeParams {
            density: R_HAZE_DENSITY.sample(severity, rng),
            atmospheric_light: HazeParams::DEFAULT_ATMOSPHERIC_LIGHT,
        }),
        DegradationKind::JpegCompression => {
            let (lo, hi) = match severity {
                Severity::Bench => (JPEG_Q_LO, JPEG_Q_HI),
                // Higher quality is milder.
                Severity::Easy => (4, JPEG_Q_HI),
            };
            DegradationParams::JpegCompression(JpegParams {
                quality: rng.uniform_int(i64::from(lo), i64::from(hi)) as u32,
            })
        }
        DegradationKind::LowLight => DegradationParams::LowLight(ExposureParams {
            exposure: R_LOW_LIGHT_E.sample(severity, rng),
        }),
        DegradationKind::LowRes => DegradationParams::LowRes(LowResParams {
            scale: R_LOW_RES_S.sample(severity, rng),
        }),
        DegradationKind::MotionBlur => DegradationParams::MotionBlur(MotionBlurParams {
            trans: R_MB_TRANS.sample(severity, rng),
            rot: R_MB_ROT.sample(severity, rng),
            sub_steps: MB_SUB_STEPS,
            direction_seed: rng.next_u64(),
        }),
        DegradationKind::OverExposure => DegradationParams::OverExposure(ExposureParams {
            exposure: R_OVER_E.sample(severity, rng),
        }),
        DegradationKind::WaterDroplets => DegradationParams::WaterDroplets(DropletParams {
            scale: R_WD_SCALE.sample(severity, rng),
            radius: R_WD_RADIUS.sample(severity, rng),
            strength: R_WD_STRENGTH.sample(severity, rng),
            blur_sigma: R_WD_BLUR_SIGMA.sample(severity, rng),
            blur_kernel: WD_BLUR_KERNEL,
            seed: rng.next_u64(),
        }),
    }
}

/// Check a resolved parameter set against the bench preset intervals.
pub fn in_bench_range(params: &DegradationParams) -> bool {
    match params {
        DegradationParams::Defocus(p) => {
            R_APERTURE.contains(p.aperture) && R_FOCUS.contains(p.focus_depth)
        }
        DegradationParams::Distortion(p) => {
            R_K1.contains(p.k1)
                && R_K2.contains(p.k2)
                && R_K3.contains(p.k3)
                && R_K4.contains(p.k4)
                && p.max_theta == MAX_THETA
        }
        DegradationParams::Haze(p) => R_HAZE_DENSITY.contains(p.density),
        DegradationParams::JpegCompression(p) => (JPEG_Q_LO..=JPEG_Q_HI).contains(&p.quality),
        DegradationParams::LowLight(p) => R_LOW_LIGHT_E.contains(p.exposure),
        DegradationParams::LowRes(p) => R_LOW_RES_S.contains(p.scale),
        DegradationParams::MotionBlur(p) => {
            R_MB_TRANS.contains(p.trans)
                && R_MB_ROT.contains(p.rot)
                && p.sub_steps == MB_SUB_STEPS
        }
        DegradationParams::OverExposure(p) => R_OVER_E.contains(p.exposure),
        DegradationParams::WaterDroplets(p) => {
            R_WD_SCALE.contains(p.scale)
                && R_WD_RADIUS.contains(p.radius)
                && R_WD_STRENGTH.contains(p.strength)
                && R_WD_BLUR_SIGMA.contains(p.blur_sigma)
                && p.blur_kernel == WD_BLUR_KERNEL
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecipeName {
    NightCapture,
    HazyLongRange,
    WetLensMotion,
    BacklitDynamics,
    MotionDefocus,
    CompressedPortrait,
}

impl RecipeName {
    pub const ALL: [RecipeName; 6] = [
        RecipeName::NightCapture,
        RecipeName::HazyLongRange,
        RecipeName::WetLensMotion,
        RecipeName::BacklitDynamics,
        RecipeName::MotionDefocus,
        RecipeName::CompressedPortrait,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            RecipeName::NightCapture => "night_capture",
            RecipeName::HazyLongRange => "hazy_long_range",
            RecipeName::WetLensMotion => "wet_lens_motion",
            RecipeName::BacklitDynamics => "backlit_dynamics",
            RecipeName::MotionDefocus => "motion_defocus",
            RecipeName::CompressedPortrait => "compressed_portrait",
        }
    }

    pub fn parse(name: &str) -> Result<Self, DegradeError> {
        RecipeName::ALL
            .into_iter()
            .find(|r| r.name() == name)
            .ok_or_else(|| DegradeError::domain(format!("unknown recipe '{name}'")))
    }
}

/// One bench-severity primary plus ordered easy-severity auxiliaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureRecipe {
    pub name: RecipeName,
    pub primary: DegradationKind,
    pub auxiliaries: Vec<DegradationKind>,
}

/// The six capture-scenario mixtures; the primary member runs at bench
/// severity, auxiliaries at easy.
pub fn recipe(name: RecipeName) -> MixtureRecipe {
    use DegradationKind as K;
    let (primary, auxiliaries) = match name {
        RecipeName::NightCapture => (K::LowLight, vec![K::MotionBlur, K::LowRes]),
        RecipeName::HazyLongRange => (K::Haze, vec![K::LowRes, K::MotionBlur]),
        RecipeName::WetLensMotion => (K::WaterDroplets, vec![K::MotionBlur, K::LowLight]),
        RecipeName::BacklitDynamics => (K::OverExposure, vec![K::MotionBlur]),
        RecipeName::MotionDefocus => (K::MotionBlur, vec![K::Defocus, K::LowRes]),
        RecipeName::CompressedPortrait => (K::Defocus, vec![K::JpegCompression]),
    };
    MixtureRecipe { name, primary, auxiliaries }
}
