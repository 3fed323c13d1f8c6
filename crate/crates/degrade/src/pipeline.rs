//! Chain orchestration: canonical stage ordering, linear/sRGB staging,
//! deterministic parameter resolution, and replayable manifests.
//!
//! Stages always run in physical formation order regardless of how the spec
//! list is written: re-render geometry (motion blur, defocus, distortion),
//! then scene medium (haze, droplets), then the sensor (low light or
//! over-exposure, mutually exclusive), then gamma encoding, then digital
//! codecs (low resolution before block quantization).

use crate::digital::{apply_jpeg, apply_low_res};
use crate::meteo::{apply_droplets, apply_haze};
use crate::optical::{
    apply_defocus, apply_distortion_with_depth, apply_motion_blur, motion_blur_warp,
};
use crate::photo::{apply_low_light, apply_over_exposure, SensorModel};
use crate::presets::{
    recipe, sample_params, DegradationKind, DegradationParams, RecipeName, Severity,
};
use crate::DegradeError;
use murk_core::color::{linear_to_srgb, srgb_to_linear};
use murk_core::{CameraView, DepthMap, LinearImage, Renderer, Rng, SrgbImage};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// One requested degradation: parameters either sampled from a severity
/// preset or given explicitly, plus the seed that pins every draw.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationSpec {
    pub kind: DegradationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub severity: Option<Severity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<DegradationParams>,
    pub seed: u64,
}

impl DegradationSpec {
    pub fn sampled(kind: DegradationKind, severity: Severity, seed: u64) -> Self {
        DegradationSpec { kind, severity: Some(severity), params: None, seed }
    }

    pub fn explicit(params: DegradationParams, seed: u64) -> Self {
        DegradationSpec { kind: params.kind(), severity: None, params: Some(params), seed }
    }

    pub fn validate(&self) -> Result<(), DegradeError> {
        match (&self.severity, &self.params) {
            (None, None) => {
                Err(DegradeError::domain("spec needs either a severity or explicit params"))
            }
            (_, Some(p)) if p.kind() != self.kind => Err(DegradeError::domain(format!(
                "params kind {} does not match spec kind {}",
                p.kind().name(),
                self.kind.name()
            ))),
            _ => Ok(()),
        }
    }

    /// Resolve to concrete parameters; sampling draws from the
    /// `(seed, "sample/<kind>")` stream.
    pub fn resolve(&self) -> Result<ResolvedStage, DegradeError> {
        self.validate()?;
        let params = match &self.params {
            Some(p) => p.clone(),
            None => {
                let severity = self.severity.expect("validated above");
                let mut rng =
                    Rng::new(self.seed).stream(&format!("sample/{}", self.kind.name()));
                sample_params(self.kind, severity, &mut rng)
            }
        };
        Ok(ResolvedStage {
            kind: self.kind,
            severity: self.severity,
            params,
            seed: self.seed,
        })
    }
}

/// A spec with its parameters pinned (what manifests record).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedStage {
    pub kind: DegradationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub severity: Option<Severity>,
    pub params: DegradationParams,
    pub seed: u64,
}

/// Canonical stage rank; sorting by it yields physical formation order.
fn stage_rank(kind: DegradationKind) -> u8 {
    match kind {
        DegradationKind::MotionBlur => 0,
        DegradationKind::Defocus => 1,
        DegradationKind::Distortion => 2,
        DegradationKind::Haze => 3,
        DegradationKind::WaterDroplets => 4,
        DegradationKind::LowLight | DegradationKind::OverExposure => 5,
        DegradationKind::LowRes => 6,
        DegradationKind::JpegCompression => 7,
    }
}

/// Replayable record of an applied chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegradationManifest {
    pub schema_version: u32,
    pub input_id: String,
    pub output_id: String,
    /// Stages in the order they were applied, with resolved parameters.
    pub stages: Vec<ResolvedStage>,
    /// Labels of approximated stages (e.g. warp-mode motion blur).
    pub approximations: Vec<String>,
    /// SHA-256 of the quantized 8-bit output (dimensions prepended).
    pub output_sha256: String,
}

impl DegradationManifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, DegradeError> {
        let m: DegradationManifest =
            serde_json::from_str(json).map_err(|e| DegradeError::format(e.to_string()))?;
        if m.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(DegradeError::format(format!(
                "unsupported manifest schema version {}",
                m.schema_version
            )));
        }
        Ok(m)
    }
}

/// Content hash of a quantized sRGB raster: dimensions then RGB8 bytes.
pub fn content_hash(img: &SrgbImage) -> String {
    let mut hasher = Sha256::new();
    hasher.update((img.width() as u32).to_le_bytes());
    hasher.update((img.height() as u32).to_le_bytes());
    hasher.update(img.to_rgb8());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Chain input: either a linear render (color + depth) or an encoded image
/// with optional depth sidecar.
#[derive(Debug, Clone)]
pub enum ChainInput<'a> {
    Linear { color: &'a LinearImage, depth: Option<&'a DepthMap> },
    Srgb { image: &'a SrgbImage, depth: Option<&'a DepthMap> },
}

impl ChainInput<'_> {
    fn dims(&self) -> (usize, usize) {
        match self {
            ChainInput::Linear { color, .. } => (color.width(), color.height()),
            ChainInput::Srgb { image, .. } => (image.width(), image.height()),
        }
    }
}

/// Everything a chain may need beyond the pixels.
pub struct ChainContext<'a> {
    /// Re-render capability for motion blur; without it the chain falls back
    /// to the approximate depth-warp mode.
    pub renderer: Option<&'a (dyn Renderer + Sync)>,
    /// Camera view of the input frame (required by motion blur and
    /// distortion).
    pub view: Option<CameraView>,
    pub sensor: SensorModel,
    pub input_id: String,
    pub output_id: String,
}

impl Default for ChainContext<'_> {
    fn default() -> Self {
        ChainContext {
            renderer: None,
            view: None,
            sensor: SensorModel::default(),
            input_id: "input".into(),
            output_id: "output".into(),
        }
    }
}

/// Apply a list of degradation specs in canonical order and record a
/// replayable manifest.
pub fn apply_chain(
    input: &ChainInput<'_>,
    specs: &[DegradationSpec],
    ctx: &ChainContext<'_>,
) -> Result<(SrgbImage, DegradationManifest), DegradeError> {
    let resolved: Vec<ResolvedStage> =
        specs.iter().map(|s| s.resolve()).collect::<Result<_, _>>()?;
    run_stages(input, resolved, ctx)
}

/// Re-run a manifest against the same input; output is bit-identical when the
/// input matches.
pub fn replay(
    manifest: &DegradationManifest,
    input: &ChainInput<'_>,
    ctx: &ChainContext<'_>,
) -> Result<(SrgbImage, DegradationManifest), DegradeError> {
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(DegradeError::format(format!(
            "unsupported manifest schema version {}",
            manifest.schema_version
        )));
    }
    run_stages(input, manifest.stages.clone(), ctx)
}

fn run_stages(
    input: &ChainInput<'_>,
    mut stages: Vec<ResolvedStage>,
    ctx: &ChainContext<'_>,
) -> Result<(SrgbImage, DegradationManifest), DegradeError> {
    if stages.is_empty() {
        return Err(DegradeError::domain("degradation chain must not be empty"));
    }
    let low = stages.iter().filter(|s| s.kind == DegradationKind::LowLight).count();
    let over = stages.iter().filter(|s| s.kind == DegradationKind::OverExposure).count();
    if low > 0 && over > 0 {
        return Err(DegradeError::domain(
            "low_light and over_exposure are mutually exclusive in one chain",
        ));
    }
    stages.sort_by_key(|s| stage_rank(s.kind));

    let (width, height) = input.dims();
    let needs_depth = stages.iter().any(|s| {
        matches!(s.kind, DegradationKind::Defocus | DegradationKind::Haze)
    });
    let has_depth = matches!(
        input,
        ChainInput::Linear { depth: Some(_), .. } | ChainInput::Srgb { depth: Some(_), .. }
    );
    if needs_depth && !has_depth {
        return Err(DegradeError::domain("defocus and haze require a depth map"));
    }

    let (mut color, mut depth): (LinearImage, Option<DepthMap>) = match input {
        ChainInput::Linear { color, depth } => ((*color).clone(), depth.map(|d| (*d).clone())),
        ChainInput::Srgb { image, depth } => {
            (srgb_to_linear(image), depth.map(|d| (*d).clone()))
        }
    };

    let mut approximations = Vec::new();

    // Linear-light stages.
    for stage in &stages {
        match &stage.params {
            DegradationParams::MotionBlur(p) => {
                let view = ctx.view.ok_or_else(|| {
                    DegradeError::domain("motion blur requires a camera view")
                })?;
                match ctx.renderer {
                    Some(renderer) => {
                        color = apply_motion_blur(renderer, &view, width, height, p)?;
                        // Depth of the exposure anchored at the start pose.
                        depth = Some(renderer.render_view(&view, width, height).depth);
                    }
                    None => {
                        let d = depth.as_ref().ok_or_else(|| {
                            DegradeError::domain(
                                "motion blur without a renderer needs a depth map",
                            )
                        })?;
                        color = motion_blur_warp(&color, d, &view, p)?;
                        approximations.push("motion_blur:warp".to_string());
                    }
                }
            }
            DegradationParams::Defocus(p) => {
                let d = depth
                    .as_ref()
                    .ok_or_else(|| DegradeError::domain("defocus requires a depth map"))?;
                color = apply_defocus(&color, d, p)?;
            }
            DegradationParams::Distortion(p) => {
                let view = ctx.view.ok_or_else(|| {
                    DegradeError::domain("distortion requires a camera view")
                })?;
                match depth.take() {
                    Some(d) => {
                        let (c, nd) = apply_distortion_with_depth(&color, &d, &view, p)?;
                        color = c;
                        depth = Some(nd);
                    }
                    None => {
                        color = crate::optical::apply_distortion(&color, &view, p)?;
                    }
                }
            }
            DegradationParams::Haze(p) => {
                let d = depth
                    .as_ref()
                    .ok_or_else(|| DegradeError::domain("haze requires a depth map"))?;
                color = apply_haze(&color, d, p)?;
            }
            DegradationParams::WaterDroplets(p) => {
                color = apply_droplets(&color, p)?;
            }
            DegradationParams::LowLight(p) => {
                let rng = Rng::new(stage.seed).stream("low_light/noise");
                color = apply_low_light(&color, p, &ctx.sensor, &rng)?;
            }
            DegradationParams::OverExposure(p) => {
                let rng = Rng::new(stage.seed).stream("over_exposure/noise");
                color = apply_over_exposure(&color, p, &ctx.sensor, &rng)?;
            }
            DegradationParams::LowRes(_) | DegradationParams::JpegCompression(_) => {}
        }
    }

    // Encode, then digital stages.
    let mut encoded = linear_to_srgb(&color);
    for stage in &stages {
        match &stage.params {
            DegradationParams::LowRes(p) => {
                encoded = apply_low_res(&encoded, p)?;
            }
            DegradationParams::JpegCompression(p) => {
                encoded = apply_jpeg(&encoded, p)?;
            }
            _ => {}
        }
    }

    let manifest = DegradationManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        input_id: ctx.input_id.clone(),
        output_id: ctx.output_id.clone(),
        stages,
        approximations,
        output_sha256: content_hash(&encoded),
    };
    Ok((encoded, manifest))
}

/// Specs for a named mixture recipe: the primary member at bench severity,
/// auxiliaries at easy, per-stage seeds derived from `seed`.
pub fn recipe_specs(name: RecipeName, seed: u64) -> Vec<DegradationSpec> {
    let r = recipe(name);
    let root = Rng::new(seed);
    let mut specs = Vec::with_capacity(1 + r.auxiliaries.len());
    let mut stage_seed = |idx: u64| root.stream_idx("recipe-stage", idx).next_u64();
    specs.push(DegradationSpec::sampled(r.primary, Severity::Bench, stage_seed(0)));
    for (i, aux) in r.auxiliaries.iter().enumerate() {
        specs.push(DegradationSpec::sampled(*aux, Severity::Easy, stage_seed(i as u64 + 1)));
    }
    specs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meteo::HazeParams;

    fn gradient_linear(w: usize, h: usize) -> LinearImage {
        let mut img = LinearImage::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                img.set_pixel(
                    x,
                    y,
                    [x as f64 / w as f64, y as f64 / h as f64, 0.25],
                );
            }
        }
        img
    }

    fn ramp_depth(w: usize, h: usize) -> DepthMap {
        let mut d = DepthMap::zeros(w, h);
        for y in 0..h {
            for x in 0..w {
                d.set(x, y, 1.0 + 4.0 * (y as f64 / h as f64));
            }
        }
        d
    }

    #[test]
    fn single_haze_chain_equals_direct_haze_plus_encode() {
        let img = gradient_linear(24, 18);
        let depth = ramp_depth(24, 18);
        let p = HazeParams { density: 4.0, atmospheric_light: 0.9 };
        let spec = DegradationSpec::explicit(DegradationParams::Haze(p), 1);
        let (out, manifest) = apply_chain(
            &ChainInput::Linear { color: &img, depth: Some(&depth) },
            &[spec],
            &ChainContext::default(),
        )
        .unwrap();
        let direct = linear_to_srgb(&apply_haze(&img, &depth, &p).unwrap());
        assert_eq!(out.data(), direct.data());
        assert_eq!(manifest.stages.len(), 1);
        assert!(manifest.approximations.is_empty());
    }

    #[test]
    fn stage_order_is_canonical_regardless_of_listing() {
        let img = gradient_linear(24, 18);
        let depth = ramp_depth(24, 18);
        let specs_a = vec![
            DegradationSpec::explicit(
                DegradationParams::JpegCompression(crate::digital::JpegParams { quality: 5 }),
                3,
            ),
            DegradationSpec::explicit(
                DegradationParams::Haze(HazeParams { density: 4.0, atmospheric_light: 0.9 }),
                2,
            ),
            DegradationSpec::explicit(
                DegradationParams::LowRes(crate::digital::LowResParams { scale: 0.25 }),
                1,
            ),
        ];
        let mut specs_b = specs_a.clone();
        specs_b.reverse();
        let input = ChainInput::Linear { color: &img, depth: Some(&depth) };
        let ctx = ChainContext::default();
        let (out_a, man_a) = apply_chain(&input, &specs_a, &ctx).unwrap();
        let (out_b, man_b) = apply_chain(&input, &specs_b, &ctx).unwrap();
        assert_eq!(out_a.data(), out_b.data());
        assert_eq!(man_a.output_sha256, man_b.output_sha256);
        let kinds: Vec<_> = man_a.stages.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                DegradationKind::Haze,
                DegradationKind::LowRes,
                DegradationKind::JpegCompression
            ]
        );
    }

    #[test]
    fn exclusive_sensor_stages_rejected() {
        let img = gradient_linear(16, 16);
        let specs = vec![
            DegradationSpec::sampled(DegradationKind::LowLight, Severity::Bench, 1),
            DegradationSpec::sampled(DegradationKind::OverExposure, Severity::Bench, 2),
        ];
        let err = apply_chain(
            &ChainInput::Linear { color: &img, depth: None },
            &specs,
            &ChainContext::default(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn missing_depth_for_defocus_or_haze_rejected() {
        let img = gradient_linear(16, 16);
        for kind in [DegradationKind::Defocus, DegradationKind::Haze] {
            let specs = vec![DegradationSpec::sampled(kind, Severity::Bench, 1)];
            assert!(apply_chain(
                &ChainInput::Linear { color: &img, depth: None },
                &specs,
                &ChainContext::default(),
            )
            .is_err());
        }
    }

    #[test]
    fn empty_chain_rejected() {
        let img = gradient_linear(16, 16);
        assert!(apply_chain(
            &ChainInput::Linear { color: &img, depth: None },
            &[],
            &ChainContext::default(),
        )
        .is_err());
    }

    #[test]
    fn manifest_roundtrips_and_replays_bit_identically() {
        let img = gradient_linear(32, 24);
        let depth = ramp_depth(32, 24);
        let specs = vec![
            DegradationSpec::sampled(DegradationKind::Haze, Severity::Bench, 77),
            DegradationSpec::sampled(DegradationKind::LowLight, Severity::Easy, 78),
            DegradationSpec::sampled(DegradationKind::JpegCompression, Severity::Easy, 79),
        ];
        let input = ChainInput::Linear { color: &img, depth: Some(&depth) };
        let ctx = ChainContext::default();
        let (out, manifest) = apply_chain(&input, &specs, &ctx).unwrap();

        let json = manifest.to_json();
        let parsed = DegradationManifest::from_json(&json).unwrap();
        assert_eq!(parsed, manifest);

        let (replayed, re_manifest) = replay(&parsed, &input, &ctx).unwrap();
        assert_eq!(replayed.data(), out.data());
        assert_eq!(re_manifest.output_sha256, manifest.output_sha256);

        // Tampering with the seed of a stochastic stage changes the output
        // hash. Use a chain whose last stage keeps per-pixel noise visible
        // (block quantization at bench quality would crush single-seed
        // differences on a tiny fixture).
        let noise_specs = vec![
            DegradationSpec::sampled(DegradationKind::Haze, Severity::Bench, 77),
            DegradationSpec::sampled(DegradationKind::LowLight, Severity::Easy, 78),
        ];
        let (_, noise_manifest) = apply_chain(&input, &noise_specs, &ctx).unwrap();
        let mut tampered = noise_manifest.clone();
        tampered.stages[1].seed ^= 1;
        let (_, bad_manifest) = replay(&tampered, &input, &ctx).unwrap();
        assert_ne!(bad_manifest.output_sha256, noise_manifest.output_sha256);
    }

    #[test]
    fn manifest_version_gate() {
        let img = gradient_linear(16, 16);
        let specs =
            vec![DegradationSpec::sampled(DegradationKind::OverExposure, Severity::Bench, 5)];
        let input = ChainInput::Linear { color: &img, depth: None };
        let ctx = ChainContext::default();
        let (_, mut manifest) = apply_chain(&input, &specs, &ctx).unwrap();
        manifest.schema_version = 99;
        assert!(replay(&manifest, &input, &ctx).is_err());
        assert!(DegradationManifest::from_json(&manifest.to_json()).is_err());
    }

    #[test]
    fn compressed_portrait_recipe_yields_defocus_then_jpeg() {
        let specs = recipe_specs(RecipeName::CompressedPortrait, 42);
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].kind, DegradationKind::Defocus);
        assert_eq!(specs[0].severity, Some(Severity::Bench));
        assert_eq!(specs[1].kind, DegradationKind::JpegCompression);
        assert_eq!(specs[1].severity, Some(Severity::Easy));

        let img = gradient_linear(32, 24);
        let depth = ramp_depth(32, 24);
        let (_, manifest) = apply_chain(
            &ChainInput::Linear { color: &img, depth: Some(&depth) },
            &specs,
            &ChainContext::default(),
        )
        .unwrap();
        let kinds: Vec<_> = manifest.stages.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![DegradationKind::Defocus, DegradationKind::JpegCompression]);
    }

    #[test]
    fn spec_validation_rules() {
        let mut spec = DegradationSpec::sampled(DegradationKind::Haze, Severity::Bench, 1);
        spec.severity = None;
        assert!(spec.validate().is_err());

        let mismatched = DegradationSpec {
            kind: DegradationKind::Defocus,
            severity: None,
            params: Some(DegradationParams::Haze(HazeParams {
                density: 4.0,
                atmospheric_light: 0.9,
            })),
            seed: 0,
        };
        assert!(mismatched.validate().is_err());
    }

    #[test]
    fn srgb_input_chain_decodes_first() {
        let srgb = SrgbImage::filled(16, 16, [0.5, 0.5, 0.5]);
        let specs =
            vec![DegradationSpec::sampled(DegradationKind::OverExposure, Severity::Bench, 9)];
        let (out, _) = apply_chain(
            &ChainInput::Srgb { image: &srgb, depth: None },
            &specs,
            &ChainContext::default(),
        )
        .unwrap();
        // Gain 7..10 on mid-gray saturates almost everything.
        let mean = out.data().iter().sum::<f64>() / out.data().len() as f64;
        assert!(mean > 0.9, "mean {mean}");
    }
}
