//! Scene description: textured primitives, lighting constants, camera presets.

use crate::RenderError;
use murk_core::{Rng, Vec3};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Procedural albedo texture. All variants are pure functions of surface
/// coordinates and the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Texture {
    Solid { rgb: [f64; 3] },
    /// Two-color checkerboard over the surface parameterization.
    Checker { cell: f64, seed: u64 },
    /// Smooth two-color gradient along one surface axis.
    Gradient { seed: u64 },
}

impl Texture {
    /// Albedo at surface coordinates `(u, v)` in meters.
    pub fn albedo(&self, u: f64, v: f64) -> [f64; 3] {
        match self {
            Texture::Solid { rgb } => *rgb,
            Texture::Checker { cell, seed } => {
                let (a, b) = seeded_palette(*seed);
                let iu = (u / cell).floor() as i64;
                let iv = (v / cell).floor() as i64;
                if (iu + iv).rem_euclid(2) == 0 {
                    a
                } else {
                    b
                }
            }
            Texture::Gradient { seed } => {
                let (a, b) = seeded_palette(*seed);
                // Period-4m smooth ramp; stays in [0, 1].
                let t = 0.5 + 0.5 * (u * std::f64::consts::PI / 2.0).sin();
                [
                    a[0] + (b[0] - a[0]) * t,
                    a[1] + (b[1] - a[1]) * t,
                    a[2] + (b[2] - a[2]) * t,
                ]
            }
        }
    }
}

/// Two reproducible colors derived from a texture seed.
fn seeded_palette(seed: u64) -> ([f64; 3], [f64; 3]) {
    let mut rng = Rng::new(seed).stream("texture-palette");
    let mut c = || 0.15 + 0.7 * rng.next_f64();
    (([c(), c(), c()]), ([c(), c(), c()]))
}

/// Geometric support of a primitive, placed in world coordinates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    /// Axis-aligned box given by center and full extents.
    AaBox { center: [f64; 3], size: [f64; 3] },
    /// Infinite plane through `point` with unit `normal`.
    Plane { point: [f64; 3], normal: [f64; 3] },
    Sphere { center: [f64; 3], radius: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Primitive {
    pub shape: Shape,
    pub texture: Texture,
    /// Constant emission added on top of shaded albedo.
    #[serde(default)]
    pub emission: f64,
}

/// Named camera placement stored alongside the scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CameraPreset {
    pub name: String,
    pub eye: [f64; 3],
    pub target: [f64; 3],
    /// Focal length in pixels per unit image width of 1; scaled by width at
    /// render time when `fx_per_width` is used, otherwise `fx`/`fy` directly.
    #[serde(default)]
    pub fx: Option<f64>,
    #[serde(default)]
    pub fy: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scene {
    pub primitives: Vec<Primitive>,
    /// Ambient light level added to the Lambert term.
    pub ambient: f64,
    /// Background radiance where no primitive is hit.
    pub background: [f64; 3],
    /// Fixed directional light, pointing from the scene toward the light.
    pub light_dir: [f64; 3],
    #[serde(default)]
    pub cameras: Vec<CameraPreset>,
}

impl Scene {
    pub fn validate(&self) -> Result<(), RenderError> {
        if self.primitives.is_empty() {
            return Err(RenderError::domain("scene needs at least one primitive"));
        }
        let finite3 = |a: &[f64; 3]| a.iter().all(|v| v.is_finite());
        for p in &self.primitives {
            let ok = match &p.shape {
                Shape::AaBox { center, size } => {
                    finite3(center) && finite3(size) && size.iter().all(|s| *s > 0.0)
                }
                Shape::Plane { point, normal } => {
                    finite3(point)
                        && finite3(normal)
                        && Vec3::from_array(*normal).norm() > 1e-9
                }
                Shape::Sphere { center, radius } => finite3(center) && *radius > 0.0,
            };
            if !ok {
                return Err(RenderError::domain("primitive placement must be finite"));
            }
        }
        Ok(())
    }

    pub fn from_json(json: &str) -> Result<Scene, RenderError> {
        let scene: Scene =
            serde_json::from_str(json).map_err(|e| RenderError::SceneFile(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    pub fn from_file(path: &Path) -> Result<Scene, RenderError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RenderError::SceneFile(format!("{}: {e}", path.display())))?;
        Scene::from_json(&text)
    }

    pub fn light_dir_unit(&self) -> Vec3 {
        Vec3::from_array(self.light_dir).normalized()
    }

    /// Small indoor-style demo scene: a fronto-parallel back wall 3 m from the
    /// default camera, a floor, and a few textured objects.
    pub fn demo() -> Scene {
        Scene {
            primitives: vec![
                Primitive {
                    shape: Shape::Plane { point: [0.0, 0.0, 3.0], normal: [0.0, 0.0, -1.0] },
                    texture: Texture::Checker { cell: 0.4, seed: 11 },
                    emission: 0.0,
                },
                Primitive {
                    shape: Shape::Plane { point: [0.0, -1.0, 0.0], normal: [0.0, 1.0, 0.0] },
                    texture: Texture::Gradient { seed: 5 },
                    emission: 0.0,
                },
                Primitive {
                    shape: Shape::AaBox { center: [-0.6, -0.7, 2.2], size: [0.5, 0.6, 0.5] },
                    texture: Texture::Checker { cell: 0.12, seed: 23 },
                    emission: 0.0,
                },
                Primitive {
                    shape: Shape::Sphere { center: [0.55, -0.55, 1.8], radius: 0.35 },
                    texture: Texture::Solid { rgb: [0.75, 0.3, 0.2] },
                    emission: 0.05,
                },
                Primitive {
                    shape: Shape::AaBox { center: [0.2, -0.85, 1.2], size: [0.3, 0.3, 0.3] },
                    texture: Texture::Solid { rgb: [0.2, 0.4, 0.7] },
                    emission: 0.0,
                },
            ],
            ambient: 0.35,
            background: [0.02, 0.02, 0.03],
            light_dir: [0.4, 0.8, -0.45],
            cameras: vec![CameraPreset {
                name: "default".into(),
                eye: [0.0, 0.0, 0.0],
                target: [0.0, 0.0, 1.0],
                fx: None,
                fy: None,
            }],
        }
    }
}
