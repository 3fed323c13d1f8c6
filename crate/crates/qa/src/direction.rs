//! Direction labeling: dominant translation axes and the eight-sector
//! bearing classification with boundary-aware distractor suppression.
//!
//! Camera frame: `+x` right, `+y` down, `+z` forward. Bearings are measured
//! in degrees from straight-ahead, increasing toward the right.

use crate::QaError;
use murk_core::Vec3;

/// Component-ratio threshold tan(30 deg): a secondary axis joins the label
/// only when it reaches this fraction of the dominant one.
pub const SECONDARY_AXIS_RATIO: f64 = 0.5774;

/// Sector labels in bearing order, 45 degrees each, sector 0 centered on
/// straight-ahead.
pub const SECTOR_LABELS: [&str; 8] = [
    "front",
    "front-right",
    "right",
    "back-right",
    "back",
    "back-left",
    "left",
    "front-left",
];

/// Degrees from a sector boundary under which the adjacent sector is banned
/// as a distractor.
pub const BOUNDARY_GUARD_DEG: f64 = 3.0;

/// Dominant-axis translation label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranslationDirection {
    pub primary: &'static str,
    pub secondary: Option<&'static str>,
}

impl TranslationDirection {
    pub fn label(&self) -> String {
        match self.secondary {
            Some(s) => format!("{}-{s}", self.primary),
            None => self.primary.to_string(),
        }
    }
}

/// All one- and two-axis labels a translation MCQ may draw from.
pub fn translation_label_pool() -> Vec<String> {
    let singles = ["forward", "backward", "left", "right", "up", "down"];
    let mut pool: Vec<String> = singles.iter().map(|s| s.to_string()).collect();
    let compat = [
        ("forward", "left"),
        ("forward", "right"),
        ("forward", "up"),
        ("forward", "down"),
        ("backward", "left"),
        ("backward", "right"),
        ("backward", "up"),
        ("backward", "down"),
        ("left", "up"),
        ("left", "down"),
        ("right", "up"),
        ("right", "down"),
    ];
    for (a, b) in compat {
        pool.push(format!("{a}-{b}"));
        pool.push(format!("{b}-{a}"));
    }
    pool
}

fn axis_token(axis: usize, positive: bool) -> &'static str {
    match (axis, positive) {
        (0, true) => "right",
        (0, false) => "left",
        (1, true) => "down",
        (1, false) => "up",
        (2, true) => "forward",
        (_, _) => "backward",
    }
}

/// Label a camera-frame displacement by its dominant axis, appending the
/// second-strongest axis only when it reaches `SECONDARY_AXIS_RATIO` of the
/// dominant magnitude. Scale-invariant by construction.
pub fn dominant_translation_direction(t: Vec3) -> Result<TranslationDirection, QaError> {
    let comps = [t.x, t.y, t.z];
    let mags = [t.x.abs(), t.y.abs(), t.z.abs()];
    if mags.iter().all(|m| *m == 0.0) {
        return Err(QaError::domain("translation direction of a zero vector"));
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| mags[b].partial_cmp(&mags[a]).unwrap());
    let primary = axis_token(order[0], comps[order[0]] > 0.0);
    let secondary = if mags[order[1]] >= SECONDARY_AXIS_RATIO * mags[order[0]] {
        Some(axis_token(order[1], comps[order[1]] > 0.0))
    } else {
        None
    };
    Ok(TranslationDirection { primary, secondary })
}

/// Sector index `floor(((yaw + 22.5) mod 360) / 45)` and its label.
pub fn sector_classify(yaw_deg: f64) -> (usize, &'static str) {
    let idx = (((yaw_deg + 22.5).rem_euclid(360.0)) / 45.0).floor() as usize % 8;
    (idx, SECTOR_LABELS[idx])
}

/// When `yaw` sits within `BOUNDARY_GUARD_DEG` of a sector boundary, the
/// sector across that boundary (forbidden as a distractor); `None` otherwise.
pub fn forbidden_neighbor(yaw_deg: f64) -> Option<usize> {
    let yaw = yaw_deg.rem_euclid(360.0);
    let (sector, _) = sector_classify(yaw);
    let center = 45.0 * sector as f64;
    // Signed offset from the sector center in (-22.5, 22.5].
    let mut off = yaw - center;
    if off > 180.0 {
        off -= 360.0;
    } else if off < -180.0 {
        off += 360.0;
    }
    let to_upper = 22.5 - off;
    let to_lower = off + 22.5;
    if to_upper < BOUNDARY_GUARD_DEG {
        Some((sector + 1) % 8)
    } else if to_lower < BOUNDARY_GUARD_DEG {
        Some((sector + 7) % 8)
    } else {
        None
    }
}

/// Bearing of a camera-frame point: degrees in `[0, 360)`, 0 = ahead,
/// increasing to the right.
pub fn camera_bearing_deg(p: Vec3) -> f64 {
    p.x.atan2(p.z).to_degrees().rem_euclid(360.0)
}

/// Horizontal world-frame bearing of `to` as seen from `from`, measured
/// about `up` against a fixed reference basis. Returns `None` when the
/// horizontal component is negligible.
pub fn world_bearing_deg(from: Vec3, to: Vec3, up: Vec3) -> Option<f64> {
    let up = up.normalized();
    let v = to - from;
    let v_h = v - up.scale(v.dot(up));
    if v_h.norm() < 1e-9 {
        return None;
    }
    let helper = if up.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 0.0, 1.0) };
    let e0 = up.cross(helper).normalized();
    let e1 = up.cross(e0);
    Some(v_h.dot(e1).atan2(v_h.dot(e0)).to_degrees().rem_euclid(360.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_axis_translations() {
        let d = dominant_translation_direction(Vec3::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!(d.label(), "forward");
        let d = dominant_translation_direction(Vec3::new(-2.0, 0.0, 0.0)).unwrap();
        assert_eq!(d.label(), "left");
        let d = dominant_translation_direction(Vec3::new(0.0, 0.4, 0.0)).unwrap();
        assert_eq!(d.label(), "down");
    }

    #[test]
    fn secondary_axis_ratio_boundary() {
        // 0.5 < 0.5774: single-axis label.
        let d = dominant_translation_direction(Vec3::new(0.5, 0.0, 1.0)).unwrap();
        assert_eq!(d.label(), "forward");
        // 0.6 >= 0.5774: two-axis label.
        let d = dominant_translation_direction(Vec3::new(0.6, 0.0, 1.0)).unwrap();
        assert_eq!(d.label(), "forward-right");
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(dominant_translation_direction(Vec3::ZERO).is_err());
    }

    #[test]
    fn direction_is_scale_invariant() {
        for scale in [1e-6, 1.0, 1e6] {
            let d =
                dominant_translation_direction(Vec3::new(0.6, 0.1, 1.0).scale(scale)).unwrap();
            assert_eq!(d.label(), "forward-right");
        }
    }

    #[test]
    fn sector_reference_values() {
        assert_eq!(sector_classify(0.0), (0, "front"));
        assert_eq!(sector_classify(90.0), (2, "right"));
        assert_eq!(sector_classify(180.0), (4, "back"));
        assert_eq!(sector_classify(270.0), (6, "left"));
        assert_eq!(sector_classify(22.4).1, "front");
        assert_eq!(sector_classify(22.6).1, "front-right");
    }

    #[test]
    fn sector_shift_property() {
        // sector(yaw + 45) == sector(yaw) + 1 (mod 8) over a 0.1-degree grid.
        let mut yaw = 0.0;
        while yaw < 360.0 {
            let (s, _) = sector_classify(yaw);
            let (s_next, _) = sector_classify(yaw + 45.0);
            assert_eq!(s_next, (s + 1) % 8, "yaw {yaw}");
            yaw += 0.1;
        }
    }

    #[test]
    fn forbidden_neighbor_reference_values() {
        // 1.5 deg below the 22.5 boundary: forbid front-right.
        assert_eq!(forbidden_neighbor(21.0), Some(1));
        // Sector centers are 22.5 deg from both boundaries.
        assert_eq!(forbidden_neighbor(0.0), None);
        // 2.0 deg above the 22.5 boundary: forbid front.
        assert_eq!(forbidden_neighbor(24.5), Some(0));
    }

    #[test]
    fn forbidden_neighbor_none_iff_far_from_boundary() {
        let mut yaw = 0.0f64;
        while yaw < 360.0 {
            let dist = {
                // Distance to the nearest boundary at 22.5 + 45k.
                let m = (yaw - 22.5).rem_euclid(45.0);
                m.min(45.0 - m)
            };
            let fb = forbidden_neighbor(yaw);
            if dist < BOUNDARY_GUARD_DEG - 1e-9 {
                assert!(fb.is_some(), "yaw {yaw} dist {dist}");
            } else if dist > BOUNDARY_GUARD_DEG + 1e-9 {
                assert!(fb.is_none(), "yaw {yaw} dist {dist}");
            }
            yaw += 0.1;
        }
    }

    #[test]
    fn camera_bearing_axes() {
        assert!((camera_bearing_deg(Vec3::new(0.0, 0.0, 2.0)) - 0.0).abs() < 1e-9);
        assert!((camera_bearing_deg(Vec3::new(2.0, 0.0, 0.0)) - 90.0).abs() < 1e-9);
        assert!((camera_bearing_deg(Vec3::new(0.0, 0.0, -2.0)) - 180.0).abs() < 1e-9);
        assert!((camera_bearing_deg(Vec3::new(-2.0, 0.0, 0.0)) - 270.0).abs() < 1e-9);
    }

    #[test]
    fn world_bearing_rotates_consistently() {
        let up = Vec3::new(0.0, 1.0, 0.0);
        let from = Vec3::ZERO;
        let b0 = world_bearing_deg(from, Vec3::new(0.0, 0.0, 1.0), up).unwrap();
        let b90 = world_bearing_deg(from, Vec3::new(1.0, 0.0, 0.0), up).unwrap();
        // Quarter turn apart, orientation fixed by the basis convention.
        let diff = (b90 - b0).rem_euclid(360.0);
        assert!((diff - 90.0).abs() < 1e-9 || (diff - 270.0).abs() < 1e-9);
        // Vertical displacement has no bearing.
        assert!(world_bearing_deg(from, Vec3::new(0.0, 5.0, 0.0), up).is_none());
    }
}
