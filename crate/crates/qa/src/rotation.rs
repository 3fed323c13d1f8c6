//! Relative camera rotation: intrinsic yaw-pitch-roll decomposition in the
//! source camera frame, with the grey-zone dominance classification.
//!
//! Convention: yaw about the vertical (positive turns right), pitch about
//! camera-right (positive looks up), roll about the optical axis; the
//! composition order is yaw, then pitch, then roll (intrinsic).

use murk_core::{CameraView, Mat3};
use serde::Serialize;

/// Minimum total rotation for a rotation question, degrees.
pub const MIN_TOTAL_ROTATION_DEG: f64 = 5.0;

/// Component-ratio threshold between single- and dual-dominant classes.
pub const ROTATION_RATIO: f64 = 0.5774;

/// Grey-zone buffer around [`ROTATION_RATIO`].
pub const RATIO_BUFFER: f64 = 0.1;

/// Pitch magnitude past which the decomposition loses the yaw/roll split.
pub const GIMBAL_PITCH_DEG: f64 = 85.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationClass {
    SingleDominant,
    DualDominant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationReject {
    /// Total rotation below the 5-degree floor.
    BelowMinimum,
    /// Component ratio inside the grey zone around the threshold.
    GreyZone,
    /// Pitch too close to +-90 degrees for a stable decomposition.
    GimbalProximity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RotationAssessment {
    pub yaw_deg: f64,
    pub pitch_deg: f64,
    pub roll_deg: f64,
    pub total_deg: f64,
    pub outcome: Result<RotationClass, RotationReject>,
}

/// Yaw/pitch/roll of `R = Ryaw * Rpitch * Rroll` built from the axis
/// conventions above, in the camera frame (x right, y down, z forward).
pub fn decompose_yaw_pitch_roll(m: &Mat3) -> (f64, f64, f64) {
    // With Ry(yaw) about +y (down axis; positive yaw turns the forward axis
    // toward +x), Rx(pitch) about +x, Rz(roll) about +z:
    //   M[1][2] = -sin(pitch)
    //   M[0][2] / M[2][2] = tan(yaw)
    //   M[1][0] / M[1][1] = tan(roll)
    let sp = (-m.m[1][2]).clamp(-1.0, 1.0);
    let pitch = sp.asin();
    let yaw = m.m[0][2].atan2(m.m[2][2]);
    let roll = m.m[1][0].atan2(m.m[1][1]);
    (yaw.to_degrees(), pitch.to_degrees(), roll.to_degrees())
}

/// Compose a rotation from yaw/pitch/roll degrees (test and oracle hook).
pub fn compose_yaw_pitch_roll(yaw_deg: f64, pitch_deg: f64, roll_deg: f64) -> Mat3 {
    let (sy, cy) = yaw_deg.to_radians().sin_cos();
    let (sp, cp) = pitch_deg.to_radians().sin_cos();
    let (sr, cr) = roll_deg.to_radians().sin_cos();
    let ry = Mat3 { m: [[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]] };
    let rx = Mat3 { m: [[1.0, 0.0, 0.0], [0.0, cp, -sp], [0.0, sp, cp]] };
    let rz = Mat3 { m: [[cr, -sr, 0.0], [sr, cr, 0.0], [0.0, 0.0, 1.0]] };
    ry.mul_mat(&rx).mul_mat(&rz)
}

/// Relative rotation from view `a` to view `b` expressed in `a`'s camera
/// frame, decomposed and classified.
pub fn relative_rotation(a: &CameraView, b: &CameraView) -> RotationAssessment {
    let r_rel = b.rotation_matrix().mul_mat(&a.rotation_matrix().transpose());
    assess_rotation(&r_rel)
}

/// Classification core over an explicit relative rotation matrix.
pub fn assess_rotation(r_rel: &Mat3) -> RotationAssessment {
    let total_deg = r_rel.to_quat().angle().to_degrees();
    let (yaw_deg, pitch_deg, roll_deg) = decompose_yaw_pitch_roll(r_rel);

    let outcome = if total_deg < MIN_TOTAL_ROTATION_DEG {
        Err(RotationReject::BelowMinimum)
    } else if pitch_deg.abs() > GIMBAL_PITCH_DEG {
        Err(RotationReject::GimbalProximity)
    } else {
        let mut mags = [yaw_deg.abs(), pitch_deg.abs(), roll_deg.abs()];
        mags.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let ratio = if mags[0] > 0.0 { mags[1] / mags[0] } else { 0.0 };
        if ratio < ROTATION_RATIO - RATIO_BUFFER {
            Ok(RotationClass::SingleDominant)
        } else if ratio > ROTATION_RATIO + RATIO_BUFFER {
            Ok(RotationClass::DualDominant)
        } else {
            Err(RotationReject::GreyZone)
        }
    };

    RotationAssessment { yaw_deg, pitch_deg, roll_deg, total_deg, outcome }
}

#[cfg(test)]
mod tests {
    use super::*;
    use murk_core::{CameraView, Quat, Vec3};

    fn view_with_rotation(m: &Mat3) -> CameraView {
        CameraView::new(100.0, 100.0, 32.0, 24.0, m.to_quat(), Vec3::ZERO).unwrap()
    }

    #[test]
    fn identical_poses_rejected_below_minimum() {
        let a = view_with_rotation(&Mat3::IDENTITY);
        let r = relative_rotation(&a, &a);
        assert_eq!(r.outcome, Err(RotationReject::BelowMinimum));
        assert!(r.total_deg < 1e-9);
    }

    #[test]
    fn pure_yaw_is_single_dominant() {
        let a = view_with_rotation(&Mat3::IDENTITY);
        let b = view_with_rotation(&compose_yaw_pitch_roll(30.0, 0.0, 0.0));
        let r = relative_rotation(&a, &b);
        assert!((r.yaw_deg - 30.0).abs() < 1e-9, "yaw {}", r.yaw_deg);
        assert!(r.pitch_deg.abs() < 1e-9);
        assert!(r.roll_deg.abs() < 1e-9);
        assert_eq!(r.outcome, Ok(RotationClass::SingleDominant));
    }

    #[test]
    fn yaw20_pitch15_is_dual_dominant() {
        // Ratio 15/20 = 0.75 > 0.6774.
        let m = compose_yaw_pitch_roll(20.0, 15.0, 0.0);
        let r = assess_rotation(&m);
        assert!((r.yaw_deg - 20.0).abs() < 1e-9);
        assert!((r.pitch_deg - 15.0).abs() < 1e-9);
        assert_eq!(r.outcome, Ok(RotationClass::DualDominant));
    }

    #[test]
    fn grey_zone_band_rejected() {
        // Ratio exactly at the threshold (0.5774) sits in the buffer.
        let m = compose_yaw_pitch_roll(20.0, 20.0 * ROTATION_RATIO, 0.0);
        assert_eq!(assess_rotation(&m).outcome, Err(RotationReject::GreyZone));
        // Just under the lower edge: single-dominant.
        let m = compose_yaw_pitch_roll(20.0, 20.0 * (ROTATION_RATIO - RATIO_BUFFER) - 0.2, 0.0);
        assert_eq!(assess_rotation(&m).outcome, Ok(RotationClass::SingleDominant));
        // Just above the upper edge: dual-dominant.
        let m = compose_yaw_pitch_roll(20.0, 20.0 * (ROTATION_RATIO + RATIO_BUFFER) + 0.2, 0.0);
        assert_eq!(assess_rotation(&m).outcome, Ok(RotationClass::DualDominant));
    }

    #[test]
    fn gimbal_proximity_rejected() {
        let m = compose_yaw_pitch_roll(10.0, 88.0, 0.0);
        assert_eq!(assess_rotation(&m).outcome, Err(RotationReject::GimbalProximity));
    }

    #[test]
    fn decomposition_inverts_composition() {
        for (y, p, r) in [(35.0, -20.0, 10.0), (-60.0, 40.0, -25.0), (5.0, 0.0, 80.0)] {
            let m = compose_yaw_pitch_roll(y, p, r);
            let (yy, pp, rr) = decompose_yaw_pitch_roll(&m);
            assert!((yy - y).abs() < 1e-9, "yaw {yy} vs {y}");
            assert!((pp - p).abs() < 1e-9, "pitch {pp} vs {p}");
            assert!((rr - r).abs() < 1e-9, "roll {rr} vs {r}");
        }
    }

    #[test]
    fn positive_yaw_turns_forward_toward_camera_right() {
        let m = compose_yaw_pitch_roll(30.0, 0.0, 0.0);
        let fwd = m.mul_vec(Vec3::new(0.0, 0.0, 1.0));
        assert!(fwd.x > 0.0, "forward {fwd:?}");
        // And positive pitch raises the forward axis (camera y is down).
        let m = compose_yaw_pitch_roll(0.0, 20.0, 0.0);
        let fwd = m.mul_vec(Vec3::new(0.0, 0.0, 1.0));
        assert!(fwd.y < 0.0, "forward {fwd:?}");
    }

    #[test]
    fn matches_quaternion_total_angle() {
        let m = compose_yaw_pitch_roll(25.0, 10.0, 5.0);
        let q = m.to_quat();
        let r = assess_rotation(&m);
        assert!((r.total_deg - q.angle().to_degrees()).abs() < 1e-9);
        let _ = Quat::IDENTITY;
    }
}
