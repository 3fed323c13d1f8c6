//! Boundary control and geometric ambiguity filters.

use crate::types::Instance3D;
use crate::QaError;
use murk_core::{Rng, Vec3};

/// Factor band forced to its boundary for thresholded translation questions.
pub const FACTOR_BAND: (f64, f64) = (0.85, 1.15);

/// Minimum anchor-reference separation for triplet local frames, meters.
pub const TRIPLET_MIN_SEPARATION: f64 = 0.15;

/// |cos| cutoff past which a triplet forward axis counts as collinear with up.
pub const TRIPLET_COLLINEAR_COS: f64 = 0.95;

/// Extent difference under which two objects compare as the same size.
pub const SIZE_TIE_BAND: f64 = 1e-2;

/// Thresholded-translation ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TranslationThreshold {
    /// Factor actually used (never strictly inside the excluded band).
    pub factor: f64,
    pub threshold: f64,
    /// True iff the real distance exceeds the threshold.
    pub answer_yes: bool,
}

/// Draw a decision threshold for "did the camera move more than X meters":
/// factor uniform in `[0.5, 1.5]`, values strictly inside `(0.85, 1.15)`
/// snap to the nearer boundary (ties at 1.0 go to 0.85).
pub fn threshold_for_translation(
    distance: f64,
    rng: &mut Rng,
) -> Result<TranslationThreshold, QaError> {
    if distance <= 0.0 {
        return Err(QaError::domain("threshold needs a positive distance"));
    }
    let raw = rng.uniform(0.5, 1.5);
    let factor = if raw > FACTOR_BAND.0 && raw < FACTOR_BAND.1 {
        if raw <= 1.0 {
            FACTOR_BAND.0
        } else {
            FACTOR_BAND.1
        }
    } else {
        raw
    };
    let threshold = factor * distance;
    Ok(TranslationThreshold { factor, threshold, answer_yes: distance > threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeOrdering {
    First,
    Second,
    Same,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeMode {
    /// Compare the longest box edges.
    Longer,
    /// Compare the height extents.
    Taller,
}

/// Compare two boxes; differences under [`SIZE_TIE_BAND`] meters tie.
pub fn size_compare(e1: [f64; 3], e2: [f64; 3], mode: SizeMode) -> SizeOrdering {
    let (v1, v2) = match mode {
        SizeMode::Longer => (
            e1.iter().cloned().fold(f64::MIN, f64::max),
            e2.iter().cloned().fold(f64::MIN, f64::max),
        ),
        SizeMode::Taller => (e1[2], e2[2]),
    };
    if (v1 - v2).abs() < SIZE_TIE_BAND {
        SizeOrdering::Same
    } else if v1 > v2 {
        SizeOrdering::First
    } else {
        SizeOrdering::Second
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripletVerdict {
    Accept,
    /// Rejected with the failed condition.
    Reject(&'static str),
}

fn boxes_intersect(a: &Instance3D, b: &Instance3D) -> bool {
    (0..3).all(|i| (a.center[i] - b.center[i]).abs() < (a.extents[i] + b.extents[i]) * 0.5)
}

/// Filter a (anchor, reference, target) triplet before building its local
/// frame: no intersecting boxes, anchor and reference well separated, and
/// the anchor-to-reference axis not collinear with world up.
pub fn triplet_filter(
    anchor: &Instance3D,
    reference: &Instance3D,
    target: &Instance3D,
    up: Vec3,
) -> TripletVerdict {
    let items = [anchor, reference, target];
    for i in 0..3 {
        for j in (i + 1)..3 {
            if boxes_intersect(items[i], items[j]) {
                return TripletVerdict::Reject("intersecting boxes");
            }
        }
    }
    let axis = reference.center_vec() - anchor.center_vec();
    if axis.norm() < TRIPLET_MIN_SEPARATION {
        return TripletVerdict::Reject("anchor and reference too close");
    }
    if axis.normalized().dot(up.normalized()).abs() > TRIPLET_COLLINEAR_COS {
        return TripletVerdict::Reject("forward axis collinear with up");
    }
    TripletVerdict::Accept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(id: &str, center: [f64; 3], extents: [f64; 3]) -> Instance3D {
        Instance3D {
            id: id.into(),
            label: id.into(),
            center,
            extents,
            visible_views: vec![],
        }
    }

    #[test]
    fn factor_band_is_excluded_over_many_draws() {
        let mut rng = Rng::new(40);
        for _ in 0..100_000 {
            let t = threshold_for_translation(2.0, &mut rng).unwrap();
            assert!(
                t.factor <= FACTOR_BAND.0 || t.factor >= FACTOR_BAND.1,
                "factor {} inside the band",
                t.factor
            );
            assert!((0.5..=1.5).contains(&t.factor));
            assert_eq!(t.answer_yes, 2.0 > t.threshold);
        }
    }

    #[test]
    fn snap_arithmetic() {
        // Factor 0.85 on distance 2.0: threshold 1.7, answer yes.
        let t = TranslationThreshold { factor: 0.85, threshold: 0.85 * 2.0, answer_yes: true };
        assert!((t.threshold - 1.7).abs() < 1e-12);
        assert!(2.0 > t.threshold);
        // The tie at exactly 1.0 snaps down to 0.85 by convention: both
        // branches of the snap rule agree that 1.0 maps to the lower edge.
        let raw = 1.0f64;
        let snapped = if raw > FACTOR_BAND.0 && raw < FACTOR_BAND.1 {
            if raw <= 1.0 {
                FACTOR_BAND.0
            } else {
                FACTOR_BAND.1
            }
        } else {
            raw
        };
        assert_eq!(snapped, 0.85);
    }

    #[test]
    fn out_of_band_factors_pass_through() {
        // Values outside (0.85, 1.15) are kept; verify via many draws that
        // both tails appear untouched.
        let mut rng = Rng::new(41);
        let mut saw_low = false;
        let mut saw_high = false;
        for _ in 0..10_000 {
            let t = threshold_for_translation(1.0, &mut rng).unwrap();
            if t.factor < 0.85 {
                saw_low = true;
            }
            if t.factor > 1.15 {
                saw_high = true;
            }
        }
        assert!(saw_low && saw_high);
    }

    #[test]
    fn size_compare_reference_cases() {
        // Same max edge 0.5: tie regardless of the other extents.
        assert_eq!(
            size_compare([0.5, 0.4, 0.3], [0.5, 0.2, 0.1], SizeMode::Longer),
            SizeOrdering::Same
        );
        // Delta 0.005 < 0.01: still a tie.
        assert_eq!(
            size_compare([0.505, 0.1, 0.1], [0.500, 0.1, 0.1], SizeMode::Longer),
            SizeOrdering::Same
        );
        assert_eq!(
            size_compare([0.60, 0.1, 0.1], [0.50, 0.1, 0.1], SizeMode::Longer),
            SizeOrdering::First
        );
        // Taller compares only the height slot.
        assert_eq!(
            size_compare([0.9, 0.9, 0.3], [0.1, 0.1, 0.5], SizeMode::Taller),
            SizeOrdering::Second
        );
    }

    #[test]
    fn size_compare_antisymmetric_up_to_tie() {
        let mut rng = Rng::new(11);
        for _ in 0..1000 {
            let e1 = [rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)];
            let e2 = [rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)];
            for mode in [SizeMode::Longer, SizeMode::Taller] {
                let ab = size_compare(e1, e2, mode);
                let ba = size_compare(e2, e1, mode);
                match ab {
                    SizeOrdering::Same => assert_eq!(ba, SizeOrdering::Same),
                    SizeOrdering::First => assert_eq!(ba, SizeOrdering::Second),
                    SizeOrdering::Second => assert_eq!(ba, SizeOrdering::First),
                }
            }
        }
    }

    #[test]
    fn triplet_rejections() {
        let up = Vec3::new(0.0, 1.0, 0.0);
        let a = inst("a", [0.0, 0.0, 0.0], [0.4, 0.4, 0.4]);
        let b_overlap = inst("b", [0.2, 0.0, 0.0], [0.4, 0.4, 0.4]);
        let c = inst("c", [2.0, 0.0, 1.0], [0.3, 0.3, 0.3]);
        assert_eq!(
            triplet_filter(&a, &b_overlap, &c, up),
            TripletVerdict::Reject("intersecting boxes")
        );

        let b_close = inst("b", [0.05, 0.0, 0.45], [0.05, 0.05, 0.05]);
        assert_eq!(
            triplet_filter(&a, &b_close, &c, up),
            TripletVerdict::Reject("anchor and reference too close")
        );

        let b_above = inst("b", [0.0, 1.5, 0.0], [0.2, 0.2, 0.2]);
        assert_eq!(
            triplet_filter(&a, &b_above, &c, up),
            TripletVerdict::Reject("forward axis collinear with up")
        );

        let b_ok = inst("b", [1.2, 0.0, 0.3], [0.2, 0.2, 0.2]);
        assert_eq!(triplet_filter(&a, &b_ok, &c, up), TripletVerdict::Accept);
    }

    #[test]
    fn touching_boxes_do_not_intersect() {
        let a = inst("a", [0.0, 0.0, 0.0], [0.4, 0.4, 0.4]);
        let touch = inst("b", [0.4, 0.0, 0.0], [0.4, 0.4, 0.4]);
        assert!(!boxes_intersect(&a, &touch));
    }
}
