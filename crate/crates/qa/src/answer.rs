//! Ground-truth answer computation from camera extrinsics, box centers,
//! object extents, and relative directions.

use crate::direction::{camera_bearing_deg, dominant_translation_direction, sector_classify};
use crate::types::{AnswerValue, Instance3D};
use crate::QaError;
use murk_core::{CameraView, Vec3};

/// Straight-line distance between the two camera centers, meters.
pub fn camera_translation_distance(a: &CameraView, b: &CameraView) -> f64 {
    (b.center() - a.center()).norm()
}

/// Displacement of camera `b` expressed in `a`'s camera frame.
pub fn translation_in_frame(a: &CameraView, b: &CameraView) -> Vec3 {
    a.rotation.rotate(b.center() - a.center())
}

/// Distance from a camera center to a box center, meters.
pub fn camera_object_distance(view: &CameraView, instance: &Instance3D) -> f64 {
    (instance.center_vec() - view.center()).norm()
}

/// Distance between two box centers, meters.
pub fn inter_object_distance(a: &Instance3D, b: &Instance3D) -> f64 {
    (a.center_vec() - b.center_vec()).norm()
}

/// Box extents sorted ascending: `[shortest, middle, longest]`.
pub fn bbox_size_answer(instance: &Instance3D) -> [f64; 3] {
    let mut e = instance.extents;
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

/// Number of instances with `label` visible in `view_id`.
pub fn count_visible(label: &str, view_id: &str, instances: &[Instance3D]) -> usize {
    instances
        .iter()
        .filter(|i| i.label == label && i.visible_in(view_id))
        .count()
}

/// Whether any instance with `label` is visible in `view_id`.
pub fn exists_in_view(label: &str, view_id: &str, instances: &[Instance3D]) -> bool {
    count_visible(label, view_id, instances) > 0
}

/// Eight-sector bearing of an instance in a view's camera frame.
pub fn object_sector(view: &CameraView, instance: &Instance3D) -> (usize, &'static str) {
    let cam = view.world_to_camera(instance.center_vec());
    sector_classify(camera_bearing_deg(cam))
}

/// Structured request for one ground-truth value.
pub enum AnswerRequest<'a> {
    CameraTranslationDistance { a: &'a CameraView, b: &'a CameraView },
    CameraTranslationDirection { a: &'a CameraView, b: &'a CameraView },
    CameraObjectDistance { view: &'a CameraView, instance: &'a Instance3D },
    InterObjectDistance { a: &'a Instance3D, b: &'a Instance3D },
    BboxSize { instance: &'a Instance3D },
    CountVisible { label: &'a str, view_id: &'a str, instances: &'a [Instance3D] },
    ExistsInView { label: &'a str, view_id: &'a str, instances: &'a [Instance3D] },
}

/// Dispatch a request to the matching geometry; direction requests come back
/// as the sector/axis label index encoded in a number-free form is not
/// useful, so they return the label text via [`AnswerValue::Number`]-free
/// variants where applicable.
pub fn compute_answer(req: &AnswerRequest<'_>) -> Result<AnswerValue, QaError> {
    match req {
        AnswerRequest::CameraTranslationDistance { a, b } => {
            Ok(AnswerValue::Number(camera_translation_distance(a, b)))
        }
        AnswerRequest::CameraTranslationDirection { a, b } => {
            let d = dominant_translation_direction(translation_in_frame(a, b))?;
            // Directions feed MCQ construction; the letter is assigned there.
            // Encode as yes/no is wrong and number is wrong, so surface the
            // label through the error-free path used by the generator.
            let _ = d;
            Err(QaError::domain(
                "direction answers are built by the generator with options",
            ))
        }
        AnswerRequest::CameraObjectDistance { view, instance } => {
            Ok(AnswerValue::Number(camera_object_distance(view, instance)))
        }
        AnswerRequest::InterObjectDistance { a, b } => {
            Ok(AnswerValue::Number(inter_object_distance(a, b)))
        }
        AnswerRequest::BboxSize { instance } => {
            Ok(AnswerValue::Triple(bbox_size_answer(instance)))
        }
        AnswerRequest::CountVisible { label, view_id, instances } => {
            Ok(AnswerValue::Number(count_visible(label, view_id, instances) as f64))
        }
        AnswerRequest::ExistsInView { label, view_id, instances } => {
            Ok(AnswerValue::YesNo(exists_in_view(label, view_id, instances)))
        }
    }
}
