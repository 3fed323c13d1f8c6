//! Scene annotation and QA record types.

use murk_core::{CameraView, DepthMap, Vec3};
use serde::{Deserialize, Serialize};

/// Object-level 3D instance: axis-aligned box plus the views it is visible in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance3D {
    pub id: String,
    pub label: String,
    /// Box center in world meters.
    pub center: [f64; 3],
    /// Full box extents `(w, l, h)` in meters; `h` runs along world up.
    pub extents: [f64; 3],
    pub visible_views: Vec<String>,
}

impl Instance3D {
    pub fn center_vec(&self) -> Vec3 {
        Vec3::from_array(self.center)
    }

    pub fn validate(&self) -> Result<(), crate::QaError> {
        if self.extents.iter().any(|e| *e <= 0.0) {
            return Err(crate::QaError::domain(format!(
                "instance {} extents must be positive",
                self.id
            )));
        }
        Ok(())
    }

    pub fn visible_in(&self, view_id: &str) -> bool {
        self.visible_views.iter().any(|v| v == view_id)
    }
}

/// One calibrated view with optional depth (required for covisibility).
#[derive(Debug, Clone)]
pub struct AnnotatedView {
    pub id: String,
    pub camera: CameraView,
    pub depth: Option<DepthMap>,
}

/// Everything the QA generator consumes.
#[derive(Debug, Clone)]
pub struct SceneAnnotations {
    pub views: Vec<AnnotatedView>,
    pub instances: Vec<Instance3D>,
    /// World-up unit vector; defaults to +y.
    pub up: Vec3,
}

impl SceneAnnotations {
    pub fn view(&self, id: &str) -> Option<&AnnotatedView> {
        self.views.iter().find(|v| v.id == id)
    }

    pub fn instance(&self, id: &str) -> Option<&Instance3D> {
        self.instances.iter().find(|i| i.id == id)
    }
}

/// A retained two-view combination with its pairing statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViewPair {
    pub view_a: String,
    pub view_b: String,
    /// Symmetric covisibility (minimum of the two reprojection directions).
    pub covisibility: f64,
    /// Camera-center distance in meters.
    pub baseline: f64,
    pub relative_rotation_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuestionType {
    CameraTranslation,
    CameraRotation,
    CameraObjectDistanceEstimation,
    CameraObjectRelativeDirection,
    CrossViewCardinalDirection,
    InterObjectDistance,
    ObjectProxyCardinalDirection,
    ObjectSizeComparison,
    ObjectBoundingSizeEstimation,
    ObjectExistenceEstimation,
    ObjectCounting,
}

impl QuestionType {
    pub const ALL: [QuestionType; 11] = [
        QuestionType::CameraTranslation,
        QuestionType::CameraRotation,
        QuestionType::CameraObjectDistanceEstimation,
        QuestionType::CameraObjectRelativeDirection,
        QuestionType::CrossViewCardinalDirection,
        QuestionType::InterObjectDistance,
        QuestionType::ObjectProxyCardinalDirection,
        QuestionType::ObjectSizeComparison,
        QuestionType::ObjectBoundingSizeEstimation,
        QuestionType::ObjectExistenceEstimation,
        QuestionType::ObjectCounting,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            QuestionType::CameraTranslation => "camera_translation",
            QuestionType::CameraRotation => "camera_rotation",
            QuestionType::CameraObjectDistanceEstimation => "camera_object_distance_estimation",
            QuestionType::CameraObjectRelativeDirection => "camera_object_relative_direction",
            QuestionType::CrossViewCardinalDirection => "cross_view_cardinal_direction",
            QuestionType::InterObjectDistance => "inter_object_distance",
            QuestionType::ObjectProxyCardinalDirection => "object_proxy_cardinal_direction",
            QuestionType::ObjectSizeComparison => "object_size_comparison",
            QuestionType::ObjectBoundingSizeEstimation => "object_bounding_size_estimation",
            QuestionType::ObjectExistenceEstimation => "object_existence_estimation",
            QuestionType::ObjectCounting => "object_counting",
        }
    }
}

/// Answer payload; numbers are meters (or a count), triples ascend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "format", content = "value", rename_all = "snake_case")]
pub enum AnswerValue {
    /// Correct option letter, `A`..
    OptionLetter(char),
    YesNo(bool),
    Number(f64),
    /// Ascending `[shortest, middle, longest]`.
    Triple([f64; 3]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerFormat {
    Mcq,
    Binary,
    Number,
    Triple,
}

impl AnswerValue {
    pub fn format(&self) -> AnswerFormat {
        match self {
            AnswerValue::OptionLetter(_) => AnswerFormat::Mcq,
            AnswerValue::YesNo(_) => AnswerFormat::Binary,
            AnswerValue::Number(_) => AnswerFormat::Number,
            AnswerValue::Triple(_) => AnswerFormat::Triple,
        }
    }
}

/// One generated question with its ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QaItem {
    pub id: String,
    pub question_type: QuestionType,
    pub template_id: String,
    pub view_ids: Vec<String>,
    pub instance_ids: Vec<String>,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<String>>,
    pub answer: AnswerValue,
    pub format: AnswerFormat,
}

impl QaItem {
    pub fn validate(&self) -> Result<(), crate::QaError> {
        match (&self.answer, &self.options) {
            (AnswerValue::OptionLetter(letter), Some(options)) => {
                let idx = (*letter as u8).wrapping_sub(b'A') as usize;
                if idx >= options.len() {
                    return Err(crate::QaError::domain(format!(
                        "item {}: answer letter {letter} outside options",
                        self.id
                    )));
                }
            }
            (AnswerValue::OptionLetter(_), None) => {
                return Err(crate::QaError::domain(format!(
                    "item {}: MCQ answer without options",
                    self.id
                )));
            }
            (AnswerValue::Number(n), _) if !n.is_finite() => {
                return Err(crate::QaError::domain(format!(
                    "item {}: non-finite numeric answer",
                    self.id
                )));
            }
            (AnswerValue::Triple(t), _) => {
                if !(t[0] <= t[1] && t[1] <= t[2]) {
                    return Err(crate::QaError::domain(format!(
                        "item {}: triple answer not ascending",
                        self.id
                    )));
                }
            }
            _ => {}
        }
        if self.format != self.answer.format() {
            return Err(crate::QaError::domain(format!(
                "item {}: format tag mismatch",
                self.id
            )));
        }
        Ok(())
    }
}
