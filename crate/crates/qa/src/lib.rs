//! Spatial question-answer tooling: multi-view covisibility, view-pair
//! sampling, ground-truth answers from poses and 3D boxes, and the geometric
//! boundary/ambiguity filters that keep generated questions well-posed.

pub mod answer;
pub mod covis;
pub mod direction;
pub mod filters;
pub mod generate;
pub mod rotation;
pub mod types;

pub use covis::covisibility;
pub use direction::{
    dominant_translation_direction, forbidden_neighbor, sector_classify, SECTOR_LABELS,
};
pub use filters::{size_compare, threshold_for_translation, triplet_filter};
pub use rotation::relative_rotation;
pub use types::{
    AnnotatedView, AnswerFormat, AnswerValue, Instance3D, QaItem, QuestionType,
    SceneAnnotations, ViewPair,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum QaError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Core(#[from] murk_core::CoreError),
}

impl QaError {
    pub fn domain(msg: impl Into<String>) -> Self {
        QaError::Domain(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        QaError::Format(msg.into())
    }
}
