//! Decision fusion for binary human-rights-abuse classification.
//!
//! A raw binary classifier's `(violation, no_violation)` probabilities are
//! shifted according to the mood of the people in the picture: detections
//! are filtered down to confident persons, their valence and dominance
//! estimates are averaged into the image's emotional traits, and each trait
//! outside a neutral zone moves probability mass between the two classes.
//! Images without people keep the raw scores.
//!
//! The [`evaluation`] module scores runs with accuracy and coverage and
//! builds vanilla vs trait-adjusted comparison reports; [`backends`] loads
//! annotations from sidecar files or generates them deterministically.

pub mod backends;
pub mod domain;
pub mod evaluation;
pub mod fusion;
pub mod traits;

pub use domain::{
    validate_scores, BinaryScores, BoundingBox, Decision, Detection, FusionParams, GlobalEmotionalTraits, Label,
    PersonVad, ValueError,
};
pub use fusion::{adjust_for_dimension, apply_get_adjustment, infer_image, AdjustmentTrace, Mode, TraitDimension};
pub use traits::{compute_get, filter_persons, get_pair_score};
