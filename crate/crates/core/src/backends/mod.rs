//! Sources of per-image annotations: sidecar files listed in a manifest, or
//! the seeded synthetic generator.

use std::path::PathBuf;

use thiserror::Error;

use crate::domain::{BinaryScores, Decision, Detection, FusionParams, Label, PersonVad, ValueError};
use crate::fusion::{infer_image, vanilla_decision, AdjustmentTrace, FusionError, Mode};
use crate::traits::count_persons;

mod manifest;
mod sidecar;
mod synth;

pub use manifest::{load_manifest, parse_manifest, DatasetManifest, ManifestEntry, Task};
pub use sidecar::{load_annotations, parse_sidecar, save_annotations, to_sidecar_json};
pub use synth::{synthesize_case, synthesize_corpus, GenerationSpec, GroundTruthRule, SynthError};

/// How unknown fields in input documents are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Reject the document.
    Strict,
    /// Log a warning and ignore the field.
    #[default]
    Lenient,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{source_name}: cannot read: {error}")]
    Io {
        source_name: String,
        #[source]
        error: std::io::Error,
    },
    #[error("{source_name}:{line}:{column}: at `{field}`: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("{source_name}: unknown field `{field}`")]
    UnknownField { source_name: String, field: String },
    #[error("{field} out of range: {value}")]
    Range { field: String, value: f64 },
    #[error("{field}: {error}")]
    Invalid {
        field: String,
        #[source]
        error: ValueError,
    },
    #[error("duplicate image_id {0:?}")]
    DuplicateImageId(String),
    #[error("missing sidecar {}", .0.display())]
    MissingSidecar(PathBuf),
    #[error("manifest has no entries")]
    EmptyManifest,
    #[error("entry {image_id:?}: {message}")]
    BadEntry { image_id: String, message: String },
    #[error("sidecar {path} declares image_id {found:?} but the manifest lists {expected:?}")]
    ImageIdMismatch {
        path: String,
        expected: String,
        found: String,
    },
}

impl LoadError {
    pub(crate) fn from_value(field: String, error: ValueError) -> Self {
        match error {
            ValueError::OutOfRange { field: leaf, value } => LoadError::Range {
                field: format!("{field}.{leaf}"),
                value,
            },
            error => LoadError::Invalid { field, error },
        }
    }
}

/// Everything the engine needs to decide one image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageAnnotations {
    pub image_id: String,
    pub detections: Vec<Detection>,
    /// One entry per detection passing the person filter, in detection order.
    pub person_vads: Vec<PersonVad>,
    pub raw_scores: BinaryScores,
    pub ground_truth: Option<Label>,
}

impl ImageAnnotations {
    /// Verifies `person_vads` lines up with the persons `params` lets through.
    pub fn check_alignment(&self, params: &FusionParams) -> Result<(), FusionError> {
        let expected = count_persons(&self.detections, params);
        if expected != self.person_vads.len() {
            return Err(FusionError::MisalignedAnnotations {
                expected,
                actual: self.person_vads.len(),
            });
        }
        Ok(())
    }

    pub fn decide(&self, mode: Mode, params: &FusionParams) -> Result<(Decision, Vec<AdjustmentTrace>), FusionError> {
        match mode {
            Mode::Vanilla => Ok((vanilla_decision(self.raw_scores, params), Vec::new())),
            Mode::GetAid => infer_image(self.raw_scores, &self.detections, &self.person_vads, params),
        }
    }
}

pub(crate) fn parse_error(source_name: &str, err: serde_path_to_error::Error<serde_json::Error>) -> LoadError {
    let field = err.path().to_string();
    let inner = err.into_inner();
    LoadError::Parse {
        source_name: source_name.to_string(),
        line: inner.line(),
        column: inner.column(),
        field,
        message: inner.to_string(),
    }
}

/// Deserializes `text`, collecting the paths of fields the target type ignores.
pub(crate) fn deserialize_tracking<T: serde::de::DeserializeOwned>(
    source_name: &str,
    text: &str,
    strictness: Strictness,
) -> Result<T, LoadError> {
    let mut unknown = Vec::new();
    let mut de = serde_json::Deserializer::from_str(text);
    let mut record = |path: serde_ignored::Path<'_>| unknown.push(path.to_string());
    let tracked = serde_ignored::Deserializer::new(&mut de, &mut record);
    let value: T = serde_path_to_error::deserialize(tracked).map_err(|e| parse_error(source_name, e))?;
    de.end().map_err(|e| LoadError::Parse {
        source_name: source_name.to_string(),
        line: e.line(),
        column: e.column(),
        field: ".".to_string(),
        message: e.to_string(),
    })?;
    if let Some(field) = unknown.first() {
        match strictness {
            Strictness::Strict => {
                return Err(LoadError::UnknownField {
                    source_name: source_name.to_string(),
                    field: field.clone(),
                })
            }
            Strictness::Lenient => {
                for f in &unknown {
                    log::warn!("{source_name}: ignoring unknown field `{f}`");
                }
            }
        }
    }
    Ok(value)
}
