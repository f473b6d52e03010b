//! Per-image sidecar JSON.
//!
//! ```json
//! {
//!   "image_id": "img-001",
//!   "detections": [{"box": [10, 20, 110, 220], "label": "person", "confidence": 0.93}],
//!   "person_vads": [{"valence": 3.2, "arousal": 6.1, "dominance": 2.8}],
//!   "raw_scores": {"violation": 0.64, "no_violation": 0.36}
//! }
//! ```
//!
//! Values are checked, never clamped.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{deserialize_tracking, ImageAnnotations, LoadError, Strictness};
use crate::domain::{validate_scores, BoundingBox, Detection, PersonVad};

#[derive(Serialize, Deserialize)]
struct SidecarDoc {
    image_id: String,
    detections: Vec<DetectionDoc>,
    person_vads: Vec<VadDoc>,
    raw_scores: ScoresDoc,
}

#[derive(Serialize, Deserialize)]
struct DetectionDoc {
    #[serde(rename = "box")]
    bbox: [f64; 4],
    label: String,
    confidence: f64,
}

#[derive(Serialize, Deserialize)]
struct VadDoc {
    valence: f64,
    arousal: f64,
    dominance: f64,
}

#[derive(Serialize, Deserialize)]
struct ScoresDoc {
    violation: f64,
    no_violation: f64,
}

impl SidecarDoc {
    fn into_annotations(self) -> Result<ImageAnnotations, LoadError> {
        if self.image_id.is_empty() {
            return Err(LoadError::BadEntry {
                image_id: String::new(),
                message: "image_id is empty".into(),
            });
        }
        let detections = self
            .detections
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                let field = format!("detections[{i}]");
                let [x0, y0, x1, y1] = d.bbox;
                let bbox =
                    BoundingBox::new(x0, y0, x1, y1).map_err(|e| LoadError::from_value(format!("{field}.box"), e))?;
                Detection::new(bbox, d.label, d.confidence).map_err(|e| LoadError::from_value(field, e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let person_vads = self
            .person_vads
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                PersonVad::new(p.valence, p.arousal, p.dominance)
                    .map_err(|e| LoadError::from_value(format!("person_vads[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let raw_scores = validate_scores(self.raw_scores.violation, self.raw_scores.no_violation)
            .map_err(|e| LoadError::from_value("raw_scores".into(), e))?;
        Ok(ImageAnnotations {
            image_id: self.image_id,
            detections,
            person_vads,
            raw_scores,
            ground_truth: None,
        })
    }

    fn from_annotations(a: &ImageAnnotations) -> Self {
        Self {
            image_id: a.image_id.clone(),
            detections: a
                .detections
                .iter()
                .map(|d| DetectionDoc {
                    bbox: (*d.bbox()).into(),
                    label: d.label().to_string(),
                    confidence: d.confidence(),
                })
                .collect(),
            person_vads: a
                .person_vads
                .iter()
                .map(|p| VadDoc {
                    valence: p.valence(),
                    arousal: p.arousal(),
                    dominance: p.dominance(),
                })
                .collect(),
            raw_scores: ScoresDoc {
                violation: a.raw_scores.violation(),
                no_violation: a.raw_scores.no_violation(),
            },
        }
    }
}

/// Parses sidecar text. `source_name` only labels diagnostics.
///
/// Ground truth is not part of the sidecar; the result always has `None`.
pub fn parse_sidecar(source_name: &str, text: &str, strictness: Strictness) -> Result<ImageAnnotations, LoadError> {
    let doc: SidecarDoc = deserialize_tracking(source_name, text, strictness)?;
    doc.into_annotations()
}

pub fn load_annotations(path: &Path, strictness: Strictness) -> Result<ImageAnnotations, LoadError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|error| LoadError::Io {
        source_name: name.clone(),
        error,
    })?;
    parse_sidecar(&name, &text, strictness)
}

pub fn to_sidecar_json(annotations: &ImageAnnotations) -> String {
    let mut s = serde_json::to_string_pretty(&SidecarDoc::from_annotations(annotations))
        .expect("sidecar documents always serialize");
    s.push('\n');
    s
}

pub fn save_annotations(path: &Path, annotations: &ImageAnnotations) -> std::io::Result<()> {
    std::fs::write(path, to_sidecar_json(annotations))
}
