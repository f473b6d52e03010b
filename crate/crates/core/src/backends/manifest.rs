//! Dataset manifest: the list of images, where their sidecars live, their
//! ground truth and the fusion parameters to evaluate them with.
//!
//! ```json
//! {
//!   "name": "hra-child-labour-test",
//!   "task": "child_labour",
//!   "params": {"adjust_factor": 0.11},
//!   "entries": [
//!     {"image_id": "img-001", "sidecar": "sidecars/img-001.json", "ground_truth": "violation"},
//!     {"image_id": "img-002", "skipped": "corrupt JPEG"}
//!   ]
//! }
//! ```
//!
//! Omitted `params` fields take their defaults. Sidecar paths are resolved
//! against the manifest's directory. Entries carrying `skipped` were not
//! annotated by the exporter and are left out of every run.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{deserialize_tracking, load_annotations, ImageAnnotations, LoadError, Strictness};
use crate::domain::{FusionParams, Label};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    ChildLabour,
    DisplacedPopulations,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub image_id: String,
    /// Resolved sidecar path.
    pub sidecar: PathBuf,
    pub ground_truth: Option<Label>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub name: String,
    pub task: Task,
    pub params: FusionParams,
    pub entries: Vec<ManifestEntry>,
    /// `(image_id, reason)` for entries the exporter could not annotate.
    pub skipped: Vec<(String, String)>,
}

#[derive(Deserialize)]
struct ManifestDoc {
    name: String,
    task: Task,
    #[serde(default)]
    params: FusionParams,
    entries: Vec<EntryDoc>,
}

#[derive(Deserialize)]
struct EntryDoc {
    image_id: String,
    #[serde(default)]
    sidecar: Option<String>,
    #[serde(default)]
    ground_truth: Option<Label>,
    #[serde(default)]
    skipped: Option<String>,
}

/// Parses and validates manifest text without touching the filesystem.
pub fn parse_manifest(
    source_name: &str,
    text: &str,
    base_dir: &Path,
    strictness: Strictness,
) -> Result<DatasetManifest, LoadError> {
    let doc: ManifestDoc = deserialize_tracking(source_name, text, strictness)?;
    doc.params.validate().map_err(|error| LoadError::Invalid {
        field: "params".into(),
        error,
    })?;

    let mut seen = HashSet::new();
    let mut entries = Vec::with_capacity(doc.entries.len());
    let mut skipped = Vec::new();
    for e in doc.entries {
        if e.image_id.is_empty() {
            return Err(LoadError::BadEntry {
                image_id: e.image_id,
                message: "image_id is empty".into(),
            });
        }
        if !seen.insert(e.image_id.clone()) {
            return Err(LoadError::DuplicateImageId(e.image_id));
        }
        match (e.skipped, e.sidecar) {
            (Some(reason), _) => skipped.push((e.image_id, reason)),
            (None, Some(sidecar)) => entries.push(ManifestEntry {
                image_id: e.image_id,
                sidecar: base_dir.join(sidecar),
                ground_truth: e.ground_truth,
            }),
            (None, None) => {
                return Err(LoadError::BadEntry {
                    image_id: e.image_id,
                    message: "entry has neither `sidecar` nor `skipped`".into(),
                })
            }
        }
    }
    if entries.is_empty() {
        return Err(LoadError::EmptyManifest);
    }
    Ok(DatasetManifest {
        name: doc.name,
        task: doc.task,
        params: doc.params,
        entries,
        skipped,
    })
}

/// Reads a manifest and checks every referenced sidecar exists.
pub fn load_manifest(path: &Path, strictness: Strictness) -> Result<DatasetManifest, LoadError> {
    let name = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|error| LoadError::Io {
        source_name: name.clone(),
        error,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let manifest = parse_manifest(&name, &text, base, strictness)?;
    if let Some(missing) = manifest.entries.iter().find(|e| !e.sidecar.is_file()) {
        return Err(LoadError::MissingSidecar(missing.sidecar.clone()));
    }
    Ok(manifest)
}

impl DatasetManifest {
    /// Loads one entry's sidecar and attaches the manifest's ground truth.
    pub fn load_entry(&self, index: usize, strictness: Strictness) -> Result<ImageAnnotations, LoadError> {
        let entry = &self.entries[index];
        let mut ann = load_annotations(&entry.sidecar, strictness)?;
        if ann.image_id != entry.image_id {
            return Err(LoadError::ImageIdMismatch {
                path: entry.sidecar.display().to_string(),
                expected: entry.image_id.clone(),
                found: ann.image_id,
            });
        }
        ann.ground_truth = entry.ground_truth;
        Ok(ann)
    }

    pub fn missing_ground_truth(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| e.ground_truth.is_none())
            .map(|e| e.image_id.as_str())
            .collect()
    }
}
