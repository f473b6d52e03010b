use std::path::Path;

use serde::Serialize;
use traitfuse::backends::{synthesize_corpus, to_sidecar_json, GenerationSpec, Task};
use traitfuse::{FusionParams, Label};

use crate::error::CliError;
use crate::output::write_atomic;

#[derive(Serialize)]
struct ManifestOut<'a> {
    name: &'a str,
    task: Task,
    params: FusionParams,
    entries: Vec<EntryOut>,
}

#[derive(Serialize)]
struct EntryOut {
    image_id: String,
    sidecar: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_truth: Option<Label>,
}

/// Writes `sidecars/<id>.json` for every case, then `manifest.json`.
pub fn run(seed: u64, count: usize, spec: &GenerationSpec, task: Task, name: &str, dir: &Path) -> Result<(), CliError> {
    if count == 0 {
        return Err(CliError::Usage("--count must be positive".into()));
    }
    let corpus = synthesize_corpus(seed, count, spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut entries = Vec::with_capacity(corpus.len());
    for ann in corpus {
        let sidecar = format!("sidecars/{}.json", ann.image_id);
        write_atomic(&dir.join(&sidecar), &to_sidecar_json(&ann))?;
        entries.push(EntryOut {
            image_id: ann.image_id,
            sidecar,
            ground_truth: ann.ground_truth,
        });
    }
    let manifest = ManifestOut {
        name,
        task,
        params: spec.params,
        entries,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    write_atomic(&dir.join("manifest.json"), &(text + "\n"))
}
