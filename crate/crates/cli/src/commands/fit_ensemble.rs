use std::path::Path;

use serde::{Deserialize, Serialize};
use traitfuse::evaluation::{ensemble_vad, fit_ensemble_weights, mean_error_rate};
use traitfuse::PersonVad;

use crate::error::CliError;
use crate::output::Sink;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ValidationSet {
    models: Vec<Vec<PersonVad>>,
    truth: Vec<PersonVad>,
}

#[derive(Serialize)]
struct Fitted {
    weights: Vec<f64>,
    grid_step: f64,
    mean_error_rate: f64,
}

pub fn run(input: &Path, grid_step: f64, output: Option<&Path>) -> Result<(), CliError> {
    if !(grid_step.is_finite() && grid_step > 0.0 && grid_step <= 1.0) {
        return Err(CliError::Usage(format!("--grid-step {grid_step} must lie in (0, 1]")));
    }
    let text = std::fs::read_to_string(input).map_err(|e| CliError::data(format!("{}: {e}", input.display())))?;
    let set: ValidationSet =
        serde_json::from_str(&text).map_err(|e| CliError::data(format!("{}: {e}", input.display())))?;
    let weights = fit_ensemble_weights(&set.models, &set.truth, grid_step).map_err(CliError::data)?;
    let fitted = ensemble_vad(&set.models, &weights).map_err(|e| CliError::Internal(e.to_string()))?;
    let err = mean_error_rate(&fitted, &set.truth).map_err(|e| CliError::Internal(e.to_string()))?;
    let doc = Fitted {
        weights,
        grid_step,
        mean_error_rate: err,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
    let mut sink = Sink::create(output)?;
    writeln!(sink.writer(), "{json}")?;
    sink.commit()
}
