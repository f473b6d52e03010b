use traitfuse::evaluation::{summarize_runs, RunResult};

use super::Pipeline;
use crate::error::CliError;
use crate::output::Sink;
use crate::RunConfig;

pub fn run(cfg: &RunConfig, config_name: Option<String>) -> Result<(), CliError> {
    let pipeline = Pipeline::new(cfg)?;
    let missing = pipeline.manifest.missing_ground_truth();
    if !missing.is_empty() {
        return Err(CliError::data(format!(
            "{} image(s) lack ground truth: {}",
            missing.len(),
            missing.join(", ")
        )));
    }
    let config_name = config_name.unwrap_or_else(|| pipeline.manifest.name.clone());
    let mut runs: Vec<RunResult> = pipeline
        .modes()
        .iter()
        .map(|&mode| RunResult {
            config_name: config_name.clone(),
            mode,
            decisions: Vec::with_capacity(pipeline.manifest.entries.len()),
        })
        .collect();
    pipeline.run(|outcome| {
        for (run, (_, decision, _)) in runs.iter_mut().zip(outcome.results) {
            run.decisions.push(decision);
        }
        Ok(())
    })?;
    let refs: Vec<&RunResult> = runs.iter().collect();
    let report = summarize_runs(&refs, &pipeline.manifest).map_err(|e| CliError::Internal(e.to_string()))?;
    super::compare::write_report(&report, cfg.output_path.as_deref())
}

pub(crate) fn write_pair(dir: &std::path::Path, csv: &str, json: &str) -> Result<(), CliError> {
    let mut csv_sink = Sink::create(Some(&dir.join("report.csv")))?;
    let mut json_sink = Sink::create(Some(&dir.join("report.json")))?;
    csv_sink.writer().write_all(csv.as_bytes())?;
    json_sink.writer().write_all(json.as_bytes())?;
    csv_sink.commit()?;
    json_sink.commit()
}
