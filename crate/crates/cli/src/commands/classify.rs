use serde::Serialize;
use traitfuse::{AdjustmentTrace, BinaryScores, GlobalEmotionalTraits, Label, Mode};

use super::Pipeline;
use crate::error::CliError;
use crate::output::Sink;
use crate::RunConfig;

#[derive(Serialize)]
struct DecisionRecord<'a> {
    image_id: &'a str,
    mode: Mode,
    scores: BinaryScores,
    label: Label,
    covered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    get: Option<GlobalEmotionalTraits>,
    traces: &'a [AdjustmentTrace],
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let pipeline = Pipeline::new(cfg)?;
    let mut sink = Sink::create(cfg.output_path.as_deref())?;
    pipeline.run(|outcome| {
        for (mode, decision, traces) in &outcome.results {
            let record = DecisionRecord {
                image_id: &outcome.image_id,
                mode: *mode,
                scores: decision.scores,
                label: decision.label,
                covered: decision.covered,
                get: decision.get,
                traces,
            };
            let line = serde_json::to_string(&record).map_err(|e| CliError::Internal(e.to_string()))?;
            writeln!(sink.writer(), "{line}")?;
        }
        Ok(())
    })?;
    sink.commit()
}
