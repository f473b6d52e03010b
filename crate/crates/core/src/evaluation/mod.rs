//! Accuracy, coverage and VAD regression error, plus ensembling and the
//! vanilla vs trait-adjusted summary report.

use thiserror::Error;

use crate::domain::{Decision, FusionParams, Label, PersonVad};

mod ensemble;
mod report;

pub use ensemble::{ensemble_vad, fit_ensemble_weights, DEFAULT_GRID_STEP};
pub use report::{
    parse_rows, render_percent, rows_to_csv, summarize, summarize_rows, summarize_runs, Delta, EvaluationReport,
    ExpectTarget, Expectation, Metric, MetricRow, ModeDeltas, ModeMeans, RunResult,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptySet,
    #[error("ensemble weights must be non-negative and sum to 1, got {0:?}")]
    WeightsNotNormalized(Vec<f64>),
    #[error("grid step {0} does not divide 1 into a whole number of steps")]
    InvalidGrid(f64),
    #[error("weight fitting needs at least two models, got {0}")]
    TooFewModels(usize),
    #[error("config {0:?} lacks a {1} run")]
    MissingMode(String, &'static str),
    #[error("result sets do not describe the same manifest: {0}")]
    ManifestMismatch(String),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("expectation failed: {0}")]
    ExpectationFailed(String),
}

fn check_lengths(left: usize, right: usize) -> Result<(), EvalError> {
    if left != right {
        return Err(EvalError::LengthMismatch { left, right });
    }
    if left == 0 {
        return Err(EvalError::EmptySet);
    }
    Ok(())
}

/// Fraction of all decisions whose label matches the truth, covered or not.
pub fn accuracy(decisions: &[Decision], truths: &[Label]) -> Result<f64, EvalError> {
    check_lengths(decisions.len(), truths.len())?;
    let correct = decisions.iter().zip(truths).filter(|(d, t)| d.label == **t).count();
    Ok(correct as f64 / decisions.len() as f64)
}

/// Fraction of decisions whose larger probability reaches the coverage threshold.
///
/// Recomputed from the scores, so any threshold can be applied after the fact.
pub fn coverage(decisions: &[Decision], params: &FusionParams) -> Result<f64, EvalError> {
    if decisions.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let covered = decisions
        .iter()
        .filter(|d| d.scores.max() >= params.coverage_threshold)
        .count();
    Ok(covered as f64 / decisions.len() as f64)
}

/// Mean absolute error over samples and over the three VAD dimensions.
pub fn mean_error_rate(predicted: &[PersonVad], truth: &[PersonVad]) -> Result<f64, EvalError> {
    check_lengths(predicted.len(), truth.len())?;
    let total: f64 = predicted
        .iter()
        .zip(truth)
        .map(|(p, t)| {
            let (p, t) = (p.as_array(), t.as_array());
            (0..3).map(|i| (p[i] - t[i]).abs()).sum::<f64>() / 3.0
        })
        .sum();
    Ok(total / predicted.len() as f64)
}
