//! Weighted-average ensembling of VAD regressors, with weights fitted by
//! exhaustive search over a discretized simplex.

use super::{mean_error_rate, EvalError};
use crate::domain::{PersonVad, VAD_MAX, VAD_MIN};

pub const DEFAULT_GRID_STEP: f64 = 0.05;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;
// errors closer than this count as ties, so rounding noise cannot beat the
// lexicographic tie-break
const TIE_TOLERANCE: f64 = 1e-12;

/// Element-wise, dimension-wise weighted average of `k` models' predictions.
pub fn ensemble_vad(predictions: &[Vec<PersonVad>], weights: &[f64]) -> Result<Vec<PersonVad>, EvalError> {
    if predictions.is_empty() {
        return Err(EvalError::EmptySet);
    }
    if predictions.len() != weights.len() {
        return Err(EvalError::LengthMismatch {
            left: predictions.len(),
            right: weights.len(),
        });
    }
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(EvalError::WeightsNotNormalized(weights.to_vec()));
    }
    let n = predictions[0].len();
    if let Some(bad) = predictions.iter().find(|p| p.len() != n) {
        return Err(EvalError::LengthMismatch {
            left: n,
            right: bad.len(),
        });
    }
    Ok(combine(predictions, weights, n))
}

fn combine(predictions: &[Vec<PersonVad>], weights: &[f64], n: usize) -> Vec<PersonVad> {
    (0..n)
        .map(|i| {
            let mut acc = [0.0f64; 3];
            for (model, &w) in predictions.iter().zip(weights) {
                if w == 0.0 {
                    continue;
                }
                for (a, x) in acc.iter_mut().zip(model[i].as_array()) {
                    *a += w * x;
                }
            }
            let [v, a, d] = acc.map(|x| x.clamp(VAD_MIN, VAD_MAX));
            PersonVad::new(v, a, d).expect("clamped into range")
        })
        .collect()
}

/// Compositions of `total` into `parts` non-negative integers, in ascending
/// lexicographic order.
fn compositions(total: usize, parts: usize, prefix: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
    if parts == 1 {
        prefix.push(total);
        visit(prefix);
        prefix.pop();
        return;
    }
    for first in 0..=total {
        prefix.push(first);
        compositions(total - first, parts - 1, prefix, visit);
        prefix.pop();
    }
}

/// Finds the simplex grid point whose ensemble has the lowest mean error rate
/// on the validation set. Ties go to the lexicographically smallest weights.
pub fn fit_ensemble_weights(
    val_predictions: &[Vec<PersonVad>],
    val_truth: &[PersonVad],
    grid_step: f64,
) -> Result<Vec<f64>, EvalError> {
    let k = val_predictions.len();
    if k < 2 {
        return Err(EvalError::TooFewModels(k));
    }
    for p in val_predictions {
        if p.len() != val_truth.len() {
            return Err(EvalError::LengthMismatch {
                left: p.len(),
                right: val_truth.len(),
            });
        }
    }
    if val_truth.is_empty() {
        return Err(EvalError::EmptySet);
    }
    if !(grid_step.is_finite() && grid_step > 0.0 && grid_step <= 1.0) {
        return Err(EvalError::InvalidGrid(grid_step));
    }
    let steps = (1.0 / grid_step).round();
    if (steps * grid_step - 1.0).abs() > 1e-9 {
        return Err(EvalError::InvalidGrid(grid_step));
    }
    let steps = steps as usize;

    let n = val_truth.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    compositions(steps, k, &mut Vec::with_capacity(k), &mut |counts| {
        let weights: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
        let err = mean_error_rate(&combine(val_predictions, &weights, n), val_truth).expect("lengths checked");
        let better = match &best {
            None => true,
            Some((e, _)) => err < e - TIE_TOLERANCE,
        };
        if better {
            best = Some((err, weights));
        }
    });
    Ok(best.expect("grid has at least one point").1)
}
