//! Emotional-trait driven adjustment of the binary classifier's scores.
//!
//! Each trait dimension outside the neutral zone shifts probability mass
//! between the two legs by `distance * adjust_factor`: a pleasant or
//! in-control scene moves mass toward "no violation", an unpleasant or
//! submissive one toward "violation". Valence is applied first, then
//! dominance on the running scores.
//!
//! A shift is capped at whatever the shrinking leg still holds, so the pair
//! never leaves [0, 1]. When that happens the trace records `capped`.

use serde::Serialize;
use thiserror::Error;

use crate::domain::{BinaryScores, Decision, Detection, FusionParams, GlobalEmotionalTraits, PersonVad, ValueError};
use crate::traits::{compute_get, count_persons};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FusionError {
    #[error("expected {expected} person VAD entries (one per filtered person), got {actual}")]
    MisalignedAnnotations { expected: usize, actual: usize },
    #[error(transparent)]
    Value(#[from] ValueError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TraitDimension {
    Valence,
    Dominance,
}

/// Audit record of one dimension's adjustment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdjustmentTrace {
    pub dimension: TraitDimension,
    /// Distance of the trait value from the nearest neutral bound; 0 inside the zone.
    pub delta_from_neutral: f64,
    /// Probability mass actually moved.
    pub applied_adjustment: f64,
    pub capped: bool,
}

/// Which pipeline produced a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Raw classifier scores, no trait adjustment.
    Vanilla,
    /// Classifier scores adjusted by the emotional traits.
    GetAid,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Vanilla => "vanilla",
            Mode::GetAid => "get_aid",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vanilla" => Ok(Mode::Vanilla),
            "get_aid" => Ok(Mode::GetAid),
            other => Err(format!("unknown mode {other:?} (expected vanilla or get_aid)")),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Applies one dimension's shift to `scores`.
///
/// Inside `[neutral_low, neutral_high]` (both bounds inclusive) this is the
/// identity. Above the zone mass moves from violation to no violation, below
/// it the other way.
pub fn adjust_for_dimension(
    scores: BinaryScores,
    value: f64,
    dimension: TraitDimension,
    params: &FusionParams,
) -> (BinaryScores, AdjustmentTrace) {
    debug_assert!(value.is_finite());
    let identity = AdjustmentTrace {
        dimension,
        delta_from_neutral: 0.0,
        applied_adjustment: 0.0,
        capped: false,
    };
    let (v, nv) = (scores.violation(), scores.no_violation());

    if value > params.neutral_high {
        let delta = value - params.neutral_high;
        let wanted = delta * params.adjust_factor;
        let (adj, capped) = if wanted > v { (v, true) } else { (wanted, false) };
        let out = if capped {
            BinaryScores::from_parts_unchecked(0.0, 1.0)
        } else {
            BinaryScores::from_parts_unchecked(v - adj, (nv + adj).min(1.0))
        };
        let trace = AdjustmentTrace {
            delta_from_neutral: delta,
            applied_adjustment: adj,
            capped,
            ..identity
        };
        (out, trace)
    } else if value < params.neutral_low {
        let delta = params.neutral_low - value;
        let wanted = delta * params.adjust_factor;
        let (adj, capped) = if wanted > nv { (nv, true) } else { (wanted, false) };
        let out = if capped {
            BinaryScores::from_parts_unchecked(1.0, 0.0)
        } else {
            BinaryScores::from_parts_unchecked((v + adj).min(1.0), nv - adj)
        };
        let trace = AdjustmentTrace {
            delta_from_neutral: delta,
            applied_adjustment: adj,
            capped,
            ..identity
        };
        (out, trace)
    } else {
        (scores, identity)
    }
}

/// Valence pass followed by dominance pass on the running scores.
pub fn apply_get_adjustment(
    scores: BinaryScores,
    get: &GlobalEmotionalTraits,
    params: &FusionParams,
) -> (BinaryScores, Vec<AdjustmentTrace>) {
    let (after_valence, t1) = adjust_for_dimension(scores, get.valence(), TraitDimension::Valence, params);
    let (after_dominance, t2) = adjust_for_dimension(after_valence, get.dominance(), TraitDimension::Dominance, params);
    (after_dominance, vec![t1, t2])
}

/// Full per-image decision.
///
/// `vads` must hold one entry per detection that passes the person filter,
/// in detection order. With no such person the raw scores stand unchanged.
pub fn infer_image(
    raw: BinaryScores,
    detections: &[Detection],
    vads: &[PersonVad],
    params: &FusionParams,
) -> Result<(Decision, Vec<AdjustmentTrace>), FusionError> {
    let persons = count_persons(detections, params);
    if vads.len() != persons {
        return Err(FusionError::MisalignedAnnotations {
            expected: persons,
            actual: vads.len(),
        });
    }
    if persons == 0 {
        return Ok((Decision::new(raw, None, params), Vec::new()));
    }
    let get = compute_get(vads)?;
    let (scores, traces) = apply_get_adjustment(raw, &get, params);
    Ok((Decision::new(scores, Some(get), params), traces))
}

/// Decision from the raw classifier alone.
pub fn vanilla_decision(raw: BinaryScores, params: &FusionParams) -> Decision {
    Decision::new(raw, None, params)
}
