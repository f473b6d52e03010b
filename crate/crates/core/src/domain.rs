//! Shared value types and the numeric conventions every other module relies on.
//!
//! All values are immutable once constructed and every constructor validates,
//! so a `BinaryScores` or `PersonVad` in hand is always in range.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Accepted deviation of an incoming score pair's sum from 1.
pub const INPUT_SUM_TOLERANCE: f64 = 1e-6;
/// Deviation of a constructed pair's sum from 1 that the engine maintains.
pub const INTERNAL_SUM_TOLERANCE: f64 = 1e-9;
/// Slack allowed on each individual probability before it counts as out of range.
pub const PROBABILITY_SLACK: f64 = 1e-9;

/// Lower end of the valence/arousal/dominance scale.
pub const VAD_MIN: f64 = 1.0;
/// Upper end of the valence/arousal/dominance scale.
pub const VAD_MAX: f64 = 10.0;

/// The only class label the emotional-traits stage looks at.
pub const PERSON_LABEL: &str = "person";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValueError {
    #[error("score is not finite: {0}")]
    NonFiniteScore(f64),
    #[error("not a probability pair: ({violation}, {no_violation})")]
    NotAProbabilityPair { violation: f64, no_violation: f64 },
    #[error("{field} out of range: {value}")]
    OutOfRange { field: &'static str, value: f64 },
    #[error("invalid bounding box [{0}, {1}, {2}, {3}]")]
    InvalidBox(f64, f64, f64, f64),
    #[error("detection label is empty")]
    EmptyLabel,
    #[error("invalid fusion parameters: {0}")]
    InvalidParams(String),
    #[error("person count must be at least 1")]
    NoPersons,
}

/// Axis-aligned box in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct BoundingBox {
    x_min: f64,
    y_min: f64,
    x_max: f64,
    y_max: f64,
}

impl BoundingBox {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, ValueError> {
        let coords = [x_min, y_min, x_max, y_max];
        let ok = coords.iter().all(|c| c.is_finite() && *c >= 0.0) && x_min < x_max && y_min < y_max;
        if !ok {
            return Err(ValueError::InvalidBox(x_min, y_min, x_max, y_max));
        }
        Ok(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn y_min(&self) -> f64 {
        self.y_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn y_max(&self) -> f64 {
        self.y_max
    }

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

impl TryFrom<[f64; 4]> for BoundingBox {
    type Error = ValueError;

    fn try_from(c: [f64; 4]) -> Result<Self, Self::Error> {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<BoundingBox> for [f64; 4] {
    fn from(b: BoundingBox) -> Self {
        [b.x_min, b.y_min, b.x_max, b.y_max]
    }
}

/// One labelled box from the detection backend.
///
/// Non-person detections (the interacting objects) are carried through but
/// nothing downstream consumes them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDetection", into = "RawDetection")]
pub struct Detection {
    bbox: BoundingBox,
    label: String,
    confidence: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDetection {
    #[serde(rename = "box")]
    bbox: BoundingBox,
    label: String,
    confidence: f64,
}

impl Detection {
    pub fn new(bbox: BoundingBox, label: impl Into<String>, confidence: f64) -> Result<Self, ValueError> {
        let label = label.into();
        if label.is_empty() {
            return Err(ValueError::EmptyLabel);
        }
        if !(0.0..=1.0).contains(&confidence) {
            return Err(ValueError::OutOfRange {
                field: "confidence",
                value: confidence,
            });
        }
        Ok(Self {
            bbox,
            label,
            confidence,
        })
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn is_person(&self) -> bool {
        self.label == PERSON_LABEL
    }
}

impl TryFrom<RawDetection> for Detection {
    type Error = ValueError;

    fn try_from(raw: RawDetection) -> Result<Self, Self::Error> {
        Self::new(raw.bbox, raw.label, raw.confidence)
    }
}

impl From<Detection> for RawDetection {
    fn from(d: Detection) -> Self {
        Self {
            bbox: d.bbox,
            label: d.label,
            confidence: d.confidence,
        }
    }
}

fn check_vad(field: &'static str, value: f64) -> Result<f64, ValueError> {
    if value.is_finite() && (VAD_MIN..=VAD_MAX).contains(&value) {
        Ok(value)
    } else {
        Err(ValueError::OutOfRange { field, value })
    }
}

/// Valence, arousal and dominance of one person on the continuous 1-10 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVad", into = "RawVad")]
pub struct PersonVad {
    valence: f64,
    arousal: f64,
    dominance: f64,
}

#[derive(Serialize, Deserialize)]
struct RawVad {
    valence: f64,
    arousal: f64,
    dominance: f64,
}

impl PersonVad {
    pub fn new(valence: f64, arousal: f64, dominance: f64) -> Result<Self, ValueError> {
        Ok(Self {
            valence: check_vad("valence", valence)?,
            arousal: check_vad("arousal", arousal)?,
            dominance: check_vad("dominance", dominance)?,
        })
    }

    pub fn valence(&self) -> f64 {
        self.valence
    }

    pub fn arousal(&self) -> f64 {
        self.arousal
    }

    pub fn dominance(&self) -> f64 {
        self.dominance
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.valence, self.arousal, self.dominance]
    }
}

impl TryFrom<RawVad> for PersonVad {
    type Error = ValueError;

    fn try_from(raw: RawVad) -> Result<Self, Self::Error> {
        Self::new(raw.valence, raw.arousal, raw.dominance)
    }
}

impl From<PersonVad> for RawVad {
    fn from(p: PersonVad) -> Self {
        Self {
            valence: p.valence,
            arousal: p.arousal,
            dominance: p.dominance,
        }
    }
}

/// Image-level emotional summary: mean valence and mean dominance over the
/// persons that passed the detection filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GlobalEmotionalTraits {
    valence: f64,
    dominance: f64,
    person_count: usize,
}

impl GlobalEmotionalTraits {
    pub fn new(valence: f64, dominance: f64, person_count: usize) -> Result<Self, ValueError> {
        if person_count == 0 {
            return Err(ValueError::NoPersons);
        }
        Ok(Self {
            valence: check_vad("valence", valence)?,
            dominance: check_vad("dominance", dominance)?,
            person_count,
        })
    }

    /// Mean valence, the first trait dimension.
    pub fn valence(&self) -> f64 {
        self.valence
    }

    /// Mean dominance, the second trait dimension.
    pub fn dominance(&self) -> f64 {
        self.dominance
    }

    pub fn person_count(&self) -> usize {
        self.person_count
    }
}

/// Probability pair (violation, no violation) summing to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScores", into = "RawScores")]
pub struct BinaryScores {
    violation: f64,
    no_violation: f64,
}

#[derive(Serialize, Deserialize)]
struct RawScores {
    violation: f64,
    no_violation: f64,
}

impl TryFrom<RawScores> for BinaryScores {
    type Error = ValueError;

    fn try_from(raw: RawScores) -> Result<Self, Self::Error> {
        validate_scores(raw.violation, raw.no_violation)
    }
}

impl From<BinaryScores> for RawScores {
    fn from(s: BinaryScores) -> Self {
        Self {
            violation: s.violation,
            no_violation: s.no_violation,
        }
    }
}

impl BinaryScores {
    /// Builds the pair `(p, 1 - p)`.
    pub fn from_violation(p: f64) -> Result<Self, ValueError> {
        if !p.is_finite() {
            return Err(ValueError::NonFiniteScore(p));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(ValueError::OutOfRange {
                field: "violation",
                value: p,
            });
        }
        Ok(Self {
            violation: p,
            no_violation: 1.0 - p,
        })
    }

    /// Caller guarantees both legs are in [0, 1] and sum to 1.
    pub(crate) fn from_parts_unchecked(violation: f64, no_violation: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&violation) && (0.0..=1.0).contains(&no_violation));
        debug_assert!((violation + no_violation - 1.0).abs() <= INTERNAL_SUM_TOLERANCE);
        Self {
            violation,
            no_violation,
        }
    }

    pub fn violation(&self) -> f64 {
        self.violation
    }

    pub fn no_violation(&self) -> f64 {
        self.no_violation
    }

    pub fn max(&self) -> f64 {
        self.violation.max(self.no_violation)
    }

    /// Ties go to `NoViolation`.
    pub fn label(&self) -> Label {
        if self.violation > self.no_violation {
            Label::Violation
        } else {
            Label::NoViolation
        }
    }
}

/// Checks a raw (violation, no violation) pair and repairs rounding-scale
/// deviations of its sum by dividing through.
pub fn validate_scores(violation: f64, no_violation: f64) -> Result<BinaryScores, ValueError> {
    for v in [violation, no_violation] {
        if !v.is_finite() {
            return Err(ValueError::NonFiniteScore(v));
        }
    }
    let in_range = |v: f64| (-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&v);
    let sum = violation + no_violation;
    if !in_range(violation) || !in_range(no_violation) || (sum - 1.0).abs() > INPUT_SUM_TOLERANCE {
        return Err(ValueError::NotAProbabilityPair {
            violation,
            no_violation,
        });
    }
    if sum == 1.0 && (0.0..=1.0).contains(&violation) && (0.0..=1.0).contains(&no_violation) {
        return Ok(BinaryScores {
            violation,
            no_violation,
        });
    }
    let v = (violation / sum).clamp(0.0, 1.0);
    let nv = (no_violation / sum).clamp(0.0, 1.0);
    Ok(BinaryScores {
        violation: v,
        no_violation: nv,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Violation,
    NoViolation,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Violation => "violation",
            Label::NoViolation => "no_violation",
        })
    }
}

/// Tunables of the fusion stage and of the coverage metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionParams {
    /// Probability shift per unit of trait distance from the neutral zone.
    pub adjust_factor: f64,
    pub neutral_low: f64,
    pub neutral_high: f64,
    /// Person detections must score strictly above this to count.
    pub detection_threshold: f64,
    /// A decision is covered when its larger probability reaches this.
    pub coverage_threshold: f64,
}

impl FusionParams {
    pub const DEFAULT_ADJUST_FACTOR: f64 = 0.11;
    pub const DEFAULT_NEUTRAL_LOW: f64 = 4.5;
    pub const DEFAULT_NEUTRAL_HIGH: f64 = 5.5;
    pub const DEFAULT_DETECTION_THRESHOLD: f64 = 0.5;
    pub const DEFAULT_COVERAGE_THRESHOLD: f64 = 0.75;

    pub fn validate(&self) -> Result<(), ValueError> {
        let fields = [
            ("adjust_factor", self.adjust_factor),
            ("neutral_low", self.neutral_low),
            ("neutral_high", self.neutral_high),
            ("detection_threshold", self.detection_threshold),
            ("coverage_threshold", self.coverage_threshold),
        ];
        if let Some((name, v)) = fields.iter().find(|(_, v)| !v.is_finite()) {
            return Err(ValueError::InvalidParams(format!("{name} is not finite ({v})")));
        }
        // zero is allowed and disables the adjustment
        if self.adjust_factor < 0.0 {
            return Err(ValueError::InvalidParams(format!(
                "adjust_factor must be non-negative, got {}",
                self.adjust_factor
            )));
        }
        if !(VAD_MIN <= self.neutral_low && self.neutral_low < self.neutral_high && self.neutral_high <= VAD_MAX) {
            return Err(ValueError::InvalidParams(format!(
                "neutral zone must satisfy 1 <= low < high <= 10, got [{}, {}]",
                self.neutral_low, self.neutral_high
            )));
        }
        for (name, v) in [
            ("detection_threshold", self.detection_threshold),
            ("coverage_threshold", self.coverage_threshold),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(ValueError::InvalidParams(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            adjust_factor: Self::DEFAULT_ADJUST_FACTOR,
            neutral_low: Self::DEFAULT_NEUTRAL_LOW,
            neutral_high: Self::DEFAULT_NEUTRAL_HIGH,
            detection_threshold: Self::DEFAULT_DETECTION_THRESHOLD,
            coverage_threshold: Self::DEFAULT_COVERAGE_THRESHOLD,
        }
    }
}

/// Final per-image outcome.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decision {
    pub label: Label,
    pub scores: BinaryScores,
    pub get: Option<GlobalEmotionalTraits>,
    pub covered: bool,
}

impl Decision {
    pub fn new(scores: BinaryScores, get: Option<GlobalEmotionalTraits>, params: &FusionParams) -> Self {
        Self {
            label: scores.label(),
            scores,
            get,
            covered: scores.max() >= params.coverage_threshold,
        }
    }
}
