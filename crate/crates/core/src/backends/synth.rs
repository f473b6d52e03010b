//! Deterministic synthetic annotations.
//!
//! A case is a pure function of `(seed, spec)`: the RNG is ChaCha8 seeded
//! from the 64-bit seed, so corpora are reproducible across platforms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ImageAnnotations;
use crate::domain::{BinaryScores, BoundingBox, Detection, FusionParams, Label, PersonVad, VAD_MAX, VAD_MIN};
use crate::fusion::infer_image;
use crate::traits::compute_get;

const DISTRACTOR_LABELS: &[&str] = &["dog", "car", "chair", "bicycle", "handbag", "bottle"];

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid generation spec: {0}")]
pub struct SynthError(pub String);

/// How a synthetic case's ground truth is assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundTruthRule {
    /// No ground truth.
    Unlabelled,
    /// The label of the raw classifier scores; the vanilla decision is always right.
    RawArgmax,
    /// The label of the trait-adjusted decision under `spec.params`.
    Adjusted,
    /// Violation when the mean of the image's valence and dominance lies below
    /// the middle of the neutral zone; raw argmax when nobody is in the picture.
    Mood,
    AlwaysViolation,
    AlwaysNoViolation,
}

/// Knobs of the generator. Ranges are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenerationSpec {
    /// Persons that pass the detection filter.
    pub person_count: (usize, usize),
    /// Persons at or below the detection threshold.
    pub faint_person_count: (usize, usize),
    /// Non-person detections.
    pub distractor_count: (usize, usize),
    /// Bounds for every VAD dimension.
    pub vad_bounds: (f64, f64),
    /// Bounds for the raw violation probability.
    pub violation_score: (f64, f64),
    pub ground_truth: GroundTruthRule,
    pub params: FusionParams,
    pub image_size: (f64, f64),
}

impl Default for GenerationSpec {
    fn default() -> Self {
        Self {
            person_count: (0, 4),
            faint_person_count: (0, 2),
            distractor_count: (0, 3),
            vad_bounds: (VAD_MIN, VAD_MAX),
            violation_score: (0.0, 1.0),
            ground_truth: GroundTruthRule::Mood,
            params: FusionParams::default(),
            image_size: (640.0, 480.0),
        }
    }
}

impl GenerationSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError(m));
        for (name, (lo, hi)) in [
            ("person_count", self.person_count),
            ("faint_person_count", self.faint_person_count),
            ("distractor_count", self.distractor_count),
        ] {
            if lo > hi {
                return bad(format!("{name} range [{lo}, {hi}] is empty"));
            }
        }
        let (vlo, vhi) = self.vad_bounds;
        if !(VAD_MIN <= vlo && vlo <= vhi && vhi <= VAD_MAX) {
            return bad(format!("vad_bounds [{vlo}, {vhi}] must lie within [1, 10]"));
        }
        let (slo, shi) = self.violation_score;
        if !(0.0 <= slo && slo <= shi && shi <= 1.0) {
            return bad(format!("violation_score [{slo}, {shi}] must lie within [0, 1]"));
        }
        let (w, h) = self.image_size;
        if !(w.is_finite() && h.is_finite() && w > 0.0 && h > 0.0) {
            return bad(format!("image_size ({w}, {h}) must be positive"));
        }
        self.params.validate().map_err(|e| SynthError(e.to_string()))?;
        if self.person_count.1 > 0 && self.params.detection_threshold >= 1.0 {
            return bad("no person can pass a detection threshold of 1".into());
        }
        Ok(())
    }
}

fn sample_box(rng: &mut ChaCha8Rng, (w, h): (f64, f64)) -> BoundingBox {
    let x0 = rng.random::<f64>() * w * 0.9;
    let y0 = rng.random::<f64>() * h * 0.9;
    let x1 = x0 + (w - x0) * (0.05 + 0.95 * rng.random::<f64>());
    let y1 = y0 + (h - y0) * (0.05 + 0.95 * rng.random::<f64>());
    BoundingBox::new(x0, y0, x1, y1).expect("sampled box has positive extent")
}

fn sample_in(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        // stays inside [lo, hi] even with rounding
        (lo + (hi - lo) * rng.random::<f64>()).clamp(lo, hi)
    }
}

fn sample_count(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    rng.random_range(lo..=hi)
}

/// Generates one image's annotations.
pub fn synthesize_case(seed: u64, spec: &GenerationSpec) -> Result<ImageAnnotations, SynthError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let threshold = spec.params.detection_threshold;

    let persons = sample_count(&mut rng, spec.person_count);
    let faint = sample_count(&mut rng, spec.faint_person_count);
    let distractors = sample_count(&mut rng, spec.distractor_count);

    let mut detections = Vec::with_capacity(persons + faint + distractors);
    for _ in 0..persons {
        // (threshold, 1]
        let conf = (threshold + (1.0 - threshold) * (1.0 - rng.random::<f64>())).min(1.0);
        let conf = if conf > threshold { conf } else { 1.0 };
        let b = sample_box(&mut rng, spec.image_size);
        detections.push(Detection::new(b, "person", conf).expect("valid person"));
    }
    for _ in 0..faint {
        let conf = threshold * rng.random::<f64>();
        let b = sample_box(&mut rng, spec.image_size);
        detections.push(Detection::new(b, "person", conf).expect("valid faint person"));
    }
    for _ in 0..distractors {
        let label = DISTRACTOR_LABELS[rng.random_range(0..DISTRACTOR_LABELS.len())];
        let conf = rng.random::<f64>();
        let b = sample_box(&mut rng, spec.image_size);
        detections.push(Detection::new(b, label, conf).expect("valid distractor"));
    }
    detections.shuffle(&mut rng);

    let person_vads = (0..persons)
        .map(|_| {
            let v = sample_in(&mut rng, spec.vad_bounds);
            let a = sample_in(&mut rng, spec.vad_bounds);
            let d = sample_in(&mut rng, spec.vad_bounds);
            PersonVad::new(v, a, d).expect("bounds validated")
        })
        .collect::<Vec<_>>();

    let raw_scores = BinaryScores::from_violation(sample_in(&mut rng, spec.violation_score)).expect("bounds validated");

    let ground_truth = match spec.ground_truth {
        GroundTruthRule::Unlabelled => None,
        GroundTruthRule::RawArgmax => Some(raw_scores.label()),
        GroundTruthRule::AlwaysViolation => Some(Label::Violation),
        GroundTruthRule::AlwaysNoViolation => Some(Label::NoViolation),
        GroundTruthRule::Adjusted => {
            let (decision, _) = infer_image(raw_scores, &detections, &person_vads, &spec.params)
                .expect("generated annotations are aligned");
            Some(decision.label)
        }
        GroundTruthRule::Mood => Some(match compute_get(&person_vads) {
            Ok(get) => {
                let mid = (spec.params.neutral_low + spec.params.neutral_high) / 2.0;
                if (get.valence() + get.dominance()) / 2.0 < mid {
                    Label::Violation
                } else {
                    Label::NoViolation
                }
            }
            Err(_) => raw_scores.label(),
        }),
    };

    Ok(ImageAnnotations {
        image_id: format!("synth-{seed:016x}"),
        detections,
        person_vads,
        raw_scores,
        ground_truth,
    })
}

// splitmix64 finalizer; spreads consecutive indices over the seed space
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `count` cases with ids `synth-00000`, `synth-00001`, ... Case `i` uses a
/// seed derived from `(seed, i)`.
pub fn synthesize_corpus(seed: u64, count: usize, spec: &GenerationSpec) -> Result<Vec<ImageAnnotations>, SynthError> {
    (0..count)
        .map(|i| {
            let case_seed = mix(seed ^ mix(i as u64 + 1));
            synthesize_case(case_seed, spec).map(|mut a| {
                a.image_id = format!("synth-{i:05}");
                a
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::traits::count_persons;

    #[test]
    fn same_seed_same_case() {
        let spec = GenerationSpec::default();
        assert_eq!(synthesize_case(42, &spec).unwrap(), synthesize_case(42, &spec).unwrap());
    }

    #[test]
    fn zero_person_range_gives_no_persons() {
        let spec = GenerationSpec {
            person_count: (0, 0),
            ..GenerationSpec::default()
        };
        for seed in 0..50 {
            let a = synthesize_case(seed, &spec).unwrap();
            assert!(a.person_vads.is_empty());
            assert_eq!(count_persons(&a.detections, &spec.params), 0);
        }
    }

    #[test]
    fn neighbouring_seeds_differ() {
        let spec = GenerationSpec::default();
        for seed in 0..100u64 {
            let a = synthesize_case(seed, &spec).unwrap();
            let b = synthesize_case(seed + 1, &spec).unwrap();
            assert_ne!(a.raw_scores, b.raw_scores, "seed {seed}");
        }
    }

    #[test]
    fn generated_cases_are_aligned() {
        let spec = GenerationSpec {
            person_count: (0, 6),
            faint_person_count: (0, 4),
            ..GenerationSpec::default()
        };
        for a in synthesize_corpus(7, 300, &spec).unwrap() {
            a.check_alignment(&spec.params).unwrap();
            assert!(a.ground_truth.is_some());
        }
    }

    #[test]
    fn bad_specs_are_rejected() {
        let cases = [
            GenerationSpec {
                person_count: (3, 1),
                ..GenerationSpec::default()
            },
            GenerationSpec {
                vad_bounds: (0.0, 5.0),
                ..GenerationSpec::default()
            },
            GenerationSpec {
                violation_score: (0.8, 0.2),
                ..GenerationSpec::default()
            },
        ];
        for spec in cases {
            assert!(synthesize_case(1, &spec).is_err());
        }
    }

    #[test]
    fn adjusted_rule_makes_get_aid_always_right() {
        let spec = GenerationSpec {
            ground_truth: GroundTruthRule::Adjusted,
            ..GenerationSpec::default()
        };
        for a in synthesize_corpus(3, 200, &spec).unwrap() {
            let (d, _) = a.decide(crate::fusion::Mode::GetAid, &spec.params).unwrap();
            assert_eq!(Some(d.label), a.ground_truth);
        }
    }
}
