//! Person filtering and aggregation of per-person VAD estimates into the
//! image-level emotional traits.

use crate::domain::{Detection, FusionParams, GlobalEmotionalTraits, PersonVad, ValueError, VAD_MIN};

/// Keeps detections labelled exactly `"person"` whose confidence is strictly
/// above the detection threshold. Order is preserved.
pub fn filter_persons(detections: &[Detection], params: &FusionParams) -> Vec<Detection> {
    detections
        .iter()
        .filter(|d| passes_filter(d, params))
        .cloned()
        .collect()
}

pub fn passes_filter(detection: &Detection, params: &FusionParams) -> bool {
    detection.is_person() && detection.confidence() > params.detection_threshold
}

pub fn count_persons(detections: &[Detection], params: &FusionParams) -> usize {
    detections.iter().filter(|d| passes_filter(d, params)).count()
}

/// Averages valence and dominance over `persons`. Arousal is ignored.
///
/// Fails with [`ValueError::NoPersons`] on an empty slice; callers then use
/// the raw classifier scores directly.
pub fn compute_get(persons: &[PersonVad]) -> Result<GlobalEmotionalTraits, ValueError> {
    if persons.is_empty() {
        return Err(ValueError::NoPersons);
    }
    let n = persons.len();
    let valence = mean(persons.iter().map(PersonVad::valence).collect());
    let dominance = mean(persons.iter().map(PersonVad::dominance).collect());
    GlobalEmotionalTraits::new(valence, dominance, n)
}

// Every VAD value is at least 1, hence a whole multiple of 2^-52, so the sum
// is exact in fixed point. The result depends only on the reduced fraction
// sum / n: input order and k-fold repetition cannot change a bit of it.
fn mean(values: Vec<f64>) -> f64 {
    const SCALE: f64 = (1u64 << 52) as f64;
    debug_assert!(values.iter().all(|&v| v >= VAD_MIN));
    let sum: u128 = values.iter().map(|&v| (v * SCALE) as u128).sum();
    let n = values.len() as u128;
    let g = gcd(sum, n);
    let (num, den) = (sum / g, n / g);
    let m = ((num / den) as f64 + (num % den) as f64 / den as f64) / SCALE;
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    m.clamp(lo, hi)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Product form of the two trait dimensions. Not used by the adjustment.
pub fn get_pair_score(get: &GlobalEmotionalTraits) -> f64 {
    get.valence() * get.dominance()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::BoundingBox;
    use proptest::prelude::*;

    fn det(label: &str, confidence: f64) -> Detection {
        Detection::new(BoundingBox::new(0.0, 0.0, 10.0, 20.0).unwrap(), label, confidence).unwrap()
    }

    fn vad(v: f64, a: f64, d: f64) -> PersonVad {
        PersonVad::new(v, a, d).unwrap()
    }

    #[test]
    fn filter_keeps_confident_persons_only() {
        let input = vec![det("person", 0.6), det("person", 0.4), det("dog", 0.9)];
        let out = filter_persons(&input, &FusionParams::default());
        assert_eq!(out, vec![det("person", 0.6)]);
    }

    #[test]
    fn filter_empty() {
        assert!(filter_persons(&[], &FusionParams::default()).is_empty());
    }

    #[test]
    fn threshold_is_strict() {
        assert!(filter_persons(&[det("person", 0.5)], &FusionParams::default()).is_empty());
    }

    #[test]
    fn label_match_is_case_sensitive() {
        assert!(filter_persons(&[det("Person", 0.9)], &FusionParams::default()).is_empty());
    }

    #[test]
    fn singleton_get_is_identity() {
        let g = compute_get(&[vad(7.0, 5.0, 3.0)]).unwrap();
        assert_eq!((g.valence(), g.dominance(), g.person_count()), (7.0, 3.0, 1));
    }

    #[test]
    fn get_is_arithmetic_mean() {
        let persons = [vad(4.0, 9.0, 2.0), vad(6.0, 1.0, 4.0), vad(8.0, 5.0, 6.0)];
        let g = compute_get(&persons).unwrap();
        assert_eq!((g.valence(), g.dominance(), g.person_count()), (6.0, 4.0, 3));

        let shuffled = [persons[2], persons[0], persons[1]];
        assert_eq!(compute_get(&shuffled).unwrap(), g);
    }

    #[test]
    fn empty_get_is_an_error() {
        assert_eq!(compute_get(&[]), Err(ValueError::NoPersons));
    }

    #[test]
    fn pair_score_is_product() {
        let g = |v, d| GlobalEmotionalTraits::new(v, d, 1).unwrap();
        assert_eq!(get_pair_score(&g(5.0, 5.0)), 25.0);
        assert_eq!(get_pair_score(&g(1.0, 7.25)), 7.25);
        assert_eq!(get_pair_score(&g(6.0, 4.0)), 24.0);
    }

    fn arb_vad() -> impl Strategy<Value = PersonVad> {
        (1.0f64..=10.0, 1.0f64..=10.0, 1.0f64..=10.0).prop_map(|(v, a, d)| vad(v, a, d))
    }

    fn arb_detection() -> impl Strategy<Value = Detection> {
        (
            prop::sample::select(vec!["person", "dog", "car", "Person"]),
            0.0f64..=1.0,
        )
            .prop_map(|(l, c)| det(l, c))
    }

    proptest! {
        #[test]
        fn filter_is_idempotent_subset(dets in prop::collection::vec(arb_detection(), 0..20)) {
            let params = FusionParams::default();
            let once = filter_persons(&dets, &params);
            prop_assert_eq!(filter_persons(&once, &params), once.clone());
            prop_assert!(once.iter().all(|d| dets.contains(d)));
            prop_assert_eq!(once.len(), count_persons(&dets, &params));
        }

        #[test]
        fn get_within_sample_range(persons in prop::collection::vec(arb_vad(), 1..12)) {
            let g = compute_get(&persons).unwrap();
            let (vmin, vmax) = persons.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.valence()), b.max(p.valence())));
            let (dmin, dmax) = persons.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(p.dominance()), b.max(p.dominance())));
            prop_assert!(vmin <= g.valence() && g.valence() <= vmax);
            prop_assert!(dmin <= g.dominance() && g.dominance() <= dmax);
        }

        #[test]
        fn duplication_does_not_change_get(p in arb_vad(), k in 1usize..50) {
            let single = compute_get(&[p]).unwrap();
            let many = compute_get(&vec![p; k]).unwrap();
            prop_assert_eq!(many.valence(), single.valence());
            prop_assert_eq!(many.dominance(), single.dominance());
        }

        #[test]
        fn k_fold_list_duplication_is_bit_exact(persons in prop::collection::vec(arb_vad(), 1..20), k in 2usize..8) {
            let once = compute_get(&persons).unwrap();
            let repeated: Vec<_> = persons.iter().flat_map(|p| std::iter::repeat_n(*p, k)).collect();
            let many = compute_get(&repeated).unwrap();
            prop_assert_eq!(many.valence().to_bits(), once.valence().to_bits());
            prop_assert_eq!(many.dominance().to_bits(), once.dominance().to_bits());
        }

        #[test]
        fn mean_is_close_to_float_mean(persons in prop::collection::vec(arb_vad(), 1..20)) {
            let g = compute_get(&persons).unwrap();
            let naive = persons.iter().map(PersonVad::valence).sum::<f64>() / persons.len() as f64;
            prop_assert!((g.valence() - naive).abs() <= 1e-12);
        }

        #[test]
        fn pair_score_symmetric(v in 1.0f64..=10.0, d in 1.0f64..=10.0) {
            let a = GlobalEmotionalTraits::new(v, d, 1).unwrap();
            let b = GlobalEmotionalTraits::new(d, v, 1).unwrap();
            prop_assert_eq!(get_pair_score(&a), get_pair_score(&b));
        }
    }
}
