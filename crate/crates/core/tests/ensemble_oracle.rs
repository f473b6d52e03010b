//! Weight fitting against a brute-force scan written independently of the
//! library's enumeration and error code.

use proptest::prelude::*;
use traitfuse::evaluation::{ensemble_vad, fit_ensemble_weights, mean_error_rate};
use traitfuse::PersonVad;

fn vad(v: f64, a: f64, d: f64) -> PersonVad {
    PersonVad::new(v, a, d).unwrap()
}

fn brute_force_two(m1: &[PersonVad], m2: &[PersonVad], truth: &[PersonVad]) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=20 {
        let w = i as f64 / 20.0;
        let mut err = 0.0;
        for ((a, b), t) in m1.iter().zip(m2).zip(truth) {
            let p = [
                w * a.valence() + (1.0 - w) * b.valence(),
                w * a.arousal() + (1.0 - w) * b.arousal(),
                w * a.dominance() + (1.0 - w) * b.dominance(),
            ];
            err += (p[0] - t.valence()).abs() + (p[1] - t.arousal()).abs() + (p[2] - t.dominance()).abs();
        }
        let err = err / (3.0 * truth.len() as f64);
        if err < best.0 - 1e-9 {
            best = (err, w);
        }
    }
    best
}

#[test]
fn symmetric_midpoint_recovers_even_weights() {
    let truth: Vec<_> = (0..30)
        .map(|i| vad(3.0 + (i % 5) as f64, 5.0, 2.0 + (i % 7) as f64))
        .collect();
    let shift = |s: f64| -> Vec<_> {
        truth
            .iter()
            .map(|t| vad(t.valence() + s, t.arousal() - s, t.dominance() + s))
            .collect()
    };
    let (lo, hi) = (shift(-0.8), shift(0.8));
    let w = fit_ensemble_weights(&[lo, hi], &truth, 0.05).unwrap();
    assert!((w[0] - 0.5).abs() <= 0.05 && (w[1] - 0.5).abs() <= 0.05, "{w:?}");
}

#[test]
fn one_hot_weights_select_a_model() {
    let models = vec![
        vec![vad(1.5, 2.5, 3.5), vad(9.0, 8.0, 7.0)],
        vec![vad(4.0, 4.0, 4.0), vad(5.0, 6.0, 7.0)],
        vec![vad(10.0, 1.0, 5.5), vad(2.0, 2.0, 2.0)],
    ];
    for k in 0..3 {
        let mut w = vec![0.0; 3];
        w[k] = 1.0;
        assert_eq!(ensemble_vad(&models, &w).unwrap(), models[k]);
    }
}

#[test]
fn three_models_never_worse_than_best_single() {
    let truth: Vec<_> = (0..12)
        .map(|i| vad(2.0 + i as f64 * 0.5, 5.0, 8.0 - i as f64 * 0.4))
        .collect();
    let m1: Vec<_> = truth
        .iter()
        .map(|t| vad(t.valence() + 1.0, t.arousal(), t.dominance()))
        .collect();
    let m2: Vec<_> = truth
        .iter()
        .map(|t| vad(t.valence(), t.arousal() - 1.0, t.dominance()))
        .collect();
    let m3: Vec<_> = truth
        .iter()
        .map(|t| vad(t.valence() - 0.5, t.arousal() + 0.5, t.dominance() - 0.5))
        .collect();
    let models = vec![m1, m2, m3];
    let w = fit_ensemble_weights(&models, &truth, 0.05).unwrap();
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    let fitted = mean_error_rate(&ensemble_vad(&models, &w).unwrap(), &truth).unwrap();
    let best_single = models
        .iter()
        .map(|m| mean_error_rate(m, &truth).unwrap())
        .fold(f64::INFINITY, f64::min);
    assert!(fitted <= best_single, "{fitted} > {best_single}");
}

fn arb_vads(n: usize) -> impl Strategy<Value = Vec<PersonVad>> {
    prop::collection::vec((1.0f64..=10.0, 1.0f64..=10.0, 1.0f64..=10.0), n)
        .prop_map(|v| v.into_iter().map(|(a, b, c)| vad(a, b, c)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn two_model_fit_matches_brute_force((m1, m2, t) in (1usize..15).prop_flat_map(|n| (arb_vads(n), arb_vads(n), arb_vads(n)))) {
        let w = fit_ensemble_weights(&[m1.clone(), m2.clone()], &t, 0.05).unwrap();
        let fitted = mean_error_rate(&ensemble_vad(&[m1.clone(), m2.clone()], &w).unwrap(), &t).unwrap();
        let (oracle_err, _) = brute_force_two(&m1, &m2, &t);
        prop_assert!((fitted - oracle_err).abs() <= 1e-9, "{fitted} vs {oracle_err}");
    }
}
