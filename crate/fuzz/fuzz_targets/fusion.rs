#![no_main]

use libfuzzer_sys::fuzz_target;
use traitfuse::{apply_get_adjustment, validate_scores, FusionParams, GlobalEmotionalTraits};

fn f64_at(data: &[u8], i: usize) -> f64 {
    let mut b = [0u8; 8];
    b.copy_from_slice(&data[i * 8..i * 8 + 8]);
    f64::from_le_bytes(b)
}

fuzz_target!(|data: &[u8]| {
    if data.len() < 40 {
        return;
    }
    let Ok(scores) = validate_scores(f64_at(data, 0), f64_at(data, 1)) else {
        return;
    };
    assert!((scores.violation() + scores.no_violation() - 1.0).abs() <= 1e-9);
    let Ok(get) = GlobalEmotionalTraits::new(f64_at(data, 2), f64_at(data, 3), 1) else {
        return;
    };
    let params = FusionParams {
        adjust_factor: f64_at(data, 4).abs().min(1.0),
        ..FusionParams::default()
    };
    if params.validate().is_err() {
        return;
    }
    let (out, traces) = apply_get_adjustment(scores, &get, &params);
    assert_eq!(traces.len(), 2);
    assert!((0.0..=1.0).contains(&out.violation()) && (0.0..=1.0).contains(&out.no_violation()));
    assert!((out.violation() + out.no_violation() - 1.0).abs() <= 1e-9);
});
