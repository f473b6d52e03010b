#![no_main]

use libfuzzer_sys::fuzz_target;
use traitfuse::evaluation::Expectation;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let parts: Vec<&str> = text.split_whitespace().collect();
    if let Ok(e) = Expectation::parse(&parts) {
        assert!(e.value.is_finite() && e.tolerance >= 0.0);
    }
});
