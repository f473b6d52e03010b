#![no_main]

use libfuzzer_sys::fuzz_target;
use traitfuse::backends::{parse_sidecar, to_sidecar_json, Strictness};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let lenient = parse_sidecar("fuzz", text, Strictness::Lenient);
    if let Ok(strict) = parse_sidecar("fuzz", text, Strictness::Strict) {
        assert_eq!(lenient.as_ref().ok(), Some(&strict));
    }
    if let Ok(ann) = lenient {
        let again = parse_sidecar("fuzz", &to_sidecar_json(&ann), Strictness::Strict).expect("own output parses");
        assert_eq!(again, ann);
    }
});
