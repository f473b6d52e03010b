#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use traitfuse::backends::{parse_manifest, Strictness};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for strictness in [Strictness::Strict, Strictness::Lenient] {
        if let Ok(m) = parse_manifest("fuzz", text, Path::new("base"), strictness) {
            assert!(!m.entries.is_empty());
            assert!(m.params.validate().is_ok());
        }
    }
});
