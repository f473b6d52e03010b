#![no_main]

use libfuzzer_sys::fuzz_target;
use traitfuse::evaluation::{parse_rows, summarize_rows};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(rows) = parse_rows(text) {
        for r in &rows {
            assert!((0.0..=100.0).contains(&r.accuracy) && (0.0..=100.0).contains(&r.coverage));
        }
        let _ = summarize_rows(rows);
    }
});
