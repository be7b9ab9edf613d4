#![no_main]

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse, TableJson};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse::<TableJson>(text) else { return };
    // Loading re-simulates every entry; keep runs short.
    if spec.cutoff > 10_000 || spec.entries.keys().any(|&n| n > 64) {
        return;
    }
    let _ = spec.build();
});
