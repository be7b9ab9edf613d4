#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse, SystemJson};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse::<SystemJson>(text) {
        // File references resolve against a directory that does not exist.
        let _ = spec.build(Path::new("/nonexistent"));
    }
});
