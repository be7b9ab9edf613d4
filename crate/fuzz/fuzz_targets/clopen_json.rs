#![no_main]

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse, to_string, ClopenJson};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse::<ClopenJson>(text) else { return };
    let Ok(set) = spec.build() else { return };
    // Canonical output loads back to the same set.
    let again = parse::<ClopenJson>(&to_string(&ClopenJson::from_set(&set))).unwrap().build().unwrap();
    assert_eq!(again, set);
});
