#![no_main]

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse, to_string, QueryFile, QueryKind};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = QueryKind::parse(text);
    let Ok(file) = parse::<QueryFile>(text) else { return };
    for q in file.into_queries() {
        let again: symdyn::json::QueryJson = parse(&to_string(&q)).unwrap();
        assert_eq!(again, q);
    }
});
