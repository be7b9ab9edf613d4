#![no_main]

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse, AutomatonJson, BuiltAutomaton};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse::<AutomatonJson>(text) else { return };
    match spec.build() {
        Ok(BuiltAutomaton::Dfa(d)) => assert_eq!(AutomatonJson::from_dfa(&d).build().map(|_| ()).ok(), Some(())),
        Ok(BuiltAutomaton::Muller(m)) => assert_eq!(AutomatonJson::from_muller(&m).build().map(|_| ()).ok(), Some(())),
        Err(_) => {}
    }
});
