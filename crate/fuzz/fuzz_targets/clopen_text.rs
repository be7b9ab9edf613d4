#![no_main]

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse_set, render_set, SpaceContext};
use symdyn::{Alphabet, SpaceSpec};

fuzz_target!(|data: &[u8]| {
    let Some((&kind, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let space = match kind % 4 {
        0 => SpaceSpec::one_sided(Alphabet::binary()),
        1 => SpaceSpec::two_sided(Alphabet::binary()),
        2 => SpaceSpec::one_sided(Alphabet::from_chars("abc").unwrap()),
        _ => SpaceSpec::tagged(vec!["p".into(), "q".into()], SpaceSpec::TwoSided(Alphabet::binary())).unwrap(),
    };
    let ctx = SpaceContext(space);
    if let Ok(set) = parse_set(text, &ctx) {
        assert_eq!(parse_set(&render_set(&set), &ctx).unwrap(), set);
    }
});
