#![no_main]

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse, PartitionJson, SpaceContext};
use symdyn::system::ShiftSystem;
use symdyn::{Alphabet, EffectiveSystem, SpaceSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse::<PartitionJson>(text) else { return };
    let golden = ShiftSystem::sft(SpaceSpec::one_sided(Alphabet::binary()), vec![vec![1, 1]]).unwrap();
    let ctx = SpaceContext(golden.whole().space().clone());
    if let Ok(p) = spec.build(&golden, &ctx) {
        assert!(PartitionJson::from_partition(&p).build(&golden, &ctx).is_ok());
    }
});
