#![no_main]

use libfuzzer_sys::fuzz_target;
use symdyn::json::{parse, MachineJson};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse::<MachineJson>(text) else { return };
    let Ok(machine) = spec.build() else { return };
    let again = MachineJson::from_machine(&machine).build().unwrap();
    assert_eq!(MachineJson::from_machine(&again), MachineJson::from_machine(&machine));
    let _ = machine.homing();
});
