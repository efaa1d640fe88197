#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(specs) = lefschetz::format::parse_move_script(src) {
        // Inline moves must survive a serialize/reparse cycle.
        for spec in specs {
            if let lefschetz::format::MoveSpec::Concrete(mv) = spec {
                let line = lefschetz::format::serialize_move(&mv);
                let reparsed =
                    lefschetz::format::parse_move_script(&line).expect("serialized move reparses");
                assert_eq!(reparsed, vec![lefschetz::format::MoveSpec::Concrete(mv)]);
            }
        }
    }
});
