#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(m) = lefschetz::format::parse_matrix_file(src) {
        let text = lefschetz::format::serialize_matrix_file(&m);
        let again =
            lefschetz::format::parse_matrix_file(&text).expect("serialized matrix reparses");
        assert_eq!(m, again);
    }
});
