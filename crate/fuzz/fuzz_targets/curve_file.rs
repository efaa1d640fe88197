#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(dict) = lefschetz::format::parse_curve_file(src) {
        // Accepted input must round-trip through the serializer.
        let text = lefschetz::format::serialize_curve_file(&dict);
        let again = lefschetz::format::parse_curve_file(&text).expect("serialized dict reparses");
        assert_eq!(text, lefschetz::format::serialize_curve_file(&again));
    }
});
