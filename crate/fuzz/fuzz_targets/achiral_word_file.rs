#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(word) = lefschetz::format::parse_achiral_word_file(src) {
        let text = lefschetz::format::serialize_word(&word);
        let again = lefschetz::format::parse_achiral_word_file(&text)
            .expect("serialized lifted word reparses");
        assert_eq!(word, again);
    }
});
