#![no_main]

use std::sync::OnceLock;

use lefschetz::cover::CurveDictionary;
use libfuzzer_sys::fuzz_target;

const DICT: &str = "\
surface N 5
curve a1 lift 1 0 0 0 0 0 0 0
curve a2 lift 0 0 1 0 0 0 0 0
curve b1 lift 0 1 0 0 0 0 0 0
curve b2 lift 0 0 0 1 0 0 0 0
curve s null waist
disjoint a1 a2
disjoint b1 b2
";

fn dict() -> &'static CurveDictionary {
    static DICT_CELL: OnceLock<CurveDictionary> = OnceLock::new();
    DICT_CELL.get_or_init(|| lefschetz::format::parse_curve_file(DICT).expect("fixture parses"))
}

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(word) = lefschetz::format::parse_word_file(src, dict()) {
        let text = lefschetz::format::serialize_word(&word);
        let again =
            lefschetz::format::parse_word_file(&text, dict()).expect("serialized word reparses");
        assert_eq!(word, again);
    }
});
