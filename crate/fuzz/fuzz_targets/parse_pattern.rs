#![no_main]
use eac_core::patterns::{parse_pattern, serialize_pattern};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = parse_pattern(text) {
        let printed = serialize_pattern(&parsed.pattern);
        let again = parse_pattern(&printed).expect("serialized pattern reparses");
        assert_eq!(again.pattern, parsed.pattern);
    }
});
