#![no_main]
use eac_core::dsl::{parse, serialize};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(parsed) = parse(text) {
        let printed = serialize(&parsed.case);
        let again = parse(&printed).expect("serialized case reparses");
        assert_eq!(again.case, parsed.case);
        assert_eq!(serialize(&again.case), printed);
    }
});
