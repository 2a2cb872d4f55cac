#![no_main]
use eac_core::export::{from_interchange, to_interchange};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(case) = from_interchange(data) {
        let doc = to_interchange(&case);
        assert_eq!(from_interchange(doc.as_bytes()).expect("own output decodes"), case);
    }
});
