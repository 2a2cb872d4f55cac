#![no_main]
use eac_serve::journal::{parse_line, read_entries};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(entry) = parse_line(text) {
        assert_eq!(parse_line(entry.to_line().trim_end()).expect("own output parses"), entry);
    }
    let _ = read_entries(text);
});
