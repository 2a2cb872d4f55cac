#![no_main]
use eac_core::lifecycle::Snapshot;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(snap) = Snapshot::parse(text) {
        assert!(snap.verify());
        let _ = snap.case();
        assert_eq!(Snapshot::parse(&snap.to_file()).expect("own output parses"), snap);
    }
});
