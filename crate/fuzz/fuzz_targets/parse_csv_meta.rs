#![no_main]
use libfuzzer_sys::fuzz_target;
use qent_core::report::parse_csv_meta;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(meta) = parse_csv_meta(text, "fuzz") {
        assert!(!meta.kind.is_empty());
        assert!(!meta.version.is_empty());
        assert!(!meta.columns.is_empty());
    }
});
