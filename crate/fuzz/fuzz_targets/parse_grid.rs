#![no_main]
use libfuzzer_sys::fuzz_target;
use qent_core::report::parse_grid_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_grid_spec(text) {
        assert!(!grid.is_empty() && grid.len() <= 1_000_000);
        assert!(grid.iter().all(|v| v.is_finite()));
    }
});
