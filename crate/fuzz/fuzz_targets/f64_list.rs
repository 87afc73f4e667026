#![no_main]

use evreg::cli::parse_f64_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(values) = parse_f64_list("h", text) {
        assert!(values.iter().all(|v| v.is_finite()));
        assert_eq!(values.len(), text.split(',').count());
    }
});
