#![no_main]

use evreg::cli::parse_window;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(w) = parse_window("window", text) {
        assert!(w.lo().is_finite());
        if let Some(hi) = w.hi() {
            assert!(w.lo() < hi);
        }
    }
});
