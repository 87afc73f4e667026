#![no_main]

use evreg::cli::parse_run_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // Large gallery sizes are legal but slow to build.
    if text.len() > 4096 {
        return;
    }
    if let Ok(cfg) = parse_run_config(text) {
        let f = cfg.operator_function().expect("validated config builds");
        let x = cfg.initial_vector(f.dim()).expect("validated vector fits");
        assert_eq!(x.len(), f.dim());
        assert_eq!(cfg.scan.first(), Some(&0));
    }
});
