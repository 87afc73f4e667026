#![no_main]

use evreg::cli::parse_report;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = parse_report(text) {
        let _ = report.to_csv();
        let json = report.to_json().expect("reports serialize");
        let back = parse_report(&json).expect("own output parses");
        assert_eq!(back.to_json().unwrap(), json);
    }
});
