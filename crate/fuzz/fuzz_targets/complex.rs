#![no_main]

use evreg::cli::parse_complex;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(z) = parse_complex("z", text) {
        assert!(z.re.is_finite() && z.im.is_finite());
        // The pair form reproduces the value exactly.
        let again = parse_complex("z", &format!("{:?},{:?}", z.re, z.im)).unwrap();
        assert_eq!(again, z);
    }
});
