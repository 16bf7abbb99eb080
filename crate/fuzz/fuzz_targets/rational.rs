#![no_main]

use bhwave::wave::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(q) = parse_rational(text) {
        let out = format_rational(&q);
        assert_eq!(parse_rational(&out).expect("own output parses"), q);
    }
});
