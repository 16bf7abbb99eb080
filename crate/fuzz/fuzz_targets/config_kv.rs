#![no_main]

use bhwave::report::{emit_config, parse_config};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(map) = parse_config(text) {
        assert_eq!(parse_config(&emit_config(&map)).expect("own output parses"), map);
    }
});
