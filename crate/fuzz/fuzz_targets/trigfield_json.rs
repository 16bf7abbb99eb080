#![no_main]

use bhwave::TrigField;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(f) = TrigField::from_json(text) {
        let out = f.to_json();
        let back = TrigField::from_json(&out).expect("own output parses");
        assert_eq!(back, f);
    }
});
