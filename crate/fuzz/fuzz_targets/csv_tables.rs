#![no_main]

use bhwave::report::Table;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = Table::from_csv(text) {
        let out = t.to_csv();
        let back = Table::from_csv(&out).expect("own output parses");
        assert_eq!(back.to_csv(), out);
    }
});
