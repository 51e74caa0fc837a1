#![no_main]

use libfuzzer_sys::fuzz_target;
use xfam::MeasureTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(mu) = MeasureTable::from_json_str(text) {
        let back = MeasureTable::from_json_value(mu.to_json_value()).expect("output parses");
        assert_eq!(back, mu);
        let _ = mu.validate_window();
    }
});
