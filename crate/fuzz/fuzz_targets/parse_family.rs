#![no_main]

use libfuzzer_sys::fuzz_target;
use xfam::Family;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(f) = Family::from_json_str(text) {
        // Whatever parses must survive a round trip through both encodings.
        let back = Family::from_json_str(&f.to_json_string()).expect("canonical form parses");
        assert_eq!(back, f);
        let compact = Family::from_json_value(f.to_compact_json_value()).expect("compact form parses");
        assert_eq!(compact, f);
    }
});
