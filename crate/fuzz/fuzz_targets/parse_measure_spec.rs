#![no_main]

use libfuzzer_sys::fuzz_target;
use xfam::MeasureTable;

fuzz_target!(|data: &[u8]| {
    let Some((&first, rest)) = data.split_first() else {
        return;
    };
    let Ok(spec) = std::str::from_utf8(rest) else {
        return;
    };
    let n = usize::from(first % 25);
    if let Ok(mu) = MeasureTable::from_spec(spec, n) {
        assert_eq!(mu.n(), n);
        assert_eq!(mu.weights().len(), n + 1);
    }
});
