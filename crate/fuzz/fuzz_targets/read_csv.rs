#![no_main]

use fitkit::io::{read_csv, read_csv_str, write_series_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    // Anything accepted must survive a write/read cycle unchanged.
    if let Ok(series) = read_csv(data) {
        let again = read_csv_str(&write_series_csv(&series)).expect("written CSV reads back");
        assert_eq!(series, again);
    }
});
