#![no_main]

use fitkit::io::{read_report, write_report};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(report) = read_report(text) {
        let written = write_report(&report);
        let again = read_report(&written).expect("written report reads back");
        assert_eq!(report, again);
        assert_eq!(written, write_report(&again));
    }
});
