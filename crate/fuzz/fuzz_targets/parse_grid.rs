#![no_main]

use fitkit::io::parse_grid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(grid) = parse_grid(spec) {
        assert!(grid.len() >= 3);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }
});
