#![no_main]

use fitkit::scenarios::Scenario;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let name = Scenario::NAMES[selector as usize % Scenario::NAMES.len()];
    let Ok(json) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(scenario) = Scenario::from_json(name, json) {
        if scenario.validate().is_ok() {
            for t in [0.0, 0.5, 12.0, 123.0] {
                let _ = scenario.value(t);
            }
        }
    }
});
