#![no_main]

use fitkit::io::read_params;
use fitkit::models::{evaluate, ModelId};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&selector, rest)) = data.split_first() else {
        return;
    };
    let model = ModelId::ALL[selector as usize % ModelId::ALL.len()];
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(params) = read_params(model, text) {
        assert_eq!(params.values().len(), model.k());
        for t in [-1.0, 0.0, 1.0, 50.0] {
            let _ = evaluate(&params, t);
        }
    }
});
