#![no_main]

use dualgeo::ModelSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(spec) = ModelSpec::from_json(data) {
        let _ = spec.build();
    }
});
