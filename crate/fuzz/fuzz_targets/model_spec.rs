#![no_main]

use dualgeo::{ManifoldModel, ModelSpec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(spec) = ModelSpec::parse(data) {
        if let Ok(model) = spec.build() {
            let again: ManifoldModel = model.spec_string().parse().expect("canonical spec reparses");
            assert_eq!(again.spec_string(), model.spec_string());
        }
    }
});
