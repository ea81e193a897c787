#![no_main]

use libfuzzer_sys::fuzz_target;
use trailfinder_core::harness::SweepSpec;

fuzz_target!(|text: &str| {
    if let Ok(spec) = SweepSpec::parse(text, "fuzz") {
        if spec.validate().is_ok() {
            let _ = spec.grid();
        }
    }
});
