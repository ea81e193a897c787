#![no_main]

use libfuzzer_sys::fuzz_target;
use trailfinder_core::config::EngineConfig;

fuzz_target!(|text: &str| {
    if let Ok(cfg) = EngineConfig::from_str_with_origin(text, "fuzz") {
        let _ = cfg.validate();
    }
});
