#![no_main]

use libfuzzer_sys::fuzz_target;
use trailfinder_core::graph_store::{parse_snapshot, site_from_str};

fuzz_target!(|data: &[u8]| {
    let _ = parse_snapshot(data);
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = site_from_str(text);
    }
});
