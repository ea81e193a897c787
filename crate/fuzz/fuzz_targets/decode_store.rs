#![no_main]

use libfuzzer_sys::fuzz_target;
use trailfinder_core::store::{assemble, decode_index, decode_pages};

// Input is `pages.jsonl`, a NUL byte, then `index.json`.
fuzz_target!(|data: &[u8]| {
    let split = data.iter().position(|&b| b == 0).unwrap_or(data.len());
    let (pages, index) = (&data[..split], data.get(split + 1..).unwrap_or(&[]));
    let pages = decode_pages(pages);
    let index = decode_index(index);
    if let (Ok(pages), Ok(index)) = (pages, index) {
        let _ = assemble(pages, index);
    }
});
