#![no_main]

use libfuzzer_sys::fuzz_target;
use trailfinder_core::graph_store::normalize_url;
use trailfinder_core::index::Query;

fuzz_target!(|text: &str| {
    let _ = Query::parse(text);
    let base = url::Url::parse("http://example.org/a/b.html").unwrap();
    let _ = normalize_url(None, text);
    let _ = normalize_url(Some(&base), text);
});
