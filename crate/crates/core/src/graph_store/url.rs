use std::fmt::Write;

use url::Url;

/// Resolves `raw` against `base` (when given) and normalizes the result.
///
/// Scheme and host are lowercased, the fragment is dropped and trailing
/// slashes are removed from the path. Returns `None` when the string cannot
/// be parsed as a URL.
pub fn normalize_url(base: Option<&Url>, raw: &str) -> Option<String> {
    let parsed = match base {
        Some(base) => base.join(raw.trim()).ok()?,
        None => Url::parse(raw.trim()).ok()?,
    };
    Some(canonical_form(&parsed))
}

/// Normalized string form of an already parsed URL.
pub fn canonical_form(url: &Url) -> String {
    let mut out = String::with_capacity(url.as_str().len());
    out.push_str(&url.scheme().to_ascii_lowercase());
    out.push(':');
    if url.has_authority() {
        out.push_str("//");
        if !url.username().is_empty() {
            out.push_str(url.username());
            if let Some(password) = url.password() {
                out.push(':');
                out.push_str(password);
            }
            out.push('@');
        }
        out.push_str(&url.host_str().unwrap_or("").to_ascii_lowercase());
        if let Some(port) = url.port() {
            let _ = write!(out, ":{port}");
        }
    }
    out.push_str(url.path().trim_end_matches('/'));
    if let Some(query) = url.query() {
        out.push('?');
        out.push_str(query);
    }
    out
}
