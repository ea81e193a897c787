//! Site snapshot loading, the directed web graph and content-equality classes.

mod content;
mod graph;
mod snapshot;
mod url;

pub use content::{content_checksum, ContentClasses, Document, DocumentStore};
pub use graph::{graph_stats, GraphStats, NodeId, WebGraph};
pub use snapshot::{
    build_site, load_snapshot, parse_snapshot, site_from_str, ParsedPage, Site, SnapshotRecord,
};
pub use url::{canonical_form, normalize_url};
