//! Store directory written by ingest and read by every query command.
//!
//! Layout:
//!
//! - `manifest.json`: format tag, version, counts and the SHA-256 of the
//!   two data files.
//! - `pages.jsonl`: one page per line in ID order, with `id`, `url`,
//!   `title`, `content`, `checksum` and `links` (destination IDs).
//! - `index.json`: the inverted index.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_store::{content_checksum, ContentClasses, Document, DocumentStore, NodeId, Site, WebGraph};
use crate::index::{build_index, InvertedIndex};

pub const FORMAT: &str = "trailfinder-store";
pub const VERSION: u32 = 1;

const MANIFEST: &str = "manifest.json";
const PAGES: &str = "pages.jsonl";
const INDEX: &str = "index.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub version: u32,
    pub node_count: usize,
    pub edge_count: usize,
    pub pages_sha256: String,
    pub index_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredPage {
    pub id: NodeId,
    pub url: String,
    pub title: String,
    pub content: String,
    pub checksum: String,
    pub links: Vec<NodeId>,
}

/// A loaded store.
#[derive(Debug, Clone)]
pub struct Store {
    pub site: Site,
    pub index: InvertedIndex,
}

fn store_err(dir: &Path, message: impl Into<String>) -> Error {
    Error::Store {
        path: dir.to_path_buf(),
        message: message.into(),
    }
}

/// Serializes the pages of a site, one JSON object per line.
pub fn encode_pages(site: &Site) -> Vec<u8> {
    let mut out = Vec::new();
    for doc in site.docs.iter() {
        let page = StoredPage {
            id: doc.id,
            url: doc.url.clone(),
            title: doc.title.clone(),
            content: doc.body.clone(),
            checksum: doc.checksum.clone(),
            links: site.graph.successors(doc.id).to_vec(),
        };
        serde_json::to_writer(&mut out, &page).expect("pages serialize");
        out.push(b'\n');
    }
    out
}

pub fn decode_pages(bytes: &[u8]) -> std::result::Result<Vec<StoredPage>, String> {
    let text = std::str::from_utf8(bytes).map_err(|e| format!("{PAGES}: {e}"))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("{PAGES} line {}: {e}", i + 1)))
        .collect()
}

pub fn decode_index(bytes: &[u8]) -> std::result::Result<InvertedIndex, String> {
    serde_json::from_slice(bytes).map_err(|e| format!("{INDEX}: {e}"))
}

/// Rebuilds a site from decoded pages, checking IDs, links and checksums.
pub fn assemble(pages: Vec<StoredPage>, index: InvertedIndex) -> std::result::Result<Store, String> {
    if pages.is_empty() {
        return Err("store has no pages".into());
    }
    let n = pages.len();
    let mut urls = Vec::with_capacity(n);
    let mut links = Vec::with_capacity(n);
    let mut docs = Vec::with_capacity(n);
    for (i, page) in pages.into_iter().enumerate() {
        if page.id != NodeId::from_index(i) {
            return Err(format!("page {} found at position {}", page.id, i + 1));
        }
        if page.checksum != content_checksum(page.content.as_bytes()) {
            return Err(format!("page {}: checksum mismatch", page.id));
        }
        urls.push(page.url.clone());
        links.push(page.links);
        docs.push(Document::new(page.id, page.url, page.title, page.content));
    }
    let graph = WebGraph::from_links(urls, links).map_err(|e| e.to_string())?;
    index.validate(n)?;
    let docs = DocumentStore::new(docs);
    let classes = ContentClasses::from_documents(&docs);
    Ok(Store {
        site: Site { graph, docs, classes },
        index,
    })
}

/// Writes a site and its index, creating `dir` if needed.
pub fn write_store(dir: &Path, site: &Site, index: &InvertedIndex) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let pages = encode_pages(site);
    let index_bytes = serde_json::to_vec(index).map_err(|e| store_err(dir, e.to_string()))?;
    let manifest = Manifest {
        format: FORMAT.to_string(),
        version: VERSION,
        node_count: site.graph.node_count(),
        edge_count: site.graph.edge_count(),
        pages_sha256: content_checksum(&pages),
        index_sha256: content_checksum(&index_bytes),
    };
    std::fs::write(dir.join(PAGES), &pages)?;
    std::fs::write(dir.join(INDEX), &index_bytes)?;
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    manifest_bytes.push(b'\n');
    std::fs::write(dir.join(MANIFEST), manifest_bytes)?;
    Ok(manifest)
}

/// Indexes a site and writes it.
pub fn ingest(site: &Site, dir: &Path) -> Result<Manifest> {
    write_store(dir, site, &build_index(&site.docs))
}

fn read(dir: &Path, name: &str) -> Result<Vec<u8>> {
    std::fs::read(dir.join(name)).map_err(|e| store_err(dir, format!("{name}: {e}")))
}

pub fn open_store(dir: &Path) -> Result<Store> {
    let manifest: Manifest = serde_json::from_slice(&read(dir, MANIFEST)?)
        .map_err(|e| store_err(dir, format!("{MANIFEST}: {e}")))?;
    if manifest.format != FORMAT || manifest.version != VERSION {
        return Err(store_err(
            dir,
            format!("unsupported format {} version {}", manifest.format, manifest.version),
        ));
    }
    let pages = read(dir, PAGES)?;
    let index = read(dir, INDEX)?;
    if content_checksum(&pages) != manifest.pages_sha256 {
        return Err(store_err(dir, format!("{PAGES} does not match the manifest")));
    }
    if content_checksum(&index) != manifest.index_sha256 {
        return Err(store_err(dir, format!("{INDEX} does not match the manifest")));
    }
    let pages = decode_pages(&pages).map_err(|e| store_err(dir, e))?;
    let index = decode_index(&index).map_err(|e| store_err(dir, e))?;
    let store = assemble(pages, index).map_err(|e| store_err(dir, e))?;
    if store.site.graph.node_count() != manifest.node_count
        || store.site.graph.edge_count() != manifest.edge_count
    {
        return Err(store_err(dir, "counts do not match the manifest"));
    }
    Ok(store)
}
