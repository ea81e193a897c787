use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};
use url::Url;

use super::url::canonical_form;
use super::{ContentClasses, Document, DocumentStore, NodeId, WebGraph};
use crate::error::{Error, Result};

/// One line of a snapshot file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnapshotRecord {
    pub url: String,
    #[serde(default)]
    pub title: String,
    pub content: String,
    #[serde(default)]
    pub links: Vec<String>,
}

/// A record after URL normalization, still carrying its source line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedPage {
    pub line: usize,
    pub url: String,
    pub title: String,
    pub content: String,
    /// Normalized link targets; unparseable links are dropped.
    pub links: Vec<String>,
}

/// Graph, documents and content classes of one site snapshot.
#[derive(Debug, Clone)]
pub struct Site {
    pub graph: WebGraph,
    pub docs: DocumentStore,
    pub classes: ContentClasses,
}

/// Parses line-delimited JSON records. Blank lines are skipped.
pub fn parse_snapshot<R: BufRead>(reader: R) -> Result<Vec<ParsedPage>> {
    let mut pages = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| malformed(line_no, e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: SnapshotRecord =
            serde_json::from_str(&line).map_err(|e| malformed(line_no, e.to_string()))?;
        let base = Url::parse(record.url.trim())
            .map_err(|e| malformed(line_no, format!("bad url {:?}: {e}", record.url)))?;
        let url = canonical_form(&base);
        if seen.insert(url.clone(), line_no).is_some() {
            return Err(Error::DuplicateUrl { line: line_no, url });
        }
        let links = record
            .links
            .iter()
            .filter_map(|l| base.join(l.trim()).ok())
            .map(|u| canonical_form(&u))
            .collect();
        pages.push(ParsedPage {
            line: line_no,
            url,
            title: record.title,
            content: record.content,
            links,
        });
    }
    Ok(pages)
}

fn malformed(line: usize, message: String) -> Error {
    Error::MalformedRecord { line, message }
}

/// Assigns IDs in record order and keeps only links whose target has a record.
pub fn build_site(pages: Vec<ParsedPage>) -> Result<Site> {
    if pages.is_empty() {
        return Err(Error::EmptySnapshot);
    }
    let ids: HashMap<&str, NodeId> = pages
        .iter()
        .enumerate()
        .map(|(i, p)| (p.url.as_str(), NodeId::from_index(i)))
        .collect();
    let links: Vec<Vec<NodeId>> = pages
        .iter()
        .map(|p| p.links.iter().filter_map(|l| ids.get(l.as_str()).copied()).collect())
        .collect();
    drop(ids);

    let urls = pages.iter().map(|p| p.url.clone()).collect();
    let graph = WebGraph::from_links(urls, links)?;
    let docs = DocumentStore::new(
        pages
            .into_iter()
            .enumerate()
            .map(|(i, p)| Document::new(NodeId::from_index(i), p.url, p.title, p.content))
            .collect(),
    );
    let classes = ContentClasses::from_documents(&docs);
    Ok(Site {
        graph,
        docs,
        classes,
    })
}

pub fn load_snapshot(path: impl AsRef<Path>) -> Result<Site> {
    let file = File::open(path.as_ref())?;
    build_site(parse_snapshot(BufReader::new(file))?)
}

/// Parses and builds a site from an in-memory snapshot.
pub fn site_from_str(text: &str) -> Result<Site> {
    build_site(parse_snapshot(text.as_bytes())?)
}
