use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Page identifier. IDs are dense and start at 1, in first-seen order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    /// Zero-based position of this ID in per-node arrays.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        NodeId(index as u32 + 1)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Directed web graph in compressed sparse row form, with both directions
/// and the URL <-> ID mapping.
#[derive(Debug, Clone)]
pub struct WebGraph {
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    urls: Vec<String>,
    ids: HashMap<String, NodeId>,
}

/// Size and degree statistics that drive the search cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GraphStats {
    pub node_count: usize,
    pub edge_count: usize,
    /// Maximal outdegree.
    pub beta: usize,
    /// Outdegree of each node weighted by the share of all links pointing at it.
    pub weighted_avg_outdegree: f64,
}

impl WebGraph {
    /// Builds a graph from per-node URLs and out-adjacency lists.
    ///
    /// `links[i]` holds the destinations of node `i + 1` in snapshot order;
    /// repeated destinations are collapsed, keeping the first occurrence.
    pub fn from_links(urls: Vec<String>, links: Vec<Vec<NodeId>>) -> Result<Self> {
        if urls.len() != links.len() {
            return Err(Error::param(
                "links",
                format!("{} urls but {} adjacency lists", urls.len(), links.len()),
            ));
        }
        let n = urls.len();
        let mut ids = HashMap::with_capacity(n);
        for (i, url) in urls.iter().enumerate() {
            if ids.insert(url.clone(), NodeId::from_index(i)).is_some() {
                return Err(Error::param("urls", format!("duplicate url {url}")));
            }
        }

        let mut out_offsets = Vec::with_capacity(n + 1);
        let mut out_targets = Vec::new();
        let mut in_degree = vec![0usize; n];
        let mut seen = vec![u32::MAX; n];
        out_offsets.push(0);
        for (i, dests) in links.iter().enumerate() {
            for &d in dests {
                if d.0 == 0 || d.index() >= n {
                    return Err(Error::UnknownNode(d));
                }
                if seen[d.index()] == i as u32 {
                    continue;
                }
                seen[d.index()] = i as u32;
                out_targets.push(d);
                in_degree[d.index()] += 1;
            }
            out_offsets.push(out_targets.len());
        }

        let mut in_offsets = Vec::with_capacity(n + 1);
        in_offsets.push(0);
        for d in &in_degree {
            in_offsets.push(in_offsets.last().unwrap() + d);
        }
        let mut fill = in_offsets[..n].to_vec();
        let mut in_sources = vec![NodeId(0); out_targets.len()];
        for src in 0..n {
            for &d in &out_targets[out_offsets[src]..out_offsets[src + 1]] {
                in_sources[fill[d.index()]] = NodeId::from_index(src);
                fill[d.index()] += 1;
            }
        }

        Ok(WebGraph {
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
            urls,
            ids,
        })
    }

    /// Graph over `n` nodes with synthetic URLs, from 1-based `(src, dst)` pairs.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut links = vec![Vec::new(); n];
        for &(s, d) in edges {
            if s == 0 || s as usize > n {
                return Err(Error::UnknownNode(NodeId(s)));
            }
            links[s as usize - 1].push(NodeId(d));
        }
        let urls = (1..=n).map(|i| format!("node:{i}")).collect();
        Self::from_links(urls, links)
    }

    pub fn node_count(&self) -> usize {
        self.urls.len()
    }

    pub fn edge_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn node_ids(&self) -> impl ExactSizeIterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId::from_index)
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.0 >= 1 && id.index() < self.node_count()
    }

    fn check(&self, id: NodeId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::UnknownNode(id))
        }
    }

    pub fn outlinks(&self, id: NodeId) -> Result<&[NodeId]> {
        self.check(id)?;
        Ok(self.successors(id))
    }

    pub fn inlinks(&self, id: NodeId) -> Result<&[NodeId]> {
        self.check(id)?;
        Ok(self.predecessors(id))
    }

    /// Out-adjacency without bounds reporting. Panics on an invalid ID.
    #[inline]
    pub fn successors(&self, id: NodeId) -> &[NodeId] {
        let i = id.index();
        &self.out_targets[self.out_offsets[i]..self.out_offsets[i + 1]]
    }

    /// In-adjacency without bounds reporting. Panics on an invalid ID.
    #[inline]
    pub fn predecessors(&self, id: NodeId) -> &[NodeId] {
        let i = id.index();
        &self.in_sources[self.in_offsets[i]..self.in_offsets[i + 1]]
    }

    #[inline]
    pub fn out_degree(&self, id: NodeId) -> usize {
        let i = id.index();
        self.out_offsets[i + 1] - self.out_offsets[i]
    }

    #[inline]
    pub fn in_degree(&self, id: NodeId) -> usize {
        let i = id.index();
        self.in_offsets[i + 1] - self.in_offsets[i]
    }

    pub fn has_edge(&self, src: NodeId, dst: NodeId) -> bool {
        self.contains(src) && self.successors(src).contains(&dst)
    }

    pub fn url_of(&self, id: NodeId) -> Option<&str> {
        if self.contains(id) {
            Some(&self.urls[id.index()])
        } else {
            None
        }
    }

    pub fn id_of(&self, url: &str) -> Option<NodeId> {
        self.ids.get(url).copied()
    }

    pub fn stats(&self) -> GraphStats {
        graph_stats(self)
    }
}

/// Degree statistics: maximal outdegree and the weighted average outdegree
/// `sum_n outdeg(n) * indeg(n) / |E|` (zero for an edgeless graph).
pub fn graph_stats(graph: &WebGraph) -> GraphStats {
    let edges = graph.edge_count();
    let mut beta = 0;
    let mut weighted = 0.0;
    for id in graph.node_ids() {
        let out = graph.out_degree(id);
        beta = beta.max(out);
        if edges > 0 {
            weighted += out as f64 * (graph.in_degree(id) as f64 / edges as f64);
        }
    }
    GraphStats {
        node_count: graph.node_count(),
        edge_count: edges,
        beta,
        weighted_avg_outdegree: weighted,
    }
}
