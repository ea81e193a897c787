//! Inverted index and tf.idf page relevance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_store::{DocumentStore, NodeId};

/// Lowercased alphanumeric runs of `text`. No stemming, no stopwords.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Set of query terms, as bit positions into the query's term list.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermSet(pub u64);

impl TermSet {
    pub const EMPTY: TermSet = TermSet(0);

    pub fn single(term: usize) -> Self {
        TermSet(1 << term)
    }

    #[inline]
    pub fn union(self, other: TermSet) -> TermSet {
        TermSet(self.0 | other.0)
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, term: usize) -> bool {
        term < 64 && self.0 & (1 << term) != 0
    }

    pub fn is_subset(self, other: TermSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |t| self.contains(*t))
    }
}

/// Distinct query terms in first-occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    terms: Vec<String>,
}

impl Query {
    pub fn parse(text: &str) -> Result<Query> {
        let mut terms: Vec<String> = Vec::new();
        for t in tokenize(text) {
            if !terms.contains(&t) {
                terms.push(t);
            }
        }
        if terms.is_empty() {
            return Err(Error::EmptyQuery);
        }
        if terms.len() > 64 {
            return Err(Error::QueryTooLong(terms.len()));
        }
        Ok(Query { terms })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Names of the terms in `set`.
    pub fn names(&self, set: TermSet) -> Vec<String> {
        set.iter()
            .filter_map(|i| self.terms.get(i).cloned())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertedIndex {
    /// term -> (doc, term frequency), ordered by doc.
    postings: BTreeMap<String, Vec<(NodeId, u32)>>,
    doc_lengths: Vec<u32>,
}

pub fn build_index(docs: &DocumentStore) -> InvertedIndex {
    let mut postings: BTreeMap<String, Vec<(NodeId, u32)>> = BTreeMap::new();
    let mut doc_lengths = Vec::with_capacity(docs.len());
    for doc in docs.iter() {
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        let mut length = 0u32;
        for token in tokenize(&doc.title).into_iter().chain(tokenize(&doc.body)) {
            *counts.entry(token).or_default() += 1;
            length += 1;
        }
        doc_lengths.push(length);
        for (term, tf) in counts {
            postings.entry(term).or_default().push((doc.id, tf));
        }
    }
    InvertedIndex {
        postings,
        doc_lengths,
    }
}

impl InvertedIndex {
    pub fn doc_count(&self) -> usize {
        self.doc_lengths.len()
    }

    pub fn postings(&self, term: &str) -> &[(NodeId, u32)] {
        self.postings.get(term).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indexed terms in lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = &String> {
        self.postings.keys()
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings(term).len()
    }

    pub fn doc_length(&self, id: NodeId) -> u32 {
        self.doc_lengths[id.index()]
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    /// Checks structural consistency, e.g. after decoding from disk.
    pub fn validate(&self, node_count: usize) -> std::result::Result<(), String> {
        if self.doc_lengths.len() != node_count {
            return Err(format!(
                "index covers {} documents, graph has {node_count}",
                self.doc_lengths.len()
            ));
        }
        for (term, list) in &self.postings {
            if list.is_empty() {
                return Err(format!("term {term:?} has no postings"));
            }
            let mut prev = 0;
            for &(doc, tf) in list {
                if doc.0 <= prev || doc.index() >= node_count {
                    return Err(format!("term {term:?}: bad posting for doc {doc}"));
                }
                if tf == 0 || tf > self.doc_lengths[doc.index()] {
                    return Err(format!("term {term:?}: bad frequency {tf} for doc {doc}"));
                }
                prev = doc.0;
            }
        }
        Ok(())
    }

    /// tf.idf relevance of every document for `query`.
    ///
    /// `mu(d) = sum_t (1 + ln tf) * ln(1 + N / df) / (1 + ln(1 + len(d)))`
    /// over the query terms present in `d`.
    pub fn score(&self, query: &Query) -> RelevanceVector {
        let n = self.doc_count();
        let mut mu = vec![0.0; n];
        let mut matched = vec![TermSet::EMPTY; n];
        for (t, term) in query.terms().iter().enumerate() {
            let list = self.postings(term);
            if list.is_empty() {
                continue;
            }
            let idf = (1.0 + n as f64 / list.len() as f64).ln();
            for &(doc, tf) in list {
                mu[doc.index()] += (1.0 + (tf as f64).ln()) * idf;
                matched[doc.index()] = matched[doc.index()].union(TermSet::single(t));
            }
        }
        for (i, m) in mu.iter_mut().enumerate() {
            if *m > 0.0 {
                *m /= 1.0 + (1.0 + self.doc_lengths[i] as f64).ln();
            }
        }
        RelevanceVector {
            mu,
            matched,
            term_count: query.terms().len(),
        }
    }

    pub fn score_query(&self, text: &str) -> Result<RelevanceVector> {
        Ok(self.score(&Query::parse(text)?))
    }
}

/// Per-page relevance for one query.
#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceVector {
    mu: Vec<f64>,
    matched: Vec<TermSet>,
    term_count: usize,
}

impl RelevanceVector {
    /// Builds a vector from explicit parts, one entry per node.
    pub fn from_parts(mu: Vec<f64>, matched: Vec<TermSet>, term_count: usize) -> Self {
        assert_eq!(mu.len(), matched.len());
        assert!(mu.iter().all(|m| m.is_finite() && *m >= 0.0));
        RelevanceVector {
            mu,
            matched,
            term_count,
        }
    }

    /// Single-term relevance: every page with a positive score matches term 0.
    pub fn from_scores(mu: Vec<f64>) -> Self {
        let matched = mu
            .iter()
            .map(|&m| if m > 0.0 { TermSet::single(0) } else { TermSet::EMPTY })
            .collect();
        Self::from_parts(mu, matched, 1)
    }

    #[inline]
    pub fn mu(&self, id: NodeId) -> f64 {
        self.mu[id.index()]
    }

    #[inline]
    pub fn matched(&self, id: NodeId) -> TermSet {
        self.matched[id.index()]
    }

    pub fn scores(&self) -> &[f64] {
        &self.mu
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.term_count
    }

    /// Pages with positive relevance, in ID order.
    pub fn matching(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.mu
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > 0.0)
            .map(|(i, _)| NodeId::from_index(i))
    }
}
