use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::NodeId;

/// Indexed page text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: NodeId,
    pub url: String,
    pub title: String,
    pub body: String,
    /// Hex SHA-256 of the body bytes.
    pub checksum: String,
}

impl Document {
    pub fn new(id: NodeId, url: String, title: String, body: String) -> Self {
        let checksum = content_checksum(body.as_bytes());
        Document {
            id,
            url,
            title,
            body,
            checksum,
        }
    }
}

pub fn content_checksum(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        out.push(char::from_digit((b >> 4) as u32, 16).unwrap());
        out.push(char::from_digit((b & 0xf) as u32, 16).unwrap());
    }
    out
}

/// Documents ordered by ID (`docs[i].id == i + 1`).
#[derive(Debug, Clone, Default)]
pub struct DocumentStore {
    docs: Vec<Document>,
}

impl DocumentStore {
    pub fn new(docs: Vec<Document>) -> Self {
        debug_assert!(docs.iter().enumerate().all(|(i, d)| d.id.index() == i));
        DocumentStore { docs }
    }

    pub fn get(&self, id: NodeId) -> Option<&Document> {
        if id.0 == 0 {
            return None;
        }
        self.docs.get(id.index())
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Document> {
        self.docs.iter()
    }
}

/// Equal-content classes. A class is named by its lowest member ID.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContentClasses {
    class_of: Vec<u32>,
}

impl ContentClasses {
    /// Groups documents whose checksums match and whose bodies compare equal.
    pub fn from_documents(store: &DocumentStore) -> Self {
        let mut by_checksum: HashMap<&str, Vec<NodeId>> = HashMap::new();
        let mut class_of = Vec::with_capacity(store.len());
        for doc in store.iter() {
            let reps = by_checksum.entry(doc.checksum.as_str()).or_default();
            let existing = reps
                .iter()
                .copied()
                .find(|rep| store.get(*rep).is_some_and(|r| r.body == doc.body));
            match existing {
                Some(rep) => class_of.push(rep.0),
                None => {
                    reps.push(doc.id);
                    class_of.push(doc.id.0);
                }
            }
        }
        ContentClasses { class_of }
    }

    /// Every node in its own class.
    pub fn identity(node_count: usize) -> Self {
        ContentClasses {
            class_of: (1..=node_count as u32).collect(),
        }
    }

    /// Classes given directly, one entry per node (index `i` is node `i + 1`).
    pub fn from_raw(class_of: Vec<u32>) -> Self {
        ContentClasses { class_of }
    }

    #[inline]
    pub fn class_of(&self, id: NodeId) -> u32 {
        self.class_of[id.index()]
    }

    #[inline]
    pub fn same(&self, a: NodeId, b: NodeId) -> bool {
        self.class_of(a) == self.class_of(b)
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }
}
