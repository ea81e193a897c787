//! Trail-based site search.
//!
//! A site snapshot is loaded into a [`graph_store::WebGraph`], indexed for
//! tf.idf relevance, and searched with the probabilistic best-first Best
//! Trail algorithm. The resulting trails are filtered, sorted and merged into
//! a navigable forest.

pub mod best_trail;
pub mod config;
pub mod engine;
pub mod error;
pub mod graph_store;
pub mod harness;
pub mod index;
pub mod potential_gain;
pub mod store;
pub mod trail_post;

pub use error::{Error, Result};
