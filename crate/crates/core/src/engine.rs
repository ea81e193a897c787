//! Query pipeline over a loaded store.

use std::time::Instant;

use serde::Serialize;

use crate::best_trail::{run_best_trail, Params, ScoreParams, ScoringFunction, SearchContext, Trail};
use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::graph_store::NodeId;
use crate::index::{Query, RelevanceVector};
use crate::potential_gain::{select_starting_points, LinkMetrics, StartStrategy};
use crate::store::{open_store, Store};
use crate::trail_post::{merge_forest, process_trails, ForestNode, TrailForest};

/// Per-request parameter overrides; `None` keeps the configured value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchOverrides {
    pub k: Option<usize>,
    pub seed: Option<u64>,
    pub explore_iterations: Option<usize>,
    pub converge_iterations: Option<usize>,
    pub repetitions: Option<usize>,
    pub discrimination: Option<f64>,
    pub strategy: Option<StartStrategy>,
}

/// Ranked trails of one query before rendering.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub query: Query,
    pub relevance: RelevanceVector,
    pub starts: Vec<NodeId>,
    pub trails: Vec<Trail>,
    pub forest: TrailForest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageView {
    pub id: NodeId,
    pub url: String,
    pub title: String,
    /// Relevance of the page for the query.
    pub score: f64,
    pub terms: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrailView {
    pub rank: usize,
    pub found_by: ScoringFunction,
    pub scores: TrailScoresView,
    pub terms: Vec<String>,
    pub nodes: Vec<PageView>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrailScoresView {
    pub sum_distinct: f64,
    pub discounted: f64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestNodeView {
    #[serde(flatten)]
    pub page: PageView,
    /// Rank of the best trail through this node.
    pub best_rank: usize,
    /// Ranks of the trails ending here.
    pub ends: Vec<usize>,
    pub children: Vec<ForestNodeView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResponse {
    pub query: String,
    pub elapsed_ms: u64,
    pub forest: Vec<ForestNodeView>,
    pub flat_trails: Vec<TrailView>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageLink {
    pub id: NodeId,
    pub url: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PageInfo {
    pub id: NodeId,
    pub url: String,
    pub title: String,
    pub outlinks: Vec<PageLink>,
    pub inlinks: Vec<PageLink>,
    pub pg: f64,
}

pub struct Engine {
    store: Store,
    metrics: LinkMetrics,
    config: EngineConfig,
    pool: rayon::ThreadPool,
}

impl Engine {
    pub fn new(store: Store, config: EngineConfig) -> Result<Self> {
        config.validate()?;
        let metrics = LinkMetrics::compute(&store.site.graph, config.dmax, config.hub_iterations)?;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::param("workers", e.to_string()))?;
        Ok(Engine {
            store,
            metrics,
            config,
            pool,
        })
    }

    /// Opens the configured store directory.
    pub fn open(config: EngineConfig) -> Result<Self> {
        let dir = config
            .store_dir
            .clone()
            .ok_or_else(|| Error::param("store", "no store directory configured"))?;
        Engine::new(open_store(&dir)?, config)
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn metrics(&self) -> &LinkMetrics {
        &self.metrics
    }

    fn effective(&self, o: &SearchOverrides) -> Result<(Params, usize, StartStrategy)> {
        let cfg = &self.config;
        let mut p = cfg.params.clone();
        if let Some(v) = o.seed {
            p.seed = v;
        }
        if let Some(v) = o.explore_iterations {
            p.explore_iterations = v;
        }
        if let Some(v) = o.converge_iterations {
            p.converge_iterations = v;
        }
        if let Some(v) = o.repetitions {
            p.repetitions = v;
        }
        if let Some(v) = o.discrimination {
            p.discrimination = v;
        }
        p.validate()?;
        let k = o.k.unwrap_or(cfg.k);
        if k < 1 || k > cfg.max_k {
            return Err(Error::param("k", format!("must lie in [1, {}]", cfg.max_k)));
        }
        if p.explore_iterations > cfg.max_iterations || p.converge_iterations > cfg.max_iterations {
            return Err(Error::param(
                "iterations",
                format!("at most {} per phase", cfg.max_iterations),
            ));
        }
        if p.repetitions > cfg.max_k {
            return Err(Error::param("m", format!("at most {}", cfg.max_k)));
        }
        Ok((p, k, o.strategy.unwrap_or(cfg.strategy)))
    }

    /// Runs the full pipeline: relevance, starting points, one Best Trail
    /// run per scoring function, post-processing and merging.
    pub fn search(&self, text: &str, overrides: &SearchOverrides) -> Result<SearchOutcome> {
        let (params, k, strategy) = self.effective(overrides)?;
        let query = Query::parse(text)?;
        let relevance = self.store.index.score(&query);
        let site = &self.store.site;
        let starts = select_starting_points(&relevance, &self.metrics, strategy, k)?;
        if starts.is_empty() {
            return Ok(SearchOutcome {
                query,
                relevance,
                starts,
                trails: Vec::new(),
                forest: TrailForest::default(),
            });
        }
        let ctx = SearchContext {
            graph: &site.graph,
            relevance: &relevance,
            classes: &site.classes,
        };
        let functions = &self.config.functions;
        let found = self.pool.install(|| -> Result<Vec<Trail>> {
            let mut all = Vec::new();
            for &f in functions {
                all.extend(run_best_trail(&starts, &params, &ctx, f)?);
            }
            Ok(all)
        })?;
        let mut trails = process_trails(found, functions, &ctx, ScoreParams::from(&params));
        trails.truncate(self.config.max_trails);
        let forest = merge_forest(&trails, &relevance);
        Ok(SearchOutcome {
            query,
            relevance,
            starts,
            trails,
            forest,
        })
    }

    pub fn page_view(&self, id: NodeId, outcome: &SearchOutcome) -> PageView {
        let (rel, query) = (&outcome.relevance, &outcome.query);
        let doc = self.store.site.docs.get(id).expect("trail node has a document");
        PageView {
            id,
            url: doc.url.clone(),
            title: doc.title.clone(),
            score: rel.mu(id),
            terms: query.names(rel.matched(id)),
        }
    }

    fn forest_view(&self, node: &ForestNode, outcome: &SearchOutcome) -> ForestNodeView {
        ForestNodeView {
            page: self.page_view(node.node, outcome),
            best_rank: node.best_rank,
            ends: node.ends.clone(),
            children: node.children.iter().map(|c| self.forest_view(c, outcome)).collect(),
        }
    }

    /// Renders an outcome; `elapsed_ms` is left at 0.
    pub fn render(&self, text: &str, outcome: &SearchOutcome) -> SearchResponse {
        let flat_trails = outcome
            .trails
            .iter()
            .enumerate()
            .map(|(rank, t)| TrailView {
                rank,
                found_by: t.found_by,
                scores: TrailScoresView {
                    sum_distinct: t.scores[ScoringFunction::SumDistinct],
                    discounted: t.scores[ScoringFunction::Discounted],
                    weighted: t.scores[ScoringFunction::Weighted],
                },
                terms: outcome.query.names(t.terms),
                nodes: t.nodes.iter().map(|&n| self.page_view(n, outcome)).collect(),
            })
            .collect();
        SearchResponse {
            query: text.to_string(),
            elapsed_ms: 0,
            forest: outcome.forest.roots.iter().map(|r| self.forest_view(r, outcome)).collect(),
            flat_trails,
        }
    }

    /// Search and render, timing the whole request.
    pub fn handle_search(&self, text: &str, overrides: &SearchOverrides) -> Result<SearchResponse> {
        let start = Instant::now();
        let outcome = self.search(text, overrides)?;
        let mut response = self.render(text, &outcome);
        response.elapsed_ms = start.elapsed().as_millis() as u64;
        Ok(response)
    }

    /// Metadata of one page; `None` for IDs outside the store.
    pub fn handle_page(&self, id: u32) -> Option<PageInfo> {
        let graph = &self.store.site.graph;
        let id = NodeId(id);
        if !graph.contains(id) {
            return None;
        }
        let doc = self.store.site.docs.get(id)?;
        let link = |n: &NodeId| PageLink {
            id: *n,
            url: graph.url_of(*n).unwrap_or_default().to_string(),
        };
        Some(PageInfo {
            id,
            url: doc.url.clone(),
            title: doc.title.clone(),
            outlinks: graph.successors(id).iter().map(link).collect(),
            inlinks: graph.predecessors(id).iter().map(link).collect(),
            pg: self.metrics.potential_gain.get(id),
        })
    }
}
