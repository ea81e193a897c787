//! Parameter sweeps over synthetic or fixture sites, reported as CSV.

use std::io::Write;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use rayon::prelude::*;
use serde::Serialize;

use crate::best_trail::{run_best_trail, Params, ScoringFunction, SearchContext};
use crate::config::{parse_key_values, parse_list_value, parse_value, Entry};
use crate::error::{Error, Result};
use crate::graph_store::{load_snapshot, site_from_str, NodeId, Site, SnapshotRecord};
use crate::index::{build_index, InvertedIndex, Query, RelevanceVector};
use crate::potential_gain::{select_starting_points, LinkMetrics, StartStrategy};

/// Shape of a generated site.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub nodes: usize,
    /// Attachment weight is `(degree + 1)^exponent`.
    pub exponent: f64,
    /// Links from each new page to existing pages.
    pub out_links: usize,
    /// Links from existing pages to each new page.
    pub back_links: usize,
    /// Probability that a link stays within the page's topic.
    pub locality: f64,
    /// Share of navigation pages: mostly generic text, attachment weight
    /// scaled by `hub_fitness`.
    pub hub_fraction: f64,
    pub hub_fitness: f64,
    /// Probability that a generated link gets a link back.
    pub reciprocity: f64,
    /// Share of content pages without outlinks.
    pub sink_fraction: f64,
    pub topics: usize,
    pub words_per_topic: usize,
    pub doc_len: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            nodes: 2000,
            exponent: 1.0,
            out_links: 3,
            back_links: 2,
            locality: 0.7,
            hub_fraction: 0.1,
            hub_fitness: 5.0,
            reciprocity: 0.0,
            sink_fraction: 0.2,
            topics: 20,
            words_per_topic: 40,
            doc_len: 40,
            seed: 1,
        }
    }
}

/// Prefix sums over non-negative weights with point updates.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0.0; n + 1] }
    }

    fn add(&mut self, i: usize, delta: f64) {
        let mut i = i + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn prefix(&self, i: usize) -> f64 {
        let (mut i, mut s) = (i, 0.0);
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    /// Smallest index whose inclusive prefix sum exceeds `u`.
    fn find(&self, mut u: f64, len: usize) -> usize {
        let mut pos = 0;
        let mut step = self.tree.len().next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= u {
                u -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos.min(len - 1)
    }
}

/// Attachment weights over all pages and per topic.
struct Attachment {
    all: Fenwick,
    by_topic: Vec<Fenwick>,
    degree: Vec<usize>,
    fitness: Vec<f64>,
    exponent: f64,
}

impl Attachment {
    fn new(topics: usize, fitness: Vec<f64>, exponent: f64) -> Self {
        let n = fitness.len();
        Attachment {
            all: Fenwick::new(n),
            by_topic: (0..topics).map(|_| Fenwick::new(n)).collect(),
            degree: vec![0; n],
            fitness,
            exponent,
        }
    }

    fn weight(&self, i: usize, degree: usize) -> f64 {
        self.fitness[i] * ((degree + 1) as f64).powf(self.exponent)
    }

    /// Registers page `i` with degree 0, or raises its degree by one.
    fn bump(&mut self, i: usize, topic: usize, fresh: bool) {
        let delta = if fresh {
            self.weight(i, 0)
        } else {
            let d = self.degree[i];
            self.degree[i] += 1;
            self.weight(i, d + 1) - self.weight(i, d)
        };
        self.all.add(i, delta);
        self.by_topic[topic].add(i, delta);
    }

    /// Up to `count` distinct pages below `len`, each drawn within `topic`
    /// with probability `locality` and from all pages otherwise.
    fn draw(&self, len: usize, topic: usize, locality: f64, count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let local_total = self.by_topic[topic].prefix(len);
        let mut out: Vec<usize> = Vec::with_capacity(count);
        for _ in 0..20 * count {
            if out.len() == count.min(len) {
                break;
            }
            let tree = if local_total > 0.0 && rng.random_bool(locality) {
                &self.by_topic[topic]
            } else {
                &self.all
            };
            let i = tree.find(rng.random::<f64>() * tree.prefix(len), len);
            if !out.contains(&i) {
                out.push(i);
            }
        }
        out
    }
}

/// Directed preferential-attachment site with topic-clustered documents,
/// as snapshot JSONL bytes. Identical specs give identical bytes.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<Vec<u8>> {
    if spec.nodes < 2 {
        return Err(Error::param("nodes", "must be at least 2"));
    }
    if !(spec.exponent.is_finite() && spec.exponent >= 0.0) {
        return Err(Error::param("exponent", "must be a finite value >= 0"));
    }
    let unit = [spec.locality, spec.reciprocity, spec.sink_fraction];
    if !unit.iter().all(|p| (0.0..=1.0).contains(p)) {
        return Err(Error::param("locality", "locality, reciprocity and sink_fraction must lie in [0, 1]"));
    }
    if !(0.0..=1.0).contains(&spec.hub_fraction) || !(spec.hub_fitness > 0.0 && spec.hub_fitness.is_finite()) {
        return Err(Error::param("hub_fraction", "hub_fraction must lie in [0, 1] and hub_fitness be positive"));
    }
    if spec.topics < 1 || spec.words_per_topic < 1 || spec.out_links < 1 {
        return Err(Error::param("topics", "topics, words_per_topic and out_links must be positive"));
    }
    let n = spec.nodes;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let topic: Vec<usize> = (0..n).map(|_| rng.random_range(0..spec.topics)).collect();
    let hub: Vec<bool> = (0..n).map(|_| rng.random_bool(spec.hub_fraction)).collect();
    // Page 0 always links out so that the site has a navigable root.
    let sink: Vec<bool> = (0..n).map(|i| i > 0 && !hub[i] && rng.random_bool(spec.sink_fraction)).collect();
    let fitness: Vec<f64> = hub.iter().map(|&h| if h { spec.hub_fitness } else { 1.0 }).collect();
    let out_fitness: Vec<f64> = fitness.iter().zip(&sink).map(|(&f, &s)| if s { 0.0 } else { f }).collect();
    let mut incoming = Attachment::new(spec.topics, fitness, spec.exponent);
    let mut outgoing = Attachment::new(spec.topics, out_fitness, spec.exponent);
    let mut links: Vec<Vec<usize>> = vec![Vec::new(); n];

    for i in 0..n {
        let t = topic[i];
        let wanted = if sink[i] { 0 } else { spec.out_links };
        let targets = incoming.draw(i, t, spec.locality, wanted, &mut rng);
        let sources = outgoing.draw(i, t, spec.locality, spec.back_links, &mut rng);
        incoming.bump(i, t, true);
        outgoing.bump(i, t, true);
        let mut pairs: Vec<(usize, usize)> =
            targets.into_iter().map(|d| (i, d)).chain(sources.into_iter().map(|s| (s, i))).collect();
        for k in 0..pairs.len() {
            if !sink[pairs[k].1] && rng.random_bool(spec.reciprocity) {
                pairs.push((pairs[k].1, pairs[k].0));
            }
        }
        for (src, dst) in pairs {
            if !links[src].contains(&dst) {
                links[src].push(dst);
                incoming.bump(dst, topic[dst], false);
                outgoing.bump(src, topic[src], false);
            }
        }
    }

    let topic_words = Zipf::new(spec.words_per_topic as f64, 1.1).map_err(|e| Error::param("words_per_topic", e.to_string()))?;
    let common_words = Zipf::new(200.0, 1.0).map_err(|e| Error::param("nodes", e.to_string()))?;
    let url = |i: usize| format!("http://synthetic.test/p{i}");
    let mut out = Vec::new();
    for i in 0..n {
        let mut words = Vec::with_capacity(spec.doc_len);
        for _ in 0..spec.doc_len {
            let w = if rng.random_bool(if hub[i] { 0.05 } else { 0.4 }) {
                format!("t{}w{}", topic[i], topic_words.sample(&mut rng) as usize - 1)
            } else {
                format!("c{}", common_words.sample(&mut rng) as usize - 1)
            };
            words.push(w);
        }
        let record = SnapshotRecord {
            url: url(i),
            title: format!("p{i}"),
            content: words.join(" "),
            links: links[i].iter().map(|&d| url(d)).collect(),
        };
        serde_json::to_writer(&mut out, &record).expect("record serializes");
        out.push(b'\n');
    }
    Ok(out)
}

/// Where a sweep gets its site from.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    Synthetic(SyntheticSpec),
    Snapshot(PathBuf),
}

/// Parameter grid of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub source: GraphSource,
    /// Queries to run; empty picks `query_count` single-term queries.
    pub queries: Vec<String>,
    pub query_count: usize,
    pub explore: Vec<usize>,
    /// Ignored when `ratio_total` is set.
    pub converge: Vec<usize>,
    /// Sweep `explore` with `converge = ratio_total - explore`.
    pub ratio_total: Option<usize>,
    pub repetitions: Vec<usize>,
    pub k: Vec<usize>,
    pub strategies: Vec<StartStrategy>,
    pub functions: Vec<ScoringFunction>,
    /// Runs per grid point, seeded `seed_base..seed_base + seeds`.
    pub seeds: usize,
    pub seed_base: u64,
    /// Trails averaged per run, best first; 0 averages all.
    pub top: usize,
    pub base: Params,
    pub dmax: usize,
    pub hub_iterations: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            source: GraphSource::Synthetic(SyntheticSpec::default()),
            queries: Vec::new(),
            query_count: 10,
            explore: vec![50],
            converge: vec![50],
            ratio_total: None,
            repetitions: vec![1],
            k: vec![10],
            strategies: vec![StartStrategy::MuPg],
            functions: vec![ScoringFunction::SumDistinct, ScoringFunction::Weighted],
            seeds: 30,
            seed_base: 0,
            top: 1,
            base: Params::default(),
            dmax: 8,
            hub_iterations: 30,
        }
    }
}

impl SweepSpec {
    /// Parses the flat key-value format. Keys not given keep their defaults.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut spec = SweepSpec::default();
        let mut synthetic = SyntheticSpec::default();
        let mut snapshot = None;
        for e in parse_key_values(text, origin)? {
            spec.set(&e, origin, &mut synthetic, &mut snapshot)?;
        }
        spec.source = match snapshot {
            Some(path) => GraphSource::Snapshot(path),
            None => GraphSource::Synthetic(synthetic),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn set(
        &mut self,
        e: &Entry,
        origin: &str,
        syn: &mut SyntheticSpec,
        snapshot: &mut Option<PathBuf>,
    ) -> Result<()> {
        match e.key.as_str() {
            "source" => {
                *snapshot = match e.value.as_str() {
                    "synthetic" => None,
                    path => Some(PathBuf::from(path)),
                }
            }
            "nodes" => syn.nodes = parse_value(e, origin)?,
            "exponent" => syn.exponent = parse_value(e, origin)?,
            "out_links" => syn.out_links = parse_value(e, origin)?,
            "back_links" => syn.back_links = parse_value(e, origin)?,
            "locality" => syn.locality = parse_value(e, origin)?,
            "hub_fraction" => syn.hub_fraction = parse_value(e, origin)?,
            "hub_fitness" => syn.hub_fitness = parse_value(e, origin)?,
            "reciprocity" => syn.reciprocity = parse_value(e, origin)?,
            "sink_fraction" => syn.sink_fraction = parse_value(e, origin)?,
            "topics" => syn.topics = parse_value(e, origin)?,
            "words_per_topic" => syn.words_per_topic = parse_value(e, origin)?,
            "doc_len" => syn.doc_len = parse_value(e, origin)?,
            "graph_seed" => syn.seed = parse_value(e, origin)?,
            "queries" => self.queries = parse_list_value(e, origin)?,
            "query_count" => self.query_count = parse_value(e, origin)?,
            "iexplore" => self.explore = parse_list_value(e, origin)?,
            "iconverge" => self.converge = parse_list_value(e, origin)?,
            "ratio_total" => self.ratio_total = Some(parse_value(e, origin)?),
            "m" => self.repetitions = parse_list_value(e, origin)?,
            "k" => self.k = parse_list_value(e, origin)?,
            "strategy" => self.strategies = parse_list_value(e, origin)?,
            "functions" => self.functions = parse_list_value(e, origin)?,
            "seeds" => self.seeds = parse_value(e, origin)?,
            "seed_base" => self.seed_base = parse_value(e, origin)?,
            "top" => self.top = parse_value(e, origin)?,
            "df" => self.base.discrimination = parse_value(e, origin)?,
            "gamma" => self.base.gamma = parse_value(e, origin)?,
            "delta" => self.base.delta = parse_value(e, origin)?,
            "c" => self.base.sum_distinct_constant = parse_value(e, origin)?,
            "depth_cap" => self.base.depth_cap = parse_value(e, origin)?,
            "dmax" => self.dmax = parse_value(e, origin)?,
            "hub_iterations" => self.hub_iterations = parse_value(e, origin)?,
            other => {
                return Err(Error::Config {
                    path: origin.to_string(),
                    message: format!("line {}: unknown key {other}", e.line),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let lists = [
            ("iexplore", self.explore.is_empty()),
            ("iconverge", self.converge.is_empty() && self.ratio_total.is_none()),
            ("m", self.repetitions.is_empty()),
            ("k", self.k.is_empty()),
            ("strategy", self.strategies.is_empty()),
            ("functions", self.functions.is_empty()),
        ];
        for (name, empty) in lists {
            if empty {
                return Err(Error::param(name, "grid list is empty"));
            }
        }
        if self.seeds < 1 {
            return Err(Error::param("seeds", "must be at least 1"));
        }
        if self.queries.is_empty() && self.query_count < 1 {
            return Err(Error::param("query_count", "must be at least 1"));
        }
        if let Some(total) = self.ratio_total {
            if self.explore.iter().any(|&e| e > total) {
                return Err(Error::param("ratio_total", "every iexplore must be <= ratio_total"));
            }
        }
        if self.repetitions.contains(&0) || self.k.contains(&0) {
            return Err(Error::param("k", "m and k values must be positive"));
        }
        let mut p = self.base.clone();
        p.repetitions = 1;
        p.validate()
    }

    /// Grid points in output order.
    pub fn grid(&self) -> Vec<GridPoint> {
        let converge: Vec<Option<usize>> = match self.ratio_total {
            Some(_) => vec![None],
            None => self.converge.iter().copied().map(Some).collect(),
        };
        let mut out = Vec::new();
        for &strategy in &self.strategies {
            for &k in &self.k {
                for &m in &self.repetitions {
                    for &c in &converge {
                        for &explore in &self.explore {
                            let converge = c.unwrap_or_else(|| self.ratio_total.unwrap() - explore);
                            out.push(GridPoint { explore, converge, repetitions: m, k, strategy });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint {
    pub explore: usize,
    pub converge: usize,
    pub repetitions: usize,
    pub k: usize,
    pub strategy: StartStrategy,
}

/// Mean and sample standard deviation of one measure over the seeds.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Summary::default();
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Summary { mean, std_dev: var.sqrt() }
    }
}

/// One CSV row: the trails of one grid point and query, found with
/// `search`, scored under every scoring function and averaged over the
/// seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: usize,
    pub iexplore: usize,
    pub iconverge: usize,
    pub m: usize,
    pub k: usize,
    pub strategy: StartStrategy,
    pub query: String,
    pub search: ScoringFunction,
    pub runs: usize,
    pub sum_distinct: f64,
    pub sum_distinct_std: f64,
    pub discounted: f64,
    pub discounted_std: f64,
    pub weighted: f64,
    pub weighted_std: f64,
}

impl SweepRow {
    pub fn mean(&self, f: ScoringFunction) -> f64 {
        match f {
            ScoringFunction::SumDistinct => self.sum_distinct,
            ScoringFunction::Discounted => self.discounted,
            ScoringFunction::Weighted => self.weighted,
        }
    }
}

/// A site with its derived data, shared by all grid points.
pub struct Workload {
    pub site: Site,
    pub index: InvertedIndex,
    pub metrics: LinkMetrics,
    pub queries: Vec<String>,
}

/// Terms found in between 0.5% and 5% of the pages (at least 2), picked
/// deterministically.
pub fn pick_queries(index: &InvertedIndex, count: usize, seed: u64) -> Vec<String> {
    let n = index.doc_count();
    let lo = (n / 200).max(2);
    let hi = (n / 20).max(lo);
    let mut candidates: Vec<&String> = index
        .terms()
        .filter(|t| (lo..=hi).contains(&index.doc_freq(t)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count && !candidates.is_empty() {
        let i = rng.random_range(0..candidates.len());
        out.push(candidates.swap_remove(i).clone());
    }
    out
}

impl Workload {
    pub fn build(spec: &SweepSpec) -> Result<Self> {
        let (site, graph_seed) = match &spec.source {
            GraphSource::Synthetic(s) => {
                let bytes = generate_synthetic(s)?;
                let text = String::from_utf8(bytes).expect("generator writes UTF-8");
                (site_from_str(&text)?, s.seed)
            }
            GraphSource::Snapshot(path) => (load_snapshot(path)?, 0),
        };
        let index = build_index(&site.docs);
        let metrics = LinkMetrics::compute(&site.graph, spec.dmax, spec.hub_iterations)?;
        let queries = if spec.queries.is_empty() {
            pick_queries(&index, spec.query_count, graph_seed)
        } else {
            spec.queries.clone()
        };
        if queries.is_empty() {
            return Err(Error::param("queries", "no usable queries"));
        }
        Ok(Workload { site, index, metrics, queries })
    }

    fn relevance(&self, query: &str) -> Result<RelevanceVector> {
        Ok(self.index.score(&Query::parse(query)?))
    }

    /// Trail scores of one run under every scoring function, averaged
    /// over the `top` best trails by the score of `f`.
    fn run_once(
        &self,
        rel: &RelevanceVector,
        starts: &[NodeId],
        params: &Params,
        f: ScoringFunction,
        top: usize,
    ) -> Result<Option<[f64; 3]>> {
        if starts.is_empty() {
            return Ok(None);
        }
        let ctx = SearchContext {
            graph: &self.site.graph,
            relevance: rel,
            classes: &self.site.classes,
        };
        let mut trails = run_best_trail(starts, params, &ctx, f)?;
        trails.sort_by(|a, b| b.scores[f].total_cmp(&a.scores[f]));
        let n = if top == 0 { trails.len() } else { top.min(trails.len()) };
        let mut out = [0.0; 3];
        for (slot, g) in out.iter_mut().zip(ScoringFunction::ALL) {
            *slot = trails[..n].iter().map(|t| t.scores[g]).sum::<f64>() / n as f64;
        }
        Ok(Some(out))
    }
}

/// Runs every grid point for every query and searching function.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let work = Workload::build(spec)?;
    run_sweep_on(spec, &work)
}

/// [`run_sweep`] over an already built workload.
pub fn run_sweep_on(spec: &SweepSpec, work: &Workload) -> Result<Vec<SweepRow>> {
    let grid = spec.grid();
    let relevance: Vec<RelevanceVector> = work
        .queries
        .iter()
        .map(|q| work.relevance(q))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize, ScoringFunction)> = (0..grid.len())
        .flat_map(|g| {
            (0..work.queries.len()).flat_map(move |q| spec.functions.iter().map(move |&f| (g, q, f)))
        })
        .collect();
    jobs.par_iter()
        .map(|&(g, q, f)| {
            let point = grid[g];
            let rel = &relevance[q];
            let starts = select_starting_points(rel, &work.metrics, point.strategy, point.k)?;
            let mut values: [Vec<f64>; 3] = Default::default();
            for s in 0..spec.seeds as u64 {
                let params = Params {
                    explore_iterations: point.explore,
                    converge_iterations: point.converge,
                    repetitions: point.repetitions,
                    seed: spec.seed_base + s,
                    ..spec.base.clone()
                };
                if let Some(run) = work.run_once(rel, &starts, &params, f, spec.top)? {
                    for (v, x) in values.iter_mut().zip(run) {
                        v.push(x);
                    }
                }
            }
            let [sd, dc, wt] = values.each_ref().map(|v| Summary::of(v));
            Ok(SweepRow {
                point: g,
                iexplore: point.explore,
                iconverge: point.converge,
                m: point.repetitions,
                k: point.k,
                strategy: point.strategy,
                query: work.queries[q].clone(),
                search: f,
                runs: values[0].len(),
                sum_distinct: sd.mean,
                sum_distinct_std: sd.std_dev,
                discounted: dc.mean,
                discounted_std: dc.std_dev,
                weighted: wt.mean,
                weighted_std: wt.std_dev,
            })
        })
        .collect()
}

/// Mean over queries of the per-query trail score means.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrategyRow {
    pub strategy: StartStrategy,
    pub search: ScoringFunction,
    pub runs: usize,
    pub sum_distinct: f64,
    pub discounted: f64,
    pub weighted: f64,
}

impl StrategyRow {
    pub fn mean(&self, f: ScoringFunction) -> f64 {
        match f {
            ScoringFunction::SumDistinct => self.sum_distinct,
            ScoringFunction::Discounted => self.discounted,
            ScoringFunction::Weighted => self.weighted,
        }
    }
}

/// Trail scores per starting-point strategy and searching function, over
/// every query and seed. Other grid lists use their first value.
pub fn compare_strategies(spec: &SweepSpec) -> Result<Vec<StrategyRow>> {
    spec.validate()?;
    let work = Workload::build(spec)?;
    compare_strategies_on(spec, &work)
}

pub fn compare_strategies_on(spec: &SweepSpec, work: &Workload) -> Result<Vec<StrategyRow>> {
    let mut narrowed = spec.clone();
    narrowed.explore.truncate(1);
    narrowed.converge.truncate(1);
    narrowed.repetitions.truncate(1);
    narrowed.k.truncate(1);
    let rows = run_sweep_on(&narrowed, work)?;
    let mut out = Vec::new();
    for &strategy in &spec.strategies {
        for &search in &spec.functions {
            let group: Vec<&SweepRow> = rows
                .iter()
                .filter(|r| r.strategy == strategy && r.search == search && r.runs > 0)
                .collect();
            let mean = |f: ScoringFunction| {
                Summary::of(&group.iter().map(|r| r.mean(f)).collect::<Vec<_>>()).mean
            };
            out.push(StrategyRow {
                strategy,
                search,
                runs: group.iter().map(|r| r.runs).sum(),
                sum_distinct: mean(ScoringFunction::SumDistinct),
                discounted: mean(ScoringFunction::Discounted),
                weighted: mean(ScoringFunction::Weighted),
            });
        }
    }
    Ok(out)
}

pub fn write_csv<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let mx = Summary::of(&rx).mean;
    let my = Summary::of(&ry).mean;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return 0.0;
    }
    cov / (vx * vy).sqrt()
}
