//! Potential gain, hub scores and starting-point selection.
//!
//! Potential gain rewards pages from which many walks depart. For each depth
//! `d` the walk counts `t_d(n) = sum_{(n,m) in E} t_{d-1}(m)` (with `t_0 = 1`)
//! are turned into shares of all walks of that depth, discounted by `f(d)`
//! and summed up to `dmax`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_store::{NodeId, WebGraph};
use crate::index::RelevanceVector;

/// Depth discounting function `f(d)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Discount {
    /// `f(d) = 1 / d`
    #[default]
    Reciprocal,
    /// `f(d) = r^(d-1)`
    Geometric(f64),
    /// `f(d) = 1`
    Constant,
}

impl Discount {
    pub fn weight(self, depth: usize) -> f64 {
        match self {
            Discount::Reciprocal => 1.0 / depth as f64,
            Discount::Geometric(r) => r.powi(depth as i32 - 1),
            Discount::Constant => 1.0,
        }
    }
}

/// Per-depth walk shares `t_d(n) / sum_m t_d(m)` for `d = 1, 2, ...`.
///
/// Counts are rescaled by their total after every step, so they never
/// overflow; shares are unaffected by the rescaling. A depth with no walks
/// yields all zeros.
pub struct WalkFractions<'g> {
    graph: &'g WebGraph,
    counts: Vec<f64>,
    next: Vec<f64>,
}

impl<'g> WalkFractions<'g> {
    pub fn new(graph: &'g WebGraph) -> Self {
        let n = graph.node_count();
        WalkFractions {
            graph,
            counts: vec![1.0; n],
            next: vec![0.0; n],
        }
    }

    /// Advances one depth and returns the shares for it.
    pub fn step(&mut self) -> &[f64] {
        let mut total = 0.0;
        for id in self.graph.node_ids() {
            let sum: f64 = self
                .graph
                .successors(id)
                .iter()
                .map(|m| self.counts[m.index()])
                .sum();
            self.next[id.index()] = sum;
            total += sum;
        }
        if total > 0.0 {
            for v in &mut self.next {
                *v /= total;
            }
        }
        std::mem::swap(&mut self.counts, &mut self.next);
        &self.counts
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialGainVector {
    pub pg: Vec<f64>,
    pub dmax: usize,
    pub discount: Discount,
}

impl PotentialGainVector {
    #[inline]
    pub fn get(&self, id: NodeId) -> f64 {
        self.pg[id.index()]
    }
}

/// Potential gain of every node, in `O(dmax * |E|)` time.
pub fn compute_potential_gain(
    graph: &WebGraph,
    dmax: usize,
    discount: Discount,
) -> Result<PotentialGainVector> {
    if dmax < 1 {
        return Err(Error::param("dmax", "must be at least 1"));
    }
    let mut pg = vec![0.0; graph.node_count()];
    let mut walks = WalkFractions::new(graph);
    for depth in 1..=dmax {
        let f = discount.weight(depth);
        for (acc, share) in pg.iter_mut().zip(walks.step()) {
            *acc += f * share;
        }
    }
    Ok(PotentialGainVector { pg, dmax, discount })
}

/// One geometric bucket `[lower, upper)` of positive values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bucket {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Histogram of the positive values over geometric buckets of ratio
/// `bucket_ratio`, starting at the smallest positive value. Only nonempty
/// buckets are returned.
pub fn bucket_distribution(values: &[f64], bucket_ratio: f64) -> Result<Vec<Bucket>> {
    if !(bucket_ratio > 1.0) || !bucket_ratio.is_finite() {
        return Err(Error::param("bucket_ratio", "must be greater than 1"));
    }
    let positive: Vec<f64> = values.iter().copied().filter(|v| *v > 0.0).collect();
    let Some(min) = positive.iter().copied().reduce(f64::min) else {
        return Ok(Vec::new());
    };
    let log_ratio = bucket_ratio.ln();
    let mut counts: Vec<usize> = Vec::new();
    for v in positive {
        // Relative tolerance keeps values that sit exactly on a boundary in
        // the upper bucket despite rounding in the logarithm.
        let k = ((v / min).ln() / log_ratio + 1e-9).floor().max(0.0) as usize;
        if counts.len() <= k {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(k, count)| Bucket {
            index: k,
            lower: min * bucket_ratio.powi(k as i32),
            upper: min * bucket_ratio.powi(k as i32 + 1),
            count,
        })
        .collect())
}

/// Least-squares fit of `ln count` against `ln` bucket midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn fit_power_law(buckets: &[Bucket]) -> Option<PowerLawFit> {
    if buckets.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = buckets
        .iter()
        .map(|b| (((b.lower * b.upper).sqrt()).ln(), (b.count as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(PowerLawFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Hub scores by mutual reinforcement: authorities sum the hub scores of
/// their in-neighbours, hubs sum the authority scores of their
/// out-neighbours, both 2-norm normalized every round.
pub fn hits_hub_scores(graph: &WebGraph, iterations: usize) -> Result<Vec<f64>> {
    if iterations < 1 {
        return Err(Error::param("hub_iterations", "must be at least 1"));
    }
    let n = graph.node_count();
    let mut hub = vec![1.0; n];
    let mut auth = vec![0.0; n];
    for _ in 0..iterations {
        for id in graph.node_ids() {
            auth[id.index()] = graph.predecessors(id).iter().map(|s| hub[s.index()]).sum();
        }
        normalize(&mut auth);
        for id in graph.node_ids() {
            hub[id.index()] = graph.successors(id).iter().map(|d| auth[d.index()]).sum();
        }
        normalize(&mut hub);
    }
    Ok(hub)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}

/// How candidate starting points are ranked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartStrategy {
    /// `mu(p)`
    Mu,
    /// `mu(p) * pg(p)`
    #[default]
    MuPg,
    /// `mu(p) * ln(1 + pg(p))`
    MuLogPg,
    /// `mu(p) * ln(1 + out(p))`
    MuLogOut,
    /// `mu(p) * hub(p)`
    Hub,
}

impl StartStrategy {
    pub const ALL: [StartStrategy; 5] = [
        StartStrategy::Mu,
        StartStrategy::MuPg,
        StartStrategy::MuLogPg,
        StartStrategy::MuLogOut,
        StartStrategy::Hub,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StartStrategy::Mu => "mu",
            StartStrategy::MuPg => "mu_pg",
            StartStrategy::MuLogPg => "mu_log_pg",
            StartStrategy::MuLogOut => "mu_log_out",
            StartStrategy::Hub => "hub",
        }
    }
}

impl fmt::Display for StartStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StartStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        StartStrategy::ALL
            .into_iter()
            .find(|st| st.name() == s.trim())
            .ok_or_else(|| format!("unknown strategy {s:?}"))
    }
}

/// Query-independent per-page link metrics used to rank starting points.
#[derive(Debug, Clone)]
pub struct LinkMetrics {
    pub potential_gain: PotentialGainVector,
    pub hub: Vec<f64>,
    pub out_degree: Vec<usize>,
}

impl LinkMetrics {
    pub fn compute(graph: &WebGraph, dmax: usize, hub_iterations: usize) -> Result<Self> {
        Ok(LinkMetrics {
            potential_gain: compute_potential_gain(graph, dmax, Discount::Reciprocal)?,
            hub: hits_hub_scores(graph, hub_iterations)?,
            out_degree: graph.node_ids().map(|id| graph.out_degree(id)).collect(),
        })
    }

    pub fn start_score(&self, strategy: StartStrategy, mu: f64, id: NodeId) -> f64 {
        let i = id.index();
        match strategy {
            StartStrategy::Mu => mu,
            StartStrategy::MuPg => mu * self.potential_gain.pg[i],
            StartStrategy::MuLogPg => mu * self.potential_gain.pg[i].ln_1p(),
            StartStrategy::MuLogOut => mu * (self.out_degree[i] as f64).ln_1p(),
            StartStrategy::Hub => mu * self.hub[i],
        }
    }
}

/// Top `k` pages with positive relevance, by strategy score descending and
/// then ID ascending.
pub fn select_starting_points(
    relevance: &RelevanceVector,
    metrics: &LinkMetrics,
    strategy: StartStrategy,
    k: usize,
) -> Result<Vec<NodeId>> {
    if k < 1 {
        return Err(Error::param("k", "must be at least 1"));
    }
    let mut scored: Vec<(f64, NodeId)> = relevance
        .matching()
        .map(|id| (metrics.start_score(strategy, relevance.mu(id), id), id))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Ok(scored.into_iter().take(k).map(|(_, id)| id).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pg(graph: &WebGraph, dmax: usize) -> Vec<f64> {
        compute_potential_gain(graph, dmax, Discount::Reciprocal).unwrap().pg
    }

    #[test]
    fn two_cycle() {
        let g = WebGraph::from_edges(2, &[(1, 2), (2, 1)]).unwrap();
        let v = pg(&g, 2);
        assert!((v[0] - 0.75).abs() < 1e-12);
        assert!((v[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn chain() {
        let g = WebGraph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let v = pg(&g, 2);
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!((v[1] - 0.5).abs() < 1e-12);
        assert_eq!(v[2], 0.0);
    }

    #[test]
    fn sink_has_zero_gain() {
        let g = WebGraph::from_edges(3, &[(1, 3), (2, 3)]).unwrap();
        for dmax in 1..6 {
            assert_eq!(pg(&g, dmax)[2], 0.0);
        }
    }

    #[test]
    fn dmax_zero_is_rejected() {
        let g = WebGraph::from_edges(1, &[]).unwrap();
        assert!(compute_potential_gain(&g, 0, Discount::Reciprocal).is_err());
    }

    #[test]
    fn no_overflow_on_dense_deep_graph() {
        let edges: Vec<(u32, u32)> = (1..=30)
            .flat_map(|s| (1..=30).map(move |d| (s, d)))
            .collect();
        let g = WebGraph::from_edges(30, &edges).unwrap();
        let v = pg(&g, 400);
        assert!(v.iter().all(|x| x.is_finite()));
        let harmonic: f64 = (1..=400).map(|d| 1.0 / d as f64).sum();
        assert!((v.iter().sum::<f64>() - harmonic).abs() < 1e-9);
    }

    #[test]
    fn buckets() {
        assert!(bucket_distribution(&[], 2.0).unwrap().is_empty());
        assert!(bucket_distribution(&[0.0, 0.0], 2.0).unwrap().is_empty());
        let same = bucket_distribution(&[0.3; 5], 2.0).unwrap();
        assert_eq!(same.len(), 1);
        assert_eq!(same[0].count, 5);
        let b = bucket_distribution(&[1.0, 1.5, 2.0, 4.0, 7.9, 0.0], 2.0).unwrap();
        let counts: Vec<(usize, usize)> = b.iter().map(|b| (b.index, b.count)).collect();
        assert_eq!(counts, vec![(0, 2), (1, 1), (2, 2)]);
        assert!(bucket_distribution(&[1.0], 1.0).is_err());
    }

    #[test]
    fn power_law_fit_recovers_slope() {
        let buckets: Vec<Bucket> = (0..8)
            .map(|k| {
                let lower = 2f64.powi(k);
                Bucket {
                    index: k as usize,
                    lower,
                    upper: lower * 2.0,
                    count: (1e6 * (lower * 2f64.sqrt()).powf(-1.5)).round() as usize,
                }
            })
            .collect();
        let fit = fit_power_law(&buckets).unwrap();
        assert!((fit.slope + 1.5).abs() < 0.01);
        assert!(fit.r_squared > 0.999);
    }

    #[test]
    fn hub_single_node() {
        let g = WebGraph::from_edges(1, &[]).unwrap();
        assert_eq!(hits_hub_scores(&g, 5).unwrap(), vec![0.0]);
    }

    #[test]
    fn hub_complete_bipartite_symmetry() {
        let mut edges = Vec::new();
        for h in 1..=3 {
            for a in 4..=6 {
                edges.push((h, a));
            }
        }
        let g = WebGraph::from_edges(6, &edges).unwrap();
        let hub = hits_hub_scores(&g, 30).unwrap();
        for h in 1..3 {
            assert!((hub[h] - hub[0]).abs() < 1e-12);
        }
        assert!(hub[3..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn hub_fixed_point() {
        let g = WebGraph::from_edges(
            6,
            &[(1, 2), (1, 3), (2, 3), (3, 4), (4, 1), (5, 1), (5, 3), (5, 4), (6, 5), (2, 6)],
        )
        .unwrap();
        let settled = hits_hub_scores(&g, 500).unwrap();
        let again = hits_hub_scores(&g, 501).unwrap();
        for (a, b) in settled.iter().zip(&again) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    fn metrics(graph: &WebGraph) -> LinkMetrics {
        LinkMetrics::compute(graph, 8, 30).unwrap()
    }

    #[test]
    fn single_match_wins_under_every_strategy() {
        let g = WebGraph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let rel = RelevanceVector::from_scores(vec![0.0, 0.4, 0.0]);
        let m = metrics(&g);
        for st in StartStrategy::ALL {
            assert_eq!(select_starting_points(&rel, &m, st, 5).unwrap(), vec![NodeId(2)]);
        }
    }

    #[test]
    fn mu_pg_prefers_positive_gain() {
        // Node 1 is a sink, node 2 links out: equal mu, pg 0 vs positive.
        let g = WebGraph::from_edges(3, &[(2, 3)]).unwrap();
        let rel = RelevanceVector::from_scores(vec![1.0, 1.0, 0.0]);
        let m = metrics(&g);
        assert_eq!(
            select_starting_points(&rel, &m, StartStrategy::MuPg, 2).unwrap(),
            vec![NodeId(2), NodeId(1)]
        );
        assert_eq!(
            select_starting_points(&rel, &m, StartStrategy::Mu, 2).unwrap(),
            vec![NodeId(1), NodeId(2)]
        );
        assert_eq!(m.start_score(StartStrategy::MuLogPg, 1.0, NodeId(1)), 0.0);
    }

    #[test]
    fn k_truncates_and_zero_k_errors() {
        let g = WebGraph::from_edges(4, &[]).unwrap();
        let rel = RelevanceVector::from_scores(vec![0.1, 0.4, 0.2, 0.3]);
        let m = metrics(&g);
        assert_eq!(
            select_starting_points(&rel, &m, StartStrategy::Mu, 2).unwrap(),
            vec![NodeId(2), NodeId(4)]
        );
        assert!(select_starting_points(&rel, &m, StartStrategy::Mu, 0).is_err());
    }

    #[test]
    fn strategy_names_round_trip() {
        for st in StartStrategy::ALL {
            assert_eq!(st.name().parse::<StartStrategy>().unwrap(), st);
        }
        assert!("pagerank".parse::<StartStrategy>().is_err());
    }
}
