//! Post-processing of found trails: subsumption filtering, redundant page
//! removal, ranking and merging into a forest.

use serde::Serialize;

use crate::best_trail::{score_sum_distinct, ScoreParams, ScoringFunction, SearchContext, Trail, TrailScores};
use crate::graph_store::{ContentClasses, NodeId, WebGraph};
use crate::index::{RelevanceVector, TermSet};

/// Score used to compare trails found under different scoring functions:
/// sum distinct with `C = 1`.
pub fn reference_score(nodes: &[NodeId], relevance: &RelevanceVector, classes: &ContentClasses) -> f64 {
    score_sum_distinct(nodes, relevance, classes, 1.0)
}

fn class_set(nodes: &[NodeId], classes: &ContentClasses) -> Vec<u32> {
    let mut set: Vec<u32> = nodes.iter().map(|n| classes.class_of(*n)).collect();
    set.sort_unstable();
    set.dedup();
    set
}

fn sorted_subset(small: &[u32], large: &[u32]) -> bool {
    let mut it = large.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// True iff every page of `t2` has its content somewhere on `t1`.
pub fn subsumes(t1: &[NodeId], t2: &[NodeId], classes: &ContentClasses) -> bool {
    sorted_subset(&class_set(t2, classes), &class_set(t1, classes))
}

/// Drops every trail subsumed by another trail of the input with a strictly
/// higher reference score. Order is preserved.
pub fn filter_subsumed(trails: Vec<Trail>, ctx: &SearchContext<'_>) -> Vec<Trail> {
    let sets: Vec<Vec<u32>> = trails.iter().map(|t| class_set(&t.nodes, ctx.classes)).collect();
    let scores: Vec<f64> = trails
        .iter()
        .map(|t| reference_score(&t.nodes, ctx.relevance, ctx.classes))
        .collect();
    let keep: Vec<bool> = (0..trails.len())
        .map(|i| {
            !(0..trails.len()).any(|j| {
                j != i && scores[j] > scores[i] && sorted_subset(&sets[i], &sets[j])
            })
        })
        .collect();
    trails
        .into_iter()
        .zip(keep)
        .filter_map(|(t, k)| k.then_some(t))
        .collect()
}

/// Removes pages that add nothing: a page after the first is dropped when
/// it scores zero or repeats earlier content, and the trail stays connected
/// without it. Repeats until nothing changes.
pub fn remove_redundant_pages(
    nodes: &[NodeId],
    graph: &WebGraph,
    relevance: &RelevanceVector,
    classes: &ContentClasses,
) -> Vec<NodeId> {
    let mut trail = nodes.to_vec();
    loop {
        let mut changed = false;
        let mut i = 1;
        while i < trail.len() {
            let page = trail[i];
            let bridged = i + 1 == trail.len() || graph.has_edge(trail[i - 1], trail[i + 1]);
            let useless = relevance.mu(page) == 0.0
                || trail[..i].iter().any(|p| classes.same(*p, page));
            if bridged && useless {
                trail.remove(i);
                changed = true;
            } else {
                i += 1;
            }
        }
        if !changed {
            return trail;
        }
    }
}

/// [`remove_redundant_pages`] on a scored trail, rescoring the result.
pub fn prune_trail(trail: &Trail, ctx: &SearchContext<'_>, params: ScoreParams) -> Trail {
    let nodes = remove_redundant_pages(&trail.nodes, ctx.graph, ctx.relevance, ctx.classes);
    if nodes == trail.nodes {
        return trail.clone();
    }
    Trail::from_nodes(nodes, ctx, params, trail.found_by)
}

/// `sum_f f(a) / (f(a) + f(b)) > sum_f f(b) / (f(a) + f(b))`, with a
/// zero denominator counting one half on each side.
pub fn pairwise_better(a: &TrailScores, b: &TrailScores, functions: &[ScoringFunction]) -> bool {
    let (mut left, mut right) = (0.0, 0.0);
    for &f in functions {
        let (x, y) = (a[f], b[f]);
        let sum = x + y;
        if sum == 0.0 {
            left += 0.5;
            right += 0.5;
        } else {
            left += x / sum;
            right += y / sum;
        }
    }
    left > right
}

/// Ranks trails: more matched query terms first; within equal term counts
/// by pairwise wins over the other trails of the group, then reference
/// score, then node sequence.
pub fn sort_trails(trails: Vec<Trail>, functions: &[ScoringFunction], ctx: &SearchContext<'_>) -> Vec<Trail> {
    let n = trails.len();
    let mut wins = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if i != j
                && trails[i].terms.len() == trails[j].terms.len()
                && pairwise_better(&trails[i].scores, &trails[j].scores, functions)
            {
                wins[i] += 1;
            }
        }
    }
    let reference: Vec<f64> = trails
        .iter()
        .map(|t| reference_score(&t.nodes, ctx.relevance, ctx.classes))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (&trails[i], &trails[j]);
        b.terms
            .len()
            .cmp(&a.terms.len())
            .then(wins[j].cmp(&wins[i]))
            .then(reference[j].total_cmp(&reference[i]))
            .then_with(|| a.nodes.cmp(&b.nodes))
            .then(a.found_by.cmp(&b.found_by))
    });
    let mut slots: Vec<Option<Trail>> = trails.into_iter().map(Some).collect();
    order.into_iter().map(|i| slots[i].take().unwrap()).collect()
}

/// Keeps the first of several trails with the same node sequence.
pub fn dedupe_trails(trails: Vec<Trail>) -> Vec<Trail> {
    let mut seen = std::collections::HashSet::new();
    trails
        .into_iter()
        .filter(|t| seen.insert(t.nodes.clone()))
        .collect()
}

/// Filter, prune, filter again, dedupe and sort.
pub fn process_trails(
    trails: Vec<Trail>,
    functions: &[ScoringFunction],
    ctx: &SearchContext<'_>,
    params: ScoreParams,
) -> Vec<Trail> {
    let filtered = filter_subsumed(trails, ctx);
    let pruned = filtered.iter().map(|t| prune_trail(t, ctx, params)).collect();
    let refiltered = filter_subsumed(pruned, ctx);
    sort_trails(dedupe_trails(refiltered), functions, ctx)
}

/// One page of the merged display.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForestNode {
    pub node: NodeId,
    /// Query terms matched by this page.
    pub terms: TermSet,
    /// Rank of the best trail passing through this node.
    pub best_rank: usize,
    /// Ranks of the trails that end here.
    pub ends: Vec<usize>,
    pub children: Vec<ForestNode>,
}

/// Trails merged on common prefixes.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TrailForest {
    pub roots: Vec<ForestNode>,
}

/// Merges ranked trails into a forest. Roots and children are ordered by
/// the best trail they contain.
pub fn merge_forest(ordered: &[Trail], relevance: &RelevanceVector) -> TrailForest {
    let mut forest = TrailForest::default();
    for (rank, trail) in ordered.iter().enumerate() {
        let mut level = &mut forest.roots;
        let last = trail.nodes.len() - 1;
        for (depth, &page) in trail.nodes.iter().enumerate() {
            let pos = match level.iter().position(|n| n.node == page) {
                Some(p) => p,
                None => {
                    level.push(ForestNode {
                        node: page,
                        terms: relevance.matched(page),
                        best_rank: rank,
                        ends: Vec::new(),
                        children: Vec::new(),
                    });
                    level.len() - 1
                }
            };
            let node = &mut level[pos];
            if depth == last {
                node.ends.push(rank);
            }
            level = &mut node.children;
        }
    }
    forest
}

impl TrailForest {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Recovers the merged trails in rank order.
    pub fn unmerge(&self) -> Vec<Vec<NodeId>> {
        fn walk(node: &ForestNode, path: &mut Vec<NodeId>, out: &mut Vec<(usize, Vec<NodeId>)>) {
            path.push(node.node);
            for &rank in &node.ends {
                out.push((rank, path.clone()));
            }
            for child in &node.children {
                walk(child, path, out);
            }
            path.pop();
        }
        let mut out = Vec::new();
        for root in &self.roots {
            walk(root, &mut Vec::new(), &mut out);
        }
        out.sort_by_key(|(rank, _)| *rank);
        out.into_iter().map(|(_, p)| p).collect()
    }

    /// Parent-child node pairs in depth-first order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        fn walk(node: &ForestNode, out: &mut Vec<(NodeId, NodeId)>) {
            for child in &node.children {
                out.push((node.node, child.node));
                walk(child, out);
            }
        }
        let mut out = Vec::new();
        for root in &self.roots {
            walk(root, &mut out);
        }
        out
    }
}
