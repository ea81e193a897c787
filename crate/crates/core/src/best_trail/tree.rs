use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::scoring::{weighted_term, ScoreParams, ScoringFunction, TrailScores};
use super::table::{compare_tips, Balancing, TipKey, TipSelectionTable};
use super::SearchContext;
use crate::error::{Error, Result};
use crate::graph_store::NodeId;
use crate::index::TermSet;

/// One node of a navigation tree. Tip IDs start at 1 in creation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tip {
    pub id: u32,
    pub parent: Option<u32>,
    pub node: NodeId,
    /// Trail length; the root has depth 1.
    pub depth: u32,
    /// Trail score under the tree's scoring function.
    pub score: f64,
    /// Relevance summed over the distinct content classes on the trail.
    pub distinct_sum: f64,
    pub terms_trail: TermSet,
    pub terms_best_page: u32,
    pub expanded: bool,
}

impl Tip {
    pub fn key(&self) -> TipKey {
        TipKey {
            terms: self.terms_trail.len(),
            best_page: self.terms_best_page,
            score: self.score,
            tip: self.id,
        }
    }
}

/// A scored page sequence found by the search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trail {
    pub nodes: Vec<NodeId>,
    pub scores: TrailScores,
    pub terms: TermSet,
    /// Most query terms matched by one page of the trail.
    pub best_page_terms: u32,
    pub start: NodeId,
    /// Scoring function of the tree the trail came from.
    pub found_by: ScoringFunction,
}

impl Trail {
    /// Builds a trail and scores it under every function.
    pub fn from_nodes(
        nodes: Vec<NodeId>,
        ctx: &SearchContext<'_>,
        params: ScoreParams,
        found_by: ScoringFunction,
    ) -> Trail {
        let scores = TrailScores::compute(&nodes, ctx.relevance, ctx.classes, params);
        let terms = nodes
            .iter()
            .fold(TermSet::EMPTY, |acc, n| acc.union(ctx.relevance.matched(*n)));
        let best_page_terms = nodes
            .iter()
            .map(|n| ctx.relevance.matched(*n).len())
            .max()
            .unwrap_or(0);
        Trail {
            start: nodes[0],
            nodes,
            scores,
            terms,
            best_page_terms,
            found_by,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Tree of traversal states grown from one starting page, together with the
/// selection table over its candidate tips.
pub struct NavigationTree<'a> {
    ctx: &'a SearchContext<'a>,
    scoring: ScoringFunction,
    params: ScoreParams,
    depth_cap: u32,
    tips: Vec<Tip>,
    table: TipSelectionTable,
    best: u32,
}

impl<'a> NavigationTree<'a> {
    pub fn new(
        ctx: &'a SearchContext<'a>,
        root: NodeId,
        scoring: ScoringFunction,
        params: ScoreParams,
        depth_cap: usize,
        balancing: Balancing,
    ) -> Result<Self> {
        if !ctx.graph.contains(root) {
            return Err(Error::UnknownNode(root));
        }
        let mut tree = NavigationTree {
            ctx,
            scoring,
            params,
            depth_cap: depth_cap as u32,
            tips: Vec::new(),
            table: TipSelectionTable::new(balancing),
            best: 1,
        };
        tree.add_tip(None, root);
        Ok(tree)
    }

    pub fn scoring(&self) -> ScoringFunction {
        self.scoring
    }

    pub fn tip(&self, id: u32) -> Option<&Tip> {
        id.checked_sub(1).and_then(|i| self.tips.get(i as usize))
    }

    pub fn tips(&self) -> &[Tip] {
        &self.tips
    }

    pub fn table(&self) -> &TipSelectionTable {
        &self.table
    }

    fn is_candidate(&self, tip: &Tip) -> bool {
        tip.depth < self.depth_cap && self.ctx.graph.out_degree(tip.node) > 0
    }

    fn add_tip(&mut self, parent: Option<u32>, node: NodeId) -> u32 {
        let rel = self.ctx.relevance;
        let mu = rel.mu(node);
        let page_terms = rel.matched(node);
        let id = self.tips.len() as u32 + 1;

        let (depth, repeats, parent_tip) = match parent {
            None => (1, 0, None),
            Some(p) => {
                let class = self.ctx.classes.class_of(node);
                let mut repeats = 0;
                let mut cursor = Some(p);
                while let Some(c) = cursor {
                    let t = &self.tips[c as usize - 1];
                    if self.ctx.classes.class_of(t.node) == class {
                        repeats += 1;
                    }
                    cursor = t.parent;
                }
                let pt = &self.tips[p as usize - 1];
                (pt.depth + 1, repeats, Some(pt))
            }
        };

        let distinct_sum = parent_tip.map_or(0.0, |p| p.distinct_sum) + if repeats == 0 { mu } else { 0.0 };
        let prior = parent_tip.map_or(0.0, |p| p.score);
        let p = self.params;
        let score = match self.scoring {
            ScoringFunction::SumDistinct => distinct_sum / (depth as f64 + p.constant),
            ScoringFunction::Discounted => prior + weighted_term(mu, depth as usize, 0, p.gamma, 1.0),
            ScoringFunction::Weighted => {
                prior + weighted_term(mu, depth as usize, repeats, p.gamma, p.delta)
            }
        };
        let tip = Tip {
            id,
            parent,
            node,
            depth,
            score,
            distinct_sum,
            terms_trail: parent_tip.map_or(TermSet::EMPTY, |p| p.terms_trail).union(page_terms),
            terms_best_page: parent_tip.map_or(0, |p| p.terms_best_page).max(page_terms.len()),
            expanded: false,
        };

        if self.is_candidate(&tip) {
            self.table.insert(tip.key());
        }
        if id == 1 || compare_tips(&tip.key(), &self.tips[self.best as usize - 1].key()) == Ordering::Less {
            self.best = id;
        }
        self.tips.push(tip);
        id
    }

    /// Replaces a tip by one child per outlink of its page.
    ///
    /// Children at the depth cap or on pages without outlinks stay in the
    /// tree but never become candidates.
    pub fn expand(&mut self, tip_id: u32) -> Result<Vec<u32>> {
        let tip = self.tip(tip_id).ok_or(Error::UnknownTip(tip_id))?;
        if tip.expanded {
            return Err(Error::AlreadyExpanded(tip_id));
        }
        if tip.depth >= self.depth_cap {
            return Err(Error::DepthCapped(tip_id));
        }
        let node = tip.node;
        self.tips[tip_id as usize - 1].expanded = true;
        self.table.remove(tip_id);
        let graph = self.ctx.graph;
        Ok(graph
            .successors(node)
            .iter()
            .map(|&child| self.add_tip(Some(tip_id), child))
            .collect())
    }

    /// Pages from the root to `tip_id`.
    pub fn trail_to(&self, tip_id: u32) -> Vec<NodeId> {
        let mut nodes = Vec::new();
        let mut cursor = self.tip(tip_id).map(|t| t.id);
        while let Some(c) = cursor {
            let t = &self.tips[c as usize - 1];
            nodes.push(t.node);
            cursor = t.parent;
        }
        nodes.reverse();
        nodes
    }

    /// Highest ranked tip ever created, expanded and dead-end tips included.
    pub fn best_tip(&self) -> &Tip {
        &self.tips[self.best as usize - 1]
    }

    pub fn best(&self) -> Trail {
        Trail::from_nodes(
            self.trail_to(self.best),
            self.ctx,
            self.params,
            self.scoring,
        )
    }
}
