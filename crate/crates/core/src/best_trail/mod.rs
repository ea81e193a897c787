//! The Best Trail search: navigation trees grown by probabilistic
//! best-first expansion, scored trails and the tip selection table.

mod params;
pub mod scoring;
mod search;
pub mod table;
mod tree;

pub use params::Params;
pub use scoring::{
    score_discounted, score_sum_distinct, score_weighted, ScoreParams, ScoringFunction,
    TrailScores,
};
pub use search::{grow_tree, run_best_trail, stream_seed};
pub use table::{compare_tips, geometric_sum, Balancing, RowView, TipKey, TipSelectionTable};
pub use tree::{NavigationTree, Tip, Trail};

use crate::graph_store::{ContentClasses, WebGraph};
use crate::index::RelevanceVector;

/// Read-only data shared by every tree of one query.
#[derive(Clone, Copy)]
pub struct SearchContext<'a> {
    pub graph: &'a WebGraph,
    pub relevance: &'a RelevanceVector,
    pub classes: &'a ContentClasses,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::graph_store::NodeId;

    struct Fixture {
        graph: WebGraph,
        rel: RelevanceVector,
        classes: ContentClasses,
    }

    impl Fixture {
        fn new(n: usize, edges: &[(u32, u32)], mu: Vec<f64>) -> Self {
            Fixture {
                graph: WebGraph::from_edges(n, edges).unwrap(),
                rel: RelevanceVector::from_scores(mu),
                classes: ContentClasses::identity(n),
            }
        }

        fn ctx(&self) -> SearchContext<'_> {
            SearchContext {
                graph: &self.graph,
                relevance: &self.rel,
                classes: &self.classes,
            }
        }
    }

    fn score_params() -> ScoreParams {
        ScoreParams::from(&Params::default())
    }

    #[test]
    fn expanding_a_sink_creates_nothing() {
        let fx = Fixture::new(2, &[(1, 2)], vec![1.0, 1.0]);
        let ctx = fx.ctx();
        let mut tree =
            NavigationTree::new(&ctx, NodeId(1), ScoringFunction::Weighted, score_params(), 8, Balancing::Unbalanced)
                .unwrap();
        assert_eq!(tree.expand(1).unwrap(), vec![2]);
        // Node 2 has no outlinks: recorded, never a candidate.
        assert!(tree.table().is_empty());
        assert_eq!(tree.expand(2).unwrap(), Vec::<u32>::new());
        assert!(matches!(tree.expand(1), Err(Error::AlreadyExpanded(1))));
        assert!(matches!(tree.expand(9), Err(Error::UnknownTip(9))));
    }

    #[test]
    fn children_get_sequential_ids_and_revisits() {
        let fx = Fixture::new(3, &[(1, 2), (1, 3), (2, 1)], vec![1.0, 0.5, 0.25]);
        let ctx = fx.ctx();
        let mut tree =
            NavigationTree::new(&ctx, NodeId(1), ScoringFunction::Weighted, score_params(), 8, Balancing::Unbalanced)
                .unwrap();
        assert_eq!(tree.expand(1).unwrap(), vec![2, 3]);
        assert_eq!(tree.expand(2).unwrap(), vec![4]);
        let revisit = tree.tip(4).unwrap();
        assert_eq!(revisit.node, NodeId(1));
        assert_eq!(revisit.depth, 3);
        // 1 + 0.5 * 0.75 + 1 * 0.75^2 * 0.5 (one earlier visit of page 1)
        assert!((revisit.score - (1.0 + 0.375 + 0.28125)).abs() < 1e-12);
        assert_eq!(tree.trail_to(4), vec![NodeId(1), NodeId(2), NodeId(1)]);
    }

    #[test]
    fn depth_cap_blocks_expansion() {
        let fx = Fixture::new(2, &[(1, 2), (2, 1)], vec![1.0, 1.0]);
        let ctx = fx.ctx();
        let mut tree =
            NavigationTree::new(&ctx, NodeId(1), ScoringFunction::SumDistinct, score_params(), 2, Balancing::Unbalanced)
                .unwrap();
        tree.expand(1).unwrap();
        assert!(tree.table().is_empty());
        assert!(matches!(tree.expand(2), Err(Error::DepthCapped(2))));
        let capped =
            NavigationTree::new(&ctx, NodeId(1), ScoringFunction::SumDistinct, score_params(), 1, Balancing::Unbalanced)
                .unwrap();
        assert!(capped.table().is_empty());
    }

    #[test]
    fn best_of_fresh_tree_is_root() {
        let fx = Fixture::new(2, &[(1, 2)], vec![0.2, 0.9]);
        let ctx = fx.ctx();
        let tree =
            NavigationTree::new(&ctx, NodeId(1), ScoringFunction::Weighted, score_params(), 8, Balancing::Unbalanced)
                .unwrap();
        assert_eq!(tree.best().nodes, vec![NodeId(1)]);
    }

    #[test]
    fn best_ties_go_to_lower_tip() {
        // Two children with equal relevance produce equal weighted scores.
        let fx = Fixture::new(3, &[(1, 2), (1, 3)], vec![0.5, 1.0, 1.0]);
        let ctx = fx.ctx();
        let mut tree =
            NavigationTree::new(&ctx, NodeId(1), ScoringFunction::Weighted, score_params(), 8, Balancing::Randomized { seed: 5 })
                .unwrap();
        tree.expand(1).unwrap();
        assert_eq!(tree.best_tip().id, 2);
        assert_eq!(tree.best().nodes, vec![NodeId(1), NodeId(2)]);
    }

    #[test]
    fn best_keeps_expanded_and_dead_end_tips() {
        // Every extension of 1->2 drops relevance under sum distinct.
        let fx = Fixture::new(4, &[(1, 2), (2, 3), (3, 4)], vec![1.0, 2.0, 0.0, 0.0]);
        let ctx = fx.ctx();
        let mut tree =
            NavigationTree::new(&ctx, NodeId(1), ScoringFunction::SumDistinct, score_params(), 8, Balancing::Unbalanced)
                .unwrap();
        tree.expand(1).unwrap();
        tree.expand(2).unwrap();
        tree.expand(3).unwrap();
        assert!(tree.tip(2).unwrap().expanded);
        assert_eq!(tree.best().nodes, vec![NodeId(1), NodeId(2)]);
    }

    #[test]
    fn incremental_scores_match_whole_trail_scores() {
        let fx = Fixture::new(
            4,
            &[(1, 2), (2, 3), (3, 1), (3, 4), (4, 2), (2, 1)],
            vec![0.7, 0.0, 1.3, 0.4],
        );
        let ctx = fx.ctx();
        let params = Params { depth_cap: 6, explore_iterations: 30, converge_iterations: 0, ..Params::default() };
        for f in ScoringFunction::ALL {
            let tree = grow_tree(&ctx, NodeId(1), f, &params, 0).unwrap();
            for tip in tree.tips() {
                let trail = tree.trail_to(tip.id);
                let whole = TrailScores::compute(&trail, &fx.rel, &fx.classes, ScoreParams::from(&params));
                assert!((whole[f] - tip.score).abs() < 1e-12, "{f} tip {}", tip.id);
            }
        }
    }

    #[test]
    fn zero_iterations_give_singletons() {
        let fx = Fixture::new(3, &[(1, 2), (2, 3), (3, 1)], vec![0.3, 0.2, 0.1]);
        let params = Params { explore_iterations: 0, converge_iterations: 0, ..Params::default() };
        let starts = [NodeId(1), NodeId(3)];
        let trails = run_best_trail(&starts, &params, &fx.ctx(), ScoringFunction::Weighted).unwrap();
        let nodes: Vec<_> = trails.iter().map(|t| t.nodes.clone()).collect();
        assert_eq!(nodes, vec![vec![NodeId(1)], vec![NodeId(3)]]);
    }

    #[test]
    fn one_trail_per_start_and_repetition() {
        let fx = Fixture::new(3, &[(1, 2), (2, 3), (3, 1)], vec![0.3, 0.2, 0.1]);
        let params = Params { repetitions: 2, ..Params::default() };
        let starts = [NodeId(1), NodeId(2), NodeId(3)];
        let trails = run_best_trail(&starts, &params, &fx.ctx(), ScoringFunction::SumDistinct).unwrap();
        assert_eq!(trails.len(), 6);
        for t in &trails {
            for pair in t.nodes.windows(2) {
                assert!(fx.graph.has_edge(pair[0], pair[1]));
            }
            assert!(t.len() <= params.depth_cap);
        }
    }

    #[test]
    fn run_rejects_bad_input() {
        let fx = Fixture::new(1, &[], vec![1.0]);
        let p = Params::default();
        assert!(matches!(
            run_best_trail(&[], &p, &fx.ctx(), ScoringFunction::Weighted),
            Err(Error::NoStartingPoints)
        ));
        assert!(matches!(
            run_best_trail(&[NodeId(4)], &p, &fx.ctx(), ScoringFunction::Weighted),
            Err(Error::UnknownNode(_))
        ));
        let bad = Params { gamma: 2.0, ..Params::default() };
        assert!(run_best_trail(&[NodeId(1)], &bad, &fx.ctx(), ScoringFunction::Weighted).is_err());
    }

    #[test]
    fn runs_are_reproducible_and_order_independent() {
        let fx = Fixture::new(
            5,
            &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1), (1, 3), (2, 5)],
            vec![0.3, 0.8, 0.1, 0.0, 0.6],
        );
        let params = Params { explore_iterations: 10, converge_iterations: 10, ..Params::default() };
        let a = run_best_trail(&[NodeId(1), NodeId(4)], &params, &fx.ctx(), ScoringFunction::Weighted).unwrap();
        let b = run_best_trail(&[NodeId(4), NodeId(1)], &params, &fx.ctx(), ScoringFunction::Weighted).unwrap();
        assert_eq!(a[0], b[1]);
        assert_eq!(a[1], b[0]);
    }
}
