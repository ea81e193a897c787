use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::table::{splitmix64, Balancing};
use super::tree::{NavigationTree, Trail};
use super::{Params, ScoreParams, ScoringFunction, SearchContext};
use crate::error::{Error, Result};
use crate::graph_store::NodeId;

/// Seed of the random stream owned by one `(start, repetition)` tree.
pub fn stream_seed(seed: u64, start: NodeId, repetition: usize) -> u64 {
    splitmix64(splitmix64(seed ^ splitmix64(u64::from(start.0))) ^ repetition as u64)
}

/// Grows one navigation tree: `explore_iterations` score-proportional
/// expansions, then `converge_iterations` rank-based ones. Stops early once
/// no candidate tips remain.
pub fn grow_tree<'a>(
    ctx: &'a SearchContext<'a>,
    start: NodeId,
    scoring: ScoringFunction,
    params: &Params,
    repetition: usize,
) -> Result<NavigationTree<'a>> {
    let seed = stream_seed(params.seed, start, repetition);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tree = NavigationTree::new(
        ctx,
        start,
        scoring,
        ScoreParams::from(params),
        params.depth_cap,
        Balancing::Randomized { seed: splitmix64(!seed) },
    )?;
    for _ in 0..params.explore_iterations {
        if tree.table().is_empty() {
            return Ok(tree);
        }
        let tip = tree.table().select_explore(&mut rng)?;
        tree.expand(tip)?;
    }
    for j in 0..params.converge_iterations {
        if tree.table().is_empty() {
            break;
        }
        let tip = tree.table().select_converge(params.discrimination, j, &mut rng)?;
        tree.expand(tip)?;
    }
    Ok(tree)
}

/// Best trail of `repetitions` independently grown trees per starting
/// point, ordered by start then repetition.
pub fn run_best_trail(
    starts: &[NodeId],
    params: &Params,
    ctx: &SearchContext<'_>,
    scoring: ScoringFunction,
) -> Result<Vec<Trail>> {
    params.validate()?;
    if starts.is_empty() {
        return Err(Error::NoStartingPoints);
    }
    if let Some(bad) = starts.iter().find(|s| !ctx.graph.contains(**s)) {
        return Err(Error::UnknownNode(*bad));
    }
    let jobs: Vec<(NodeId, usize)> = starts
        .iter()
        .flat_map(|&s| (0..params.repetitions).map(move |r| (s, r)))
        .collect();
    jobs.par_iter()
        .map(|&(start, rep)| grow_tree(ctx, start, scoring, params, rep).map(|t| t.best()))
        .collect()
}
