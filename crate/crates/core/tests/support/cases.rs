//! Seeded check cases shared by the core tests and the acceptance suite.
//! Each returns `Err` with a description of the first violation.

use std::collections::BTreeMap;

use rand::Rng;

use super::*;
use trailfinder_core::best_trail::{
    geometric_sum, run_best_trail, Balancing, NavigationTree, Params, ScoreParams, ScoringFunction,
    SearchContext, TipKey, TipSelectionTable, Trail,
};
use trailfinder_core::potential_gain::{compute_potential_gain, Discount, WalkFractions};
use trailfinder_core::trail_post::*;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub const POST_PARAMS: ScoreParams = ScoreParams { gamma: 0.75, delta: 0.5, constant: 1.0 };

/// Published table rows and root totals from the derived page scores.
pub fn published_table_case() -> Result<String, String> {
    let gamma = solve_gamma();
    ensure!((gamma - 0.75).abs() < 1e-4, "solved gamma {gamma}");
    let inputs = derive_published_inputs();
    ensure!((inputs.mu[2] - 6.264).abs() < 1e-3, "mu(tip 3 page) {}", inputs.mu[2]);
    let (graph, rel, classes) = published_fixture(&inputs);
    let ctx = SearchContext { graph: &graph, relevance: &rel, classes: &classes };
    let params = ScoreParams { gamma: inputs.gamma, delta: 0.5, constant: 1.0 };
    let mut worst: f64 = 0.0;
    for (f, weighted_column) in [(ScoringFunction::Weighted, true), (ScoringFunction::SumDistinct, false)] {
        let mut tree = NavigationTree::new(&ctx, NodeId(1), f, params, 8, Balancing::Unbalanced)
            .map_err(|e| e.to_string())?;
        tree.expand(1).map_err(|e| e.to_string())?;
        tree.expand(3).map_err(|e| e.to_string())?;
        for (tip, w, sd) in PUBLISHED_TIP_SCORES {
            let want = if weighted_column { w } else { sd };
            let got = tree.tip(tip).ok_or(format!("tip {tip} missing"))?.score;
            worst = worst.max((got - want).abs());
            ensure!((got - want).abs() < 2e-4, "{f} tip {tip}: {got:.5} vs {want}");
        }
    }
    let mut table = TipSelectionTable::new(Balancing::Unbalanced);
    for (tip, w, _) in PUBLISHED_TIP_SCORES {
        table.insert(TipKey { terms: 1, best_page: 1, score: w, tip });
    }
    let root = table.row(table.root_tip().ok_or("empty table")?).ok_or("no root row")?;
    ensure!(
        (root.subscore - PUBLISHED_ROOT_SUBSCORE).abs() < 1e-3,
        "root subscore {}",
        root.subscore
    );
    ensure!(root.subcount == 12, "root subcount {}", root.subcount);
    Ok(format!(
        "gamma={gamma:.5} max row error={worst:.1e} root subscore={:.4} subcount={}",
        root.subscore, root.subcount
    ))
}

/// Best Trail with df = 0, I_explore = 0 against the best-first oracle.
pub fn best_first_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let graph = random_graph(&mut r, 8, 16);
    let n = graph.node_count();
    let rel = random_relevance(&mut r, n, 2);
    let classes = random_classes(&mut r, n);
    let start = NodeId(r.random_range(1..=n as u32));
    let params = Params {
        explore_iterations: 0,
        converge_iterations: 20,
        discrimination: 0.0,
        depth_cap: 5,
        seed,
        ..Params::default()
    };
    let ctx = SearchContext { graph: &graph, relevance: &rel, classes: &classes };
    let oracle_params = OracleParams {
        gamma: params.gamma,
        delta: params.delta,
        constant: params.sum_distinct_constant,
        depth_cap: params.depth_cap,
        iterations: params.converge_iterations,
    };
    for (f, of) in [
        (ScoringFunction::SumDistinct, OracleScoring::SumDistinct),
        (ScoringFunction::Discounted, OracleScoring::Discounted),
        (ScoringFunction::Weighted, OracleScoring::Weighted),
    ] {
        let got = run_best_trail(&[start], &params, &ctx, f).map_err(|e| e.to_string())?;
        let want = best_first_oracle(&graph, &rel, &classes, start, of, &oracle_params);
        ensure!(got.len() == 1, "seed {seed} {f}: {} trails", got.len());
        ensure!(got[0].nodes == want, "seed {seed} {f}: {:?} vs oracle {want:?}", got[0].nodes);
    }
    Ok(())
}

/// Potential gain and per-depth shares against walk enumeration.
pub fn potential_gain_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let graph = random_graph(&mut r, 10, 30);
    let dmax = r.random_range(1..=5);
    for discount in [Discount::Reciprocal, Discount::Geometric(0.5), Discount::Constant] {
        let got = compute_potential_gain(&graph, dmax, discount).map_err(|e| e.to_string())?;
        let want = brute_force_potential_gain(&graph, dmax, |d| discount.weight(d));
        for (i, (g, w)) in got.pg.iter().zip(&want).enumerate() {
            ensure!((g - w).abs() < 1e-9, "seed {seed} {discount:?} node {}: {g} vs {w}", i + 1);
        }
    }
    let mut walks = WalkFractions::new(&graph);
    for d in 1..=dmax {
        let shares = walks.step();
        let sum: f64 = shares.iter().sum();
        let walks_of_length_d: u64 = graph.node_ids().map(|s| count_walks(&graph, s, d)).sum();
        let expected = if walks_of_length_d > 0 { 1.0 } else { 0.0 };
        ensure!((sum - expected).abs() < 1e-9, "seed {seed} depth {d}: shares sum to {sum}");
    }
    Ok(())
}

/// Five tips with distinct keys; `in_order` gives rank order.
pub fn selection_fixture() -> TipSelectionTable {
    let mut table = TipSelectionTable::new(Balancing::Randomized { seed: 7 });
    for (tip, score) in [(1, 2.0), (2, 5.0), (3, 0.5), (4, 3.0), (5, 1.0)] {
        table.insert(TipKey { terms: 1, best_page: 1, score, tip });
    }
    table
}

fn histogram(table: &TipSelectionTable, draws: usize, mut pick: impl FnMut() -> u32) -> Vec<usize> {
    let order = table.in_order();
    let mut counts = vec![0; order.len()];
    for _ in 0..draws {
        let tip = pick();
        counts[order.iter().position(|&t| t == tip).unwrap()] += 1;
    }
    counts
}

/// Goodness of fit of exploration draws against score-proportional
/// probabilities; returns the p-value.
pub fn explore_fit(draws: usize, seed: u64) -> f64 {
    let table = selection_fixture();
    let mut r = rng(seed);
    let scores: Vec<f64> = table.in_order().iter().map(|&t| table.key(t).unwrap().score).collect();
    let total: f64 = scores.iter().sum();
    let probs: Vec<f64> = scores.iter().map(|s| s / total).collect();
    let counts = histogram(&table, draws, || table.select_explore(&mut r).unwrap());
    chi_square_p(&counts, &probs)
}

/// Rank probabilities `df^(j * rank) / sum`, with `0^0 = 1`.
pub fn converge_probs(n: usize, df: f64, j: usize) -> Vec<f64> {
    if df == 0.0 {
        return (0..n).map(|rank| if rank == 0 { 1.0 } else { 0.0 }).collect();
    }
    let w: Vec<f64> = (0..n)
        .map(|rank| if rank * j == 0 { 1.0 } else { df.powi((rank * j) as i32) })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

/// Goodness of fit of convergence draws; returns the p-value and the
/// per-rank counts.
pub fn converge_fit(df: f64, j: usize, draws: usize, seed: u64) -> (f64, Vec<usize>) {
    let table = selection_fixture();
    let mut r = rng(seed);
    let probs = converge_probs(table.len(), df, j);
    let counts = histogram(&table, draws, || table.select_converge(df, j, &mut r).unwrap());
    let zero_cells_hit = counts.iter().zip(&probs).any(|(&c, &p)| p == 0.0 && c > 0);
    let p = if zero_cells_hit { 0.0 } else { chi_square_p(&counts, &probs) };
    (p, counts)
}

/// Compensated direct summation of `a^k` for `k` in `x..=y`.
pub fn direct_geometric(a: f64, x: u64, y: u64) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for k in x..=y {
        let term = a.powf(k as f64);
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
    }
    sum + comp
}

/// Worst absolute error of `geometric_sum` over `cases` random
/// `(a = df^j, x, y)` triples.
pub fn geometric_case(cases: usize, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let df: f64 = r.random_range(0.0..1.0);
        let a = df.powi(r.random_range(1..=50));
        let x = r.random_range(0..=400u64);
        let y = x + r.random_range(0..=400u64);
        worst = worst.max((geometric_sum(a, x, y) - direct_geometric(a, x, y)).abs());
    }
    worst
}

fn multiset(paths: impl IntoIterator<Item = Vec<NodeId>>) -> BTreeMap<Vec<NodeId>, usize> {
    let mut m = BTreeMap::new();
    for p in paths {
        *m.entry(p).or_insert(0) += 1;
    }
    m
}

/// Subsumption, redundancy removal, sorting and merging on one random
/// trail set.
pub fn post_processing_case(seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let graph = random_graph(&mut r, 10, 30);
    let n = graph.node_count();
    let rel = random_relevance(&mut r, n, 3);
    let classes = random_classes(&mut r, n);
    let ctx = SearchContext { graph: &graph, relevance: &rel, classes: &classes };
    let count = r.random_range(1..=12);
    let trails: Vec<Trail> = (0..count)
        .map(|_| {
            let f = ScoringFunction::ALL[r.random_range(0..3)];
            Trail::from_nodes(random_walk(&mut r, &graph, 6), &ctx, POST_PARAMS, f)
        })
        .collect();

    let kept = filter_subsumed(trails.clone(), &ctx);
    for t in &kept {
        let rt = reference_score(&t.nodes, &rel, &classes);
        for other in &trails {
            let ro = reference_score(&other.nodes, &rel, &classes);
            ensure!(
                !(subsumes(&other.nodes, &t.nodes, &classes) && ro > rt),
                "seed {seed}: {:?} survived although {:?} subsumes it",
                t.nodes,
                other.nodes
            );
        }
    }

    for t in &trails {
        let once = remove_redundant_pages(&t.nodes, &graph, &rel, &classes);
        ensure!(once[0] == t.nodes[0], "seed {seed}: start page removed");
        ensure!(
            once.windows(2).all(|w| graph.has_edge(w[0], w[1])),
            "seed {seed}: {once:?} is not a graph path"
        );
        let twice = remove_redundant_pages(&once, &graph, &rel, &classes);
        ensure!(once == twice, "seed {seed}: removal is not idempotent");
        ensure!(
            reference_score(&once, &rel, &classes) >= reference_score(&t.nodes, &rel, &classes),
            "seed {seed}: removal lowered the score"
        );
    }

    let functions: Vec<ScoringFunction> =
        ScoringFunction::ALL.into_iter().filter(|_| r.random_bool(0.6)).collect();
    let functions = if functions.is_empty() { vec![ScoringFunction::Weighted] } else { functions };
    let sorted = sort_trails(trails.clone(), &functions, &ctx);
    ensure!(
        multiset(sorted.iter().map(|t| t.nodes.clone())) == multiset(trails.iter().map(|t| t.nodes.clone())),
        "seed {seed}: sort is not a permutation"
    );
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            ensure!(a.terms.len() >= b.terms.len(), "seed {seed}: fewer terms ranked first");
        }
    }
    ensure!(sorted == sort_trails(trails.clone(), &functions, &ctx), "seed {seed}: unstable sort");

    let forest = merge_forest(&sorted, &rel);
    let original: Vec<Vec<NodeId>> = sorted.iter().map(|t| t.nodes.clone()).collect();
    ensure!(forest.unmerge() == original, "seed {seed}: merge is lossy");
    ensure!(
        forest.edges().into_iter().all(|(a, b)| graph.has_edge(a, b)),
        "seed {seed}: forest edge outside the graph"
    );

    let processed = process_trails(trails, &functions, &ctx, POST_PARAMS);
    ensure!(!processed.is_empty(), "seed {seed}: processing dropped every trail");
    Ok(())
}
