//! `trailfinder` command line: ingest snapshots, query stores, run the
//! HTTP API and parameter sweeps.

mod server;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use trailfinder_core::best_trail::ScoringFunction;
use trailfinder_core::config::{parse_list, EngineConfig};
use trailfinder_core::engine::{Engine, SearchOverrides, SearchResponse};
use trailfinder_core::graph_store::load_snapshot;
use trailfinder_core::harness::{compare_strategies, run_sweep, write_csv, SweepSpec};
use trailfinder_core::index::Query;
use trailfinder_core::potential_gain::{
    bucket_distribution, compute_potential_gain, fit_power_law, Discount, StartStrategy,
};
use trailfinder_core::store::{ingest, open_store};
use trailfinder_core::{Error, Result};

#[derive(Parser)]
#[command(name = "trailfinder", version, about = "Trail-based site search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a JSONL site snapshot, index it and write a store directory.
    Ingest {
        snapshot: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// List pages by relevance for a query.
    Query {
        /// `[STORE] QUERY`; the store defaults to $TRAILFINDER_STORE or the config.
        #[arg(num_args = 1..=2, required = true, value_name = "ARGS")]
        args: Vec<String>,
        #[arg(long, default_value_t = 20)]
        limit: usize,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run the full trail pipeline and print the ranked trails.
    Search {
        /// `[STORE] QUERY`; the store defaults to $TRAILFINDER_STORE or the config.
        #[arg(num_args = 1..=2, required = true, value_name = "ARGS")]
        args: Vec<String>,
        /// Print the JSON response instead of the listing.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Potential gain of every page as CSV, optionally followed by the
    /// bucketed distribution.
    Pg {
        store: Option<PathBuf>,
        #[arg(long)]
        dmax: Option<usize>,
        /// Ratio between consecutive bucket bounds; prints the histogram.
        #[arg(long)]
        buckets: Option<f64>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Serve the HTTP API.
    Serve {
        store: Option<PathBuf>,
        #[arg(long)]
        listen: Option<String>,
        /// Directory of static files served under `/`.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Run a parameter sweep and write CSV to standard output.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        /// Compare starting-point strategies instead of sweeping the grid.
        #[arg(long)]
        strategies: bool,
    },
}

/// Flags mirroring the engine configuration; they override the config file.
#[derive(Args, Default)]
struct EngineArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    iexplore: Option<usize>,
    #[arg(long)]
    iconverge: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    df: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "c")]
    constant: Option<f64>,
    #[arg(long)]
    depth_cap: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    strategy: Option<StartStrategy>,
    /// Comma-separated scoring functions.
    #[arg(long)]
    functions: Option<String>,
    #[arg(long)]
    dmax: Option<usize>,
    /// Worker threads; 0 uses one per core.
    #[arg(long)]
    workers: Option<usize>,
}

impl EngineArgs {
    /// Config file, then the store environment variable, then flags, then
    /// an explicit store argument.
    fn resolve(&self, store: Option<PathBuf>) -> Result<EngineConfig> {
        let mut cfg = match &self.config {
            Some(path) => EngineConfig::load(path)?,
            None => {
                let mut cfg = EngineConfig::default();
                cfg.apply_env();
                cfg
            }
        };
        let p = &mut cfg.params;
        set(&mut p.explore_iterations, self.iexplore);
        set(&mut p.converge_iterations, self.iconverge);
        set(&mut p.repetitions, self.m);
        set(&mut p.discrimination, self.df);
        set(&mut p.gamma, self.gamma);
        set(&mut p.delta, self.delta);
        set(&mut p.sum_distinct_constant, self.constant);
        set(&mut p.depth_cap, self.depth_cap);
        set(&mut p.seed, self.seed);
        set(&mut cfg.k, self.k);
        set(&mut cfg.strategy, self.strategy);
        set(&mut cfg.dmax, self.dmax);
        set(&mut cfg.workers, self.workers);
        if let Some(list) = &self.functions {
            cfg.functions = parse_list::<ScoringFunction>(list)
                .map_err(|message| Error::param("functions", message))?;
        }
        if store.is_some() {
            cfg.store_dir = store;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

/// Splits `[STORE] QUERY`.
fn store_and_query(mut args: Vec<String>) -> (Option<PathBuf>, String) {
    let query = args.pop().unwrap_or_default();
    (args.pop().map(PathBuf::from), query)
}

fn open_engine(engine: &EngineArgs, store: Option<PathBuf>) -> Result<Engine> {
    Engine::open(engine.resolve(store)?)
}

fn cmd_ingest(snapshot: &Path, out: &Path) -> Result<String> {
    let site = load_snapshot(snapshot)?;
    let manifest = ingest(&site, out)?;
    Ok(format!(
        "ingested {} pages and {} links into {}\n",
        manifest.node_count,
        manifest.edge_count,
        out.display()
    ))
}

fn cmd_query(engine: &Engine, text: &str, limit: usize) -> Result<String> {
    let rel = engine.store().index.score(&Query::parse(text)?);
    let mut hits: Vec<_> = rel.matching().map(|id| (rel.mu(id), id)).collect();
    hits.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut out = String::new();
    for (rank, (mu, id)) in hits.into_iter().take(limit).enumerate() {
        let url = engine.store().site.graph.url_of(id).unwrap_or_default();
        writeln!(out, "{:>3}  {mu:.6}  {id:>5}  {url}", rank + 1).unwrap();
    }
    Ok(out)
}

/// Plain-text listing of a response; contains nothing run-dependent.
fn format_listing(response: &SearchResponse) -> String {
    let mut out = String::new();
    writeln!(out, "query: {}", response.query).unwrap();
    if response.flat_trails.is_empty() {
        out.push_str("no trails\n");
    }
    for t in &response.flat_trails {
        writeln!(
            out,
            "{}. found_by={} terms=[{}] sum_distinct={:.6} discounted={:.6} weighted={:.6}",
            t.rank + 1,
            t.found_by,
            t.terms.join(","),
            t.scores.sum_distinct,
            t.scores.discounted,
            t.scores.weighted
        )
        .unwrap();
        for page in &t.nodes {
            writeln!(out, "   {:>5}  {:.6}  {}  {}", page.id, page.score, page.url, page.title).unwrap();
        }
    }
    out
}

fn cmd_search(engine: &Engine, text: &str, json: bool) -> Result<String> {
    let outcome = engine.search(text, &SearchOverrides::default())?;
    let response = engine.render(text, &outcome);
    if json {
        let mut body = serde_json::to_string_pretty(&response).expect("response serializes");
        body.push('\n');
        Ok(body)
    } else {
        Ok(format_listing(&response))
    }
}

/// Per-page rows, then (with a bucket ratio) histogram rows. Graph
/// statistics and the power-law fit go to standard error.
fn cmd_pg(store: Option<PathBuf>, config: Option<PathBuf>, dmax: Option<usize>, ratio: Option<f64>) -> Result<String> {
    let args = EngineArgs { config, dmax, ..EngineArgs::default() };
    let cfg = args.resolve(store)?;
    let dir = cfg
        .store_dir
        .clone()
        .ok_or_else(|| Error::param("store", "no store directory given"))?;
    let site = open_store(&dir)?.site;
    let pg = compute_potential_gain(&site.graph, cfg.dmax, Discount::Reciprocal)?;
    let stats = site.graph.stats();
    eprintln!(
        "nodes={} edges={} max_outdegree={} weighted_avg_outdegree={:.6} dmax={}",
        stats.node_count, stats.edge_count, stats.beta, stats.weighted_avg_outdegree, cfg.dmax
    );
    let mut out = String::from("id,pg,url\n");
    for id in site.graph.node_ids() {
        writeln!(out, "{id},{:.9},{}", pg.get(id), site.graph.url_of(id).unwrap_or_default()).unwrap();
    }
    if let Some(ratio) = ratio {
        let buckets = bucket_distribution(&pg.pg, ratio)?;
        out.push_str("\nlower,upper,count\n");
        for b in &buckets {
            writeln!(out, "{:.9},{:.9},{}", b.lower, b.upper, b.count).unwrap();
        }
        match fit_power_law(&buckets) {
            Some(fit) => eprintln!("power law: slope={:.4} r_squared={:.4}", fit.slope, fit.r_squared),
            None => eprintln!("power law: too few buckets"),
        }
    }
    Ok(out)
}

fn cmd_bench(spec_path: &Path, strategies: bool) -> Result<Vec<u8>> {
    let text = std::fs::read_to_string(spec_path)?;
    let spec = SweepSpec::parse(&text, &spec_path.display().to_string())?;
    let mut out = Vec::new();
    if strategies {
        write_csv(&mut out, &compare_strategies(&spec)?)?;
    } else {
        write_csv(&mut out, &run_sweep(&spec)?)?;
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    let text = match cli.command {
        Command::Ingest { snapshot, out } => cmd_ingest(&snapshot, &out)?,
        Command::Query { args, limit, engine } => {
            let (store, query) = store_and_query(args);
            cmd_query(&open_engine(&engine, store)?, &query, limit)?
        }
        Command::Search { args, json, engine } => {
            let (store, query) = store_and_query(args);
            cmd_search(&open_engine(&engine, store)?, &query, json)?
        }
        Command::Pg { store, dmax, buckets, config } => cmd_pg(store, config, dmax, buckets)?,
        Command::Serve { store, listen, static_dir, engine } => {
            let mut cfg = engine.resolve(store)?;
            set(&mut cfg.listen, listen);
            if static_dir.is_some() {
                cfg.static_dir = static_dir;
            }
            return server::serve(Engine::open(cfg)?);
        }
        Command::Bench { spec, strategies } => {
            let csv = cmd_bench(&spec, strategies)?;
            std::io::stdout().write_all(&csv)?;
            return Ok(());
        }
    };
    std::io::stdout().write_all(text.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trailfinder: {e}");
            ExitCode::FAILURE
        }
    }
}
