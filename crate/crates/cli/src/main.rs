//! Command-line front end for the pebbling engine.
//!
//! Graphs are named by short specs: `S3,6` and `S'3,6` are staircases, `P6`
//! is a path, `G3x4` is a grid window. Distributions are sparse `v:c` pairs
//! (`--pebbles 0:4,3:1`) or `@file.json` holding `[[v,c],...]`.
//!
//! Exit codes: 0 success (or query answered "yes"), 1 verification mismatch
//! or "no", 2 usage error, 3 budget exhausted before an exact answer.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use pebbling::cache::WitnessCache;
use pebbling::constructions;
use pebbling::dot;
use pebbling::grid::{
    build_grid_window, build_path, build_staircase, PebbleGraph, QuotientMap, StaircaseSpec,
    Variant,
};
use pebbling::harness::{self, ConjectureId};
use pebbling::pebble::{first_unsolvable_vertex, reach_witness, Distribution};
use pebbling::search::{optimal_pebbling_number, BudgetConfig, SearchValue};
use pebbling::{Error, Result};

#[derive(Parser)]
#[command(
    name = "pebbling",
    about = "Exact optimal-pebbling numbers of staircase grid graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Pebbles the query must deliver (reachability and optimality).
    #[arg(long, global = true, default_value_t = 1)]
    k: u32,

    /// Wall-clock budget for searches, in seconds.
    #[arg(long, global = true)]
    budget_seconds: Option<u64>,

    /// Worker threads for size scans (0 = all cores). Reports do not depend
    /// on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Persist/resume search progress at this path (single-graph runs).
    #[arg(long, global = true)]
    checkpoint: Option<PathBuf>,

    /// Witness cache file; defaults to the built-in cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// desk: bounded default budget. long: unbounded searches.
    #[arg(long, global = true, value_enum, default_value_t = Profile::Desk)]
    profile: Profile,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Profile {
    Desk,
    Long,
}

#[derive(Subcommand)]
enum Command {
    /// Print a graph (text summary, JSON, or DOT).
    Gen {
        /// Graph spec: S3,6 / S'3,6 / P6 / G3x4.
        graph: String,
    },
    /// Compute the k-optimal pebbling number.
    Optimal { graph: String },
    /// Decide k-reachability of a target, or k-solvability without one.
    Reach {
        graph: String,
        /// Sparse distribution: `0:4,3:1` or `@file.json`.
        #[arg(long)]
        pebbles: String,
        /// Vertex index; omit to check every vertex.
        #[arg(long)]
        target: Option<usize>,
        /// Print a replayable move sequence when reachable.
        #[arg(long)]
        witness: bool,
    },
    /// Build a verified solvable distribution for a spec.
    Construct {
        graph: String,
        /// Extend the construction one diagonal wider afterwards.
        #[arg(long)]
        widen: bool,
        /// Variant of the widened staircase (plain/prime).
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        widen_variant: VariantArg,
        /// Node budget per vertex check when patching grid windows.
        #[arg(long, default_value_t = 200_000)]
        node_budget: u64,
    },
    /// Collapse a distribution through a quotient map.
    Collapse {
        graph: String,
        #[arg(long, value_enum)]
        map: MapKind,
        #[arg(long)]
        pebbles: String,
    },
    /// Check a width family against the formula tables.
    Verify {
        /// Family: width2 .. width8.
        #[arg(long)]
        family: String,
        /// Length range, inclusive: `2..10` or a single number.
        #[arg(long)]
        n: String,
    },
    /// Gather data for a conjecture (reported, never asserted).
    Experiment {
        /// seven-wide | eight-wide | seven-k-wide.
        #[arg(long)]
        conjecture: String,
        /// Length range, inclusive.
        #[arg(long)]
        n: String,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Plain,
    Prime,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Prime => Variant::Prime,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MapKind {
    /// Collapse each slash to one path vertex.
    SlashToPath,
    /// Merge the first and third negative diagonals (7-wide to 6-wide).
    Merge7To6,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse(_) | Error::InvalidSpec(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn parse_graph(s: &str) -> Result<PebbleGraph> {
    if let Some(rest) = s.strip_prefix('P') {
        if let Ok(n) = rest.parse::<u32>() {
            return build_path(n);
        }
    }
    if let Some(rest) = s.strip_prefix('G') {
        if let Some((r, c)) = rest.split_once('x') {
            if let (Ok(rows), Ok(cols)) = (r.parse(), c.parse()) {
                return build_grid_window(rows, cols);
            }
        }
    }
    build_staircase(s.parse::<StaircaseSpec>()?)
}

fn parse_pebbles(g: &PebbleGraph, s: &str) -> Result<Distribution> {
    let pairs: Vec<(usize, u32)> = if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        let array = value.get("pebbles").unwrap_or(&value);
        serde_json::from_value(array.clone())?
    } else {
        let mut pairs = Vec::new();
        for item in s.split(',') {
            let (v, c) = item
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected v:c, got {item:?}")))?;
            let v = v
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad vertex index {v:?}")))?;
            let c = c
                .trim()
                .parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad count {c:?}")))?;
            pairs.push((v, c));
        }
        pairs
    };
    Distribution::from_pairs(g.n_vertices(), &pairs)
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<u32>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo = lo
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("bad range start {lo:?}")))?;
        let hi = hi
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("bad range end {hi:?}")))?;
        if lo > hi {
            return Err(Error::Parse(format!("empty range {s:?}")));
        }
        Ok(lo..=hi)
    } else {
        let n = s
            .parse::<u32>()
            .map_err(|_| Error::Parse(format!("bad length {s:?}")))?;
        Ok(n..=n)
    }
}

fn parse_family(s: &str) -> Result<u32> {
    let width = s
        .strip_prefix("width")
        .and_then(|w| w.parse::<u32>().ok())
        .ok_or_else(|| Error::Parse(format!("unknown family {s:?} (try width3 .. width8)")))?;
    if !(2..=8).contains(&width) {
        return Err(Error::Parse(format!("family width {width} out of range 2..=8")));
    }
    Ok(width)
}

fn budget_config(cli: &Cli) -> BudgetConfig {
    let budget = match (cli.budget_seconds, cli.profile) {
        (Some(s), _) => Some(Duration::from_secs(s)),
        (None, Profile::Desk) => Some(Duration::from_secs(120)),
        (None, Profile::Long) => None,
    };
    BudgetConfig {
        budget,
        threads: cli.threads,
        checkpoint: cli.checkpoint.clone(),
    }
}

fn load_cache(cli: &Cli) -> Result<WitnessCache> {
    match &cli.cache {
        Some(path) => WitnessCache::load(path),
        None => WitnessCache::builtin(),
    }
}

fn json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn print_distribution(
    format: Format,
    g: &PebbleGraph,
    dist: &Distribution,
    label: &str,
) -> Result<()> {
    match format {
        Format::Text => {
            println!("{label} on {}: size {}", g.graph_id(), dist.size());
            for (v, c) in dist.iter_counts() {
                println!("  {} {c}", g.coord(v));
            }
        }
        Format::Json => {
            let body = serde_json::json!({
                "graph": g,
                "pebbles": dist.pairs(),
            });
            println!("{}", serde_json::to_string_pretty(&body)?);
        }
        Format::Dot => println!("{}", dot::render(g, Some(dist))),
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let budget = budget_config(cli);
    match &cli.command {
        Command::Gen { graph } => {
            let g = parse_graph(graph)?;
            match cli.format {
                Format::Text => {
                    println!(
                        "{}: {} vertices, {} edges, {} slashes",
                        g.graph_id(),
                        g.n_vertices(),
                        g.edges().len(),
                        g.n_slashes()
                    );
                    for v in 0..g.n_vertices() {
                        println!("  {} {}", v, g.coord(v));
                    }
                }
                Format::Json => println!("{}", json(&g)?),
                Format::Dot => println!("{}", dot::render(&g, None)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Optimal { graph } => {
            let g = parse_graph(graph)?;
            let report = optimal_pebbling_number(&g, cli.k, &budget)?;
            match cli.format {
                Format::Json => println!("{}", json(&report)?),
                _ => {
                    println!("pi_{}({}) = {}", cli.k, g.graph_id(), report.value);
                    if let Some(witness) = report.witness_distribution(&g)? {
                        for (v, c) in witness.iter_counts() {
                            println!("  {} {c}", g.coord(v));
                        }
                    }
                    println!(
                        "examined {} candidates ({} weight-pruned, {} orbit-skipped)",
                        report.candidates_examined,
                        report.pruned_by_weight,
                        report.orbit_skipped
                    );
                }
            }
            Ok(match report.value {
                SearchValue::Exact(_) => ExitCode::SUCCESS,
                SearchValue::Interval { .. } => ExitCode::from(3),
            })
        }
        Command::Reach { graph, pebbles, target, witness } => {
            let g = parse_graph(graph)?;
            let dist = parse_pebbles(&g, pebbles)?;
            match target {
                Some(t) => {
                    if *t >= g.n_vertices() {
                        return Err(Error::InvalidSpec(format!(
                            "target {t} out of range for {}",
                            g.graph_id()
                        )));
                    }
                    let moves = reach_witness(&g, &dist, *t, cli.k)?;
                    match moves {
                        Some(moves) => {
                            println!("yes: {} pebbles reach vertex {t} {}", cli.k, g.coord(*t));
                            if *witness {
                                for mv in &moves {
                                    println!("  {} -> {}", g.coord(mv.from), g.coord(mv.to));
                                }
                            }
                            Ok(ExitCode::SUCCESS)
                        }
                        None => {
                            println!("no: vertex {t} {} is not {}-reachable", g.coord(*t), cli.k);
                            Ok(ExitCode::from(1))
                        }
                    }
                }
                None => match first_unsolvable_vertex(&g, &dist, cli.k)? {
                    None => {
                        println!("{}-solvable on {}", cli.k, g.graph_id());
                        Ok(ExitCode::SUCCESS)
                    }
                    Some(v) => {
                        println!("not {}-solvable: vertex {v} {} fails", cli.k, g.coord(v));
                        Ok(ExitCode::from(1))
                    }
                },
            }
        }
        Command::Construct { graph, widen, widen_variant, node_budget } => {
            let cache = load_cache(cli)?;
            let (g, dist) = if let Some(rest) = graph.strip_prefix('G') {
                let (r, c) = rest
                    .split_once('x')
                    .ok_or_else(|| Error::Parse(format!("bad window {graph:?}")))?;
                let rows = r
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad rows {r:?}")))?;
                let cols = c
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad cols {c:?}")))?;
                constructions::grid_diagonal_pattern(rows, cols, *node_budget)?
            } else {
                let spec: StaircaseSpec = graph.parse()?;
                constructions::staircase_distribution(spec, &cache)?
            };
            let (g, dist) = if *widen {
                constructions::widen(&g, &dist, (*widen_variant).into())?
            } else {
                (g, dist)
            };
            print_distribution(cli.format, &g, &dist, "verified solvable distribution")?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Collapse { graph, map, pebbles } => {
            let g = parse_graph(graph)?;
            let dist = parse_pebbles(&g, pebbles)?;
            let quotient = match map {
                MapKind::SlashToPath => QuotientMap::slash_to_path(&g)?,
                MapKind::Merge7To6 => QuotientMap::merge_first_and_third_diagonals(&g)?,
            };
            let collapsed = quotient.collapse(&dist)?;
            print_distribution(cli.format, quotient.target(), &collapsed, "collapsed distribution")?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { family, n } => {
            let width = parse_family(family)?;
            let lengths = parse_range(n)?;
            let cache = load_cache(cli)?;
            if cli.checkpoint.is_some() && lengths.clone().count() > 1 {
                return Err(Error::InvalidSpec(
                    "a checkpoint tracks one search; verify a single length with it".into(),
                ));
            }
            let specs = harness::family_specs(width, lengths);
            let report = harness::verify_theorem(&specs, &cache, &budget)?;
            match cli.format {
                Format::Json => println!("{}", json(&report)?),
                _ => print!("{}", harness::verify_markdown(&report)),
            }
            Ok(if report.mismatches > 0 {
                ExitCode::from(1)
            } else if report.incomplete > 0 {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Experiment { conjecture, n } => {
            let id: ConjectureId = conjecture.parse()?;
            let lengths = parse_range(n)?;
            let cache = load_cache(cli)?;
            let report = harness::run_conjecture_experiment(id, lengths, &cache, &budget)?;
            match cli.format {
                Format::Json => println!("{}", json(&report)?),
                _ => print!("{}", harness::experiment_markdown(&report)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
