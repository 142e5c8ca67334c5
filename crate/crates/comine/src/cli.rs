//! Command-line interface: `mine`, `plan`, `verify`, and `bench`.
//!
//! Exit codes: 0 success, 1 mismatch or internal error, 2 query problem,
//! 3 graph problem, 4 oracle size guard.

use crate::io as fio;
use crate::runtime::{run_parallel, RunStats, RuntimeConfig};
use crate::{bench, gen, report, verify};
use clap::{Args, Parser, Subcommand};
use comine_core::graph::{TemporalGraph, Time};
use comine_core::mgtree::{co_mining_heuristic, DecisionRecord, MgTree, MiningDecision};
use comine_core::miner::MiningStats;
use comine_core::motif::{Balance, Mode, Query};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Success.
pub const EXIT_OK: i32 = 0;
/// Verification mismatch or internal error.
pub const EXIT_MISMATCH: i32 = 1;
/// Query file missing or malformed.
pub const EXIT_QUERY: i32 = 2;
/// Graph file missing or malformed.
pub const EXIT_GRAPH: i32 = 3;
/// Oracle size guard refused the instance.
pub const EXIT_GUARD: i32 = 4;

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::from_str(s)
}

fn parse_balance(s: &str) -> Result<Balance, String> {
    Balance::from_str(s)
}

fn parse_kind(s: &str) -> Result<gen::GraphKind, String> {
    gen::GraphKind::from_str(s)
}

fn parse_mult(s: &str) -> Result<f64, String> {
    let v = if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| format!("bad fraction `{s}`"))?;
        let b: f64 = b.trim().parse().map_err(|_| format!("bad fraction `{s}`"))?;
        if b == 0.0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        a / b
    } else {
        s.trim()
            .parse()
            .map_err(|_| format!("bad multiplier `{s}`"))?
    };
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("multiplier `{s}` must be finite and non-negative"))
    }
}

/// Temporal motif mining with shared-prefix co-mining.
#[derive(Debug, Parser)]
#[command(name = "comine", version, about)]
pub struct Cli {
    /// What to do.
    #[command(subcommand)]
    pub command: Command,
}

/// Top-level subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine the query's motifs and write counts and reports.
    Mine(MineArgs),
    /// Show the motif-group tree, its similarity, and the strategy decision.
    Plan(PlanArgs),
    /// Differentially verify the miner against the exhaustive oracle.
    Verify(VerifyArgs),
    /// Sweep window multipliers and worker counts, reporting speedups.
    Bench(BenchArgs),
}

/// Arguments for `mine`.
#[derive(Debug, Args)]
pub struct MineArgs {
    /// Query file.
    #[arg(long)]
    pub query: PathBuf,
    /// Graph file; overrides the path named in the query.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Override the query's mode (count|enumerate).
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Override the worker count.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Override the balancing strategy (none|dynamic|context_split).
    #[arg(long, value_parser = parse_balance)]
    pub balance: Option<Balance>,
    /// Co-mine regardless of the heuristic.
    #[arg(long, conflicts_with = "force_individual")]
    pub force_comine: bool,
    /// Mine each motif separately regardless of the heuristic.
    #[arg(long)]
    pub force_individual: bool,
    /// Directory for counts.tsv, result.json, and match listings.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Ignore and do not write the binary graph cache.
    #[arg(long)]
    pub no_cache: bool,
}

/// Arguments for `plan`.
#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Query file.
    #[arg(long)]
    pub query: PathBuf,
    /// Graph file; overrides the path named in the query.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Write the tree in DOT format to this path.
    #[arg(long)]
    pub dot: Option<PathBuf>,
}

/// Arguments for `verify`.
#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Check this many generated random instances instead of a query.
    #[arg(long)]
    pub fuzz: Option<usize>,
    /// Seed for instance generation.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Query file to verify (alternative to --fuzz).
    #[arg(long, required_unless_present = "fuzz")]
    pub query: Option<PathBuf>,
    /// Graph file; overrides the path named in the query.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Skip the oracle's input-size guard.
    #[arg(long)]
    pub allow_large: bool,
}

/// Arguments for `bench`.
#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Query file supplying the motif group and base window.
    #[arg(long)]
    pub query: PathBuf,
    /// Graph file; overrides the path named in the query.
    #[arg(long, conflicts_with = "gen")]
    pub graph: Option<PathBuf>,
    /// Generate a synthetic graph instead of loading one
    /// (uniform|hub|bipartite|burst).
    #[arg(long, value_parser = parse_kind)]
    pub gen: Option<gen::GraphKind>,
    /// Vertex count for --gen.
    #[arg(long, default_value_t = 20_000)]
    pub vertices: u32,
    /// Edge count for --gen.
    #[arg(long, default_value_t = 100_000)]
    pub edges: usize,
    /// Seed for --gen.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Window multipliers; accepts decimals and fractions like 1/3.
    #[arg(long = "delta-mult", value_delimiter = ',', value_parser = parse_mult)]
    pub delta_mults: Vec<f64>,
    /// Worker counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize])]
    pub workers: Vec<usize>,
    /// Timed repetitions per cell.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    /// Override the balancing strategy.
    #[arg(long, value_parser = parse_balance)]
    pub balance: Option<Balance>,
    /// CSV output path.
    #[arg(long, default_value = "bench.csv")]
    pub out: PathBuf,
    /// Ignore and do not write the binary graph cache.
    #[arg(long)]
    pub no_cache: bool,
}

/// Runs the parsed command, returning the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Mine(a) => cmd_mine(&a),
        Command::Plan(a) => cmd_plan(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

/// The graph named by the query, relative to the query file's directory
/// unless absolute or overridden.
fn resolve_graph_path(query_path: &Path, query: &Query, flag: Option<&Path>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    let named = Path::new(&query.graph);
    if named.is_absolute() {
        named.to_path_buf()
    } else {
        query_path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .join(named)
    }
}

fn threads_for(flag: Option<usize>, query: &Query) -> usize {
    flag.or(query.threads)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(std::num::NonZeroUsize::get)
                .unwrap_or(1)
        })
        .max(1)
}

struct Loaded {
    query: Query,
    graph_path: PathBuf,
    graph: TemporalGraph,
    delta: Time,
}

fn load_instance(
    query_path: &Path,
    graph_flag: Option<&Path>,
    use_cache: bool,
) -> Result<Loaded, i32> {
    let query = fio::load_query(query_path).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_QUERY
    })?;
    let graph_path = resolve_graph_path(query_path, &query, graph_flag);
    let graph = fio::load_graph(&graph_path, use_cache).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_GRAPH
    })?;
    let delta = fio::resolve_delta(&query, &graph).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_QUERY
    })?;
    Ok(Loaded {
        query,
        graph_path,
        graph,
        delta,
    })
}

fn build_tree(query: &Query) -> Result<MgTree, i32> {
    MgTree::build(&query.motifs).map_err(|e| {
        eprintln!("error: {e}");
        EXIT_QUERY
    })
}

/// Runs each motif on its own and merges the results as if they came from
/// one run, so reports have the same shape either way.
fn mine_individually(
    g: &TemporalGraph,
    tree: &MgTree,
    delta: Time,
    mode: Mode,
    threads: usize,
    balance: Balance,
    cfg: &RuntimeConfig,
) -> (Vec<u64>, Option<Vec<Vec<Vec<comine_core::graph::EdgeId>>>>, RunStats) {
    let motifs = tree.motifs();
    let max_depth = motifs.iter().map(|m| m.edge_count()).max().unwrap_or(0);
    let mut totals = MiningStats::new(motifs.len(), max_depth);
    let mut counts = Vec::with_capacity(motifs.len());
    let mut all_matches = Vec::with_capacity(motifs.len());
    let mut run = RunStats {
        workers: threads,
        balance,
        wall_ms: 0.0,
        epochs: 0,
        handoffs: 0,
        match_density: 0.0,
        totals: MiningStats::new(0, 0),
        per_worker: Vec::new(),
    };
    for (i, m) in motifs.iter().enumerate() {
        let single = MgTree::build(core::slice::from_ref(m)).expect("group motifs are canonical");
        let (res, rs) = run_parallel(g, &single, delta, mode, threads, balance, cfg);
        counts.push(res.counts[0]);
        if let Some(mut ms) = res.matches {
            all_matches.push(ms.swap_remove(0));
        }
        totals.visits += rs.totals.visits;
        totals.expansions += rs.totals.expansions;
        totals.matches += rs.totals.matches;
        totals.node_visits[i] = rs.totals.node_visits[0];
        totals.node_completions[i] = rs.totals.node_completions[0];
        for (d, v) in rs.totals.visits_by_depth.iter().enumerate() {
            totals.visits_by_depth[d] += v;
        }
        run.wall_ms += rs.wall_ms;
        run.epochs += rs.epochs;
        run.handoffs += rs.handoffs;
        run.per_worker.extend(rs.per_worker);
    }
    run.match_density = if g.num_edges() == 0 {
        0.0
    } else {
        totals.matches as f64 / g.num_edges() as f64
    };
    run.totals = totals;
    let matches = (mode == Mode::Enumerate).then_some(all_matches);
    (counts, matches, run)
}

fn cmd_mine(a: &MineArgs) -> i32 {
    let loaded = match load_instance(&a.query, a.graph.as_deref(), !a.no_cache) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let Loaded {
        query,
        graph_path,
        graph,
        delta,
    } = loaded;
    let tree = match build_tree(&query) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mode = a.mode.unwrap_or(query.mode);
    let threads = threads_for(a.threads, &query);
    let balance = a.balance.unwrap_or(query.balance);
    let cfg = RuntimeConfig::from_env();

    let mut decision = co_mining_heuristic(&graph, &tree, delta);
    if a.force_comine {
        decision.decision = MiningDecision::CoMine;
        decision.reasons.push("forced by --force-comine".to_string());
    } else if a.force_individual {
        decision.decision = MiningDecision::MineIndividually;
        decision
            .reasons
            .push("forced by --force-individual".to_string());
    }

    let (counts, matches, run) = match decision.decision {
        MiningDecision::CoMine => {
            let (res, rs) = run_parallel(&graph, &tree, delta, mode, threads, balance, &cfg);
            (res.counts, res.matches, rs)
        }
        MiningDecision::MineIndividually => {
            mine_individually(&graph, &tree, delta, mode, threads, balance, &cfg)
        }
    };

    if let Err(e) = fs::create_dir_all(&a.out) {
        eprintln!("error: cannot create output directory {}: {e}", a.out.display());
        return EXIT_MISMATCH;
    }
    let mut motif_counts = Vec::with_capacity(counts.len());
    for (i, m) in tree.motifs().iter().enumerate() {
        let mut mc = report::MotifCount {
            name: m.name().to_string(),
            count: counts[i],
            matches_path: None,
        };
        if let Some(ms) = &matches {
            let path = report::matches_filename(&a.out, m.name());
            let write = fs::File::create(&path)
                .map_err(|e| e.to_string())
                .and_then(|f| {
                    report::write_matches(std::io::BufWriter::new(f), m.name(), &ms[i])
                        .map_err(|e| e.to_string())
                });
            if let Err(e) = write {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_MISMATCH;
            }
            mc.matches_path = Some(path);
        }
        motif_counts.push(mc);
    }

    let record = report::OutputRecord {
        graph: graph_path,
        num_vertices: graph.num_vertices(),
        num_edges: graph.num_edges(),
        delta,
        mode: mode.to_string(),
        decision,
        motifs: motif_counts,
        run,
    };
    let write_all = || -> std::io::Result<()> {
        report::write_counts_tsv(fs::File::create(a.out.join("counts.tsv"))?, &record.motifs)?;
        report::write_result_json(fs::File::create(a.out.join("result.json"))?, &record)?;
        report::write_counts_tsv(std::io::stdout().lock(), &record.motifs)
    };
    if let Err(e) = write_all() {
        eprintln!("error: cannot write reports: {e}");
        return EXIT_MISMATCH;
    }
    eprintln!(
        "mined {} motif(s): {}, {} visits, {:.1} ms on {} worker(s)",
        record.motifs.len(),
        decision_label(record.decision.decision),
        record.run.totals.visits,
        record.run.wall_ms,
        record.run.workers,
    );
    EXIT_OK
}

fn cmd_plan(a: &PlanArgs) -> i32 {
    let query = match fio::load_query(&a.query) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_QUERY;
        }
    };
    let tree = match build_tree(&query) {
        Ok(t) => t,
        Err(code) => return code,
    };
    print!("{}", tree.outline());
    println!("similarity: {:.6}", tree.similarity_metric());

    let graph_path = resolve_graph_path(&a.query, &query, a.graph.as_deref());
    match fio::load_graph(&graph_path, true) {
        Ok(graph) => match fio::resolve_delta(&query, &graph) {
            Ok(delta) => print_decision(&co_mining_heuristic(&graph, &tree, delta)),
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_QUERY;
            }
        },
        Err(e) => {
            println!("decision: unavailable ({e})");
        }
    }

    if let Some(dot) = &a.dot {
        if let Err(e) = fs::write(dot, tree.dot()) {
            eprintln!("error: cannot write {}: {e}", dot.display());
            return EXIT_MISMATCH;
        }
    }
    EXIT_OK
}

fn decision_label(d: MiningDecision) -> &'static str {
    match d {
        MiningDecision::CoMine => "co-mine",
        MiningDecision::MineIndividually => "mine individually",
    }
}

fn print_decision(d: &DecisionRecord) {
    println!("decision: {}", decision_label(d.decision));
    println!(
        "  similarity {:.6} vs threshold {}, bipartite: {}, window/span {:.4}",
        d.similarity, d.threshold, d.bipartite, d.delta_over_span
    );
    for r in &d.reasons {
        println!("  - {r}");
    }
}

fn cmd_verify(a: &VerifyArgs) -> i32 {
    let report = if let Some(n) = a.fuzz {
        verify::fuzz(n, a.seed)
    } else {
        let query_path = a.query.as_deref().expect("clap requires --query without --fuzz");
        let loaded = match load_instance(query_path, a.graph.as_deref(), true) {
            Ok(l) => l,
            Err(code) => return code,
        };
        match verify::verify_instance(
            &loaded.graph,
            &loaded.query.motifs,
            loaded.delta,
            a.allow_large,
        ) {
            Ok(mismatches) => verify::VerifyReport {
                instances: 1,
                mismatches,
                witness: None,
            },
            Err(guard) => {
                eprintln!("error: {guard} (use --allow-large to override)");
                return EXIT_GUARD;
            }
        }
    };

    if report.ok() {
        println!("verified {} instance(s): all counts agree", report.instances);
        EXIT_OK
    } else {
        println!(
            "verified {} instance(s): {} mismatch(es)",
            report.instances,
            report.mismatches.len()
        );
        for m in &report.mismatches {
            println!("  {m}");
        }
        if let Some(w) = &report.witness {
            println!("minimal witness (delta {}):", w.delta);
            for m in &w.motifs {
                let edges: Vec<String> = m
                    .edges()
                    .iter()
                    .map(|e| format!("{}->{}", e.src, e.dst))
                    .collect();
                println!("  motif {}: {}", m.name(), edges.join(", "));
            }
            for e in w.graph.edges() {
                println!("  {} {} {}", e.src, e.dst, e.t);
            }
        }
        EXIT_MISMATCH
    }
}

fn cmd_bench(a: &BenchArgs) -> i32 {
    let query = match fio::load_query(&a.query) {
        Ok(q) => q,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_QUERY;
        }
    };
    let graph = if let Some(kind) = a.gen {
        gen::generate(kind, a.vertices, a.edges, a.seed)
    } else {
        let path = resolve_graph_path(&a.query, &query, a.graph.as_deref());
        match fio::load_graph(&path, !a.no_cache) {
            Ok(g) => g,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_GRAPH;
            }
        }
    };
    let delta = match fio::resolve_delta(&query, &graph) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_QUERY;
        }
    };
    let tree = match build_tree(&query) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let opts = bench::BenchOptions {
        delta_mults: if a.delta_mults.is_empty() {
            bench::default_delta_mults()
        } else {
            a.delta_mults.clone()
        },
        workers: if a.workers.is_empty() {
            vec![1]
        } else {
            a.workers.clone()
        },
        repeat: a.repeat.max(1),
        balance: a.balance.unwrap_or(query.balance),
        config: RuntimeConfig::from_env(),
    };
    let rows = bench::run_bench(&graph, &tree, delta, &opts);
    let write_all = || -> std::io::Result<()> {
        bench::write_bench_csv(fs::File::create(&a.out)?, &rows, opts.repeat)?;
        bench::write_bench_csv(std::io::stdout().lock(), &rows, opts.repeat)
    };
    if let Err(e) = write_all() {
        eprintln!("error: cannot write {}: {e}", a.out.display());
        return EXIT_MISMATCH;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses_every_subcommand() {
        Cli::try_parse_from(["comine", "mine", "--query", "q.txt", "--threads", "2"]).unwrap();
        Cli::try_parse_from(["comine", "plan", "--query", "q.txt", "--dot", "t.dot"]).unwrap();
        Cli::try_parse_from(["comine", "verify", "--fuzz", "10", "--seed", "7"]).unwrap();
        Cli::try_parse_from([
            "comine", "bench", "--query", "q.txt", "--gen", "hub", "--delta-mult", "0.25,1/3,4",
            "--workers", "1,2",
        ])
        .unwrap();
    }

    #[test]
    fn verify_requires_a_query_or_fuzz() {
        assert!(Cli::try_parse_from(["comine", "verify"]).is_err());
        assert!(Cli::try_parse_from(["comine", "verify", "--fuzz", "5"]).is_ok());
    }

    #[test]
    fn force_flags_conflict() {
        assert!(Cli::try_parse_from([
            "comine", "mine", "--query", "q", "--force-comine", "--force-individual",
        ])
        .is_err());
    }

    #[test]
    fn multipliers_accept_fractions() {
        assert_eq!(parse_mult("0.5"), Ok(0.5));
        assert_eq!(parse_mult("1/4"), Ok(0.25));
        assert!((parse_mult("1/3").unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(parse_mult("1/0").is_err());
        assert!(parse_mult("x").is_err());
        assert!(parse_mult("-1").is_err());
    }

    #[test]
    fn graph_paths_resolve_relative_to_the_query() {
        let query = comine_core::motif::parse_query(
            "graph g/edges.txt\ndelta 5\nmotif m1\nedge 0 1\nend\n",
        )
        .unwrap();
        let p = resolve_graph_path(Path::new("/data/q/query.txt"), &query, None);
        assert_eq!(p, Path::new("/data/q/g/edges.txt"));
        let p = resolve_graph_path(
            Path::new("/data/q/query.txt"),
            &query,
            Some(Path::new("/override.txt")),
        );
        assert_eq!(p, Path::new("/override.txt"));
    }
}
