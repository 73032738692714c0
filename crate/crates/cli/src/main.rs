//! `yaograph`: generate point sets, build and verify Yao graphs, run
//! benchmark matrices and draw charts.

mod chart;
mod run;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use yaograph::graph::{check_invariants, compare_graphs, GraphError, Mismatch, Provenance, Violation};
use yaograph::io::{self, Distribution, GeneratorSpec, RunLabel, StatsRecord};
use yaograph::kernel::{with_kernel, Kernel, KernelVisitor, DEFAULT_EPSILON};
use yaograph::sweep::check_against_naive;
use yaograph::{KernelConfig, KernelMode, Point, YaoGraph};

use chart::{log_log_svg, Series};
use run::{check_event_bound, Algorithm, Outcome, RunSpec};

/// Mismatch lines printed before the rest are summarized.
const MAX_LISTED: usize = 50;

#[derive(Parser, Debug)]
#[command(name = "yaograph", version, about = "Build and check Yao graphs of planar point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated point set.
    Generate(GenerateArgs),
    /// Build a Yao graph and write its edges and stats.
    Build(BuildArgs),
    /// Compare two graphs of the same points; exit 1 on any difference.
    Verify(VerifyArgs),
    /// Run a matrix of algorithms, distributions, sizes, cone counts and seeds.
    Bench(BenchArgs),
    /// Draw log-log charts from a stats CSV, or a graph of a point set.
    Plot(PlotArgs),
}

/// Where the points come from: a file, or a generator.
#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Point file with one `x y` pair per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Distribution to generate from [default: uniform].
    #[arg(long)]
    dist: Option<Distribution>,
    /// Number of points to generate.
    #[arg(long)]
    n: Option<usize>,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Points with the distribution and seed columns of their stats rows.
struct Input {
    points: Vec<Point>,
    distribution: String,
    seed: Option<u64>,
}

impl InputArgs {
    fn is_given(&self) -> bool {
        self.input.is_some() || self.n.is_some() || self.dist.is_some()
    }

    fn load(&self) -> Result<Input> {
        match (&self.input, self.n) {
            (Some(_), _) if self.dist.is_some() || self.n.is_some() => usage("--input cannot be combined with --n or --dist"),
            (Some(path), _) => Ok(Input { points: io::read_points(path)?, distribution: format!("file:{}", path.display()), seed: None }),
            (None, Some(n)) => {
                let spec = GeneratorSpec { distribution: self.dist.unwrap_or(Distribution::Uniform), n, seed: self.seed };
                Ok(Input { points: io::generate(&spec), distribution: spec.distribution.label(), seed: Some(self.seed) })
            }
            _ => usage("points are required: give --input PATH or --n INT"),
        }
    }
}

/// How graphs are built.
#[derive(Args, Debug, Clone)]
struct EngineArgs {
    #[arg(long, default_value = "inexact")]
    kernel: KernelMode,
    /// Number of cones.
    #[arg(long, default_value_t = 6)]
    k: usize,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Time limit per algorithm run, in seconds.
    #[arg(long, default_value_t = 1800.0)]
    time_limit: f64,
    /// Report numerical failures of the inexact kernel instead of rerunning
    /// the cone with the extended kernel.
    #[arg(long)]
    no_fallback: bool,
    /// Relative snap tolerance of the inexact kernel.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
}

impl EngineArgs {
    fn spec(&self, algorithm: Algorithm) -> Result<RunSpec> {
        spec_of(algorithm, self.kernel, self.k, self, self.threads)
    }
}

fn spec_of(algorithm: Algorithm, kernel: KernelMode, k: usize, e: &EngineArgs, threads: usize) -> Result<RunSpec> {
    if k < 2 {
        return usage(format!("--k must be at least 2, got {k}"));
    }
    if threads == 0 {
        return usage("--threads must be at least 1");
    }
    if !(e.time_limit > 0.0 && e.time_limit.is_finite()) {
        return usage(format!("--time-limit must be a positive number of seconds, got {}", e.time_limit));
    }
    if !(e.epsilon >= 0.0 && e.epsilon.is_finite()) {
        return usage(format!("--epsilon must be finite and non-negative, got {}", e.epsilon));
    }
    Ok(RunSpec {
        algorithm,
        kernel: KernelConfig { mode: kernel, epsilon: e.epsilon },
        k,
        threads,
        time_limit: Duration::from_secs_f64(e.time_limit),
        fallback: !e.no_fallback,
    })
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Point file to write.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[arg(long, default_value = "sweepline")]
    algorithm: Algorithm,
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Edge file to write.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Stats CSV to write.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Edge file to compare; give it twice to compare two files.
    #[arg(long)]
    edges: Vec<PathBuf>,
    /// Algorithm building the first graph when no edge file is given
    /// [default: sweepline].
    #[arg(long)]
    algorithm: Option<Algorithm>,
    /// Algorithm building the graph the first one is compared with.
    #[arg(long, default_value = "naive")]
    against: Algorithm,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "sweepline")]
    algorithm: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "inexact")]
    kernel: Vec<KernelMode>,
    #[arg(long, value_delimiter = ',', default_value = "uniform")]
    dist: Vec<Distribution>,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "6")]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
    seed: Vec<u64>,
    /// Worker threads inside each run; 1 keeps timings sequential.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Time limit per cell, in seconds.
    #[arg(long, default_value_t = 1800.0)]
    time_limit: f64,
    #[arg(long)]
    no_fallback: bool,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Run cells concurrently. Timings then include contention.
    #[arg(long)]
    parallel_cells: bool,
    /// Stats CSV to write.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Stats CSV to chart; one SVG per metric goes into the --output directory.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Edge file to draw; without it the graph is built.
    #[arg(long)]
    edges: Option<PathBuf>,
    #[arg(long, default_value = "sweepline")]
    algorithm: Algorithm,
    #[command(flatten)]
    engine: EngineArgs,
    /// Chart directory, or SVG file for a graph drawing.
    #[arg(long)]
    output: PathBuf,
}

/// Bad flag combination or value; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage<T>(message: impl Into<String>) -> Result<T> {
    Err(UsageError(message.into()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

/// Sizes the global rayon pool, which sweepline passes and the baselines use.
fn init_threads(threads: usize) -> Result<()> {
    if threads > 1 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().context("thread pool")?;
    }
    Ok(())
}

/// Returns whether the command succeeded.
fn dispatch(command: Command) -> Result<bool> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Build(a) => {
            init_threads(a.engine.threads)?;
            cmd_build(a)
        }
        Command::Verify(a) => {
            init_threads(a.engine.threads)?;
            cmd_verify(a)
        }
        Command::Bench(a) => {
            init_threads(a.threads)?;
            cmd_bench(a)
        }
        Command::Plot(a) => cmd_plot(a),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<bool> {
    if a.input.input.is_some() {
        return usage("generate takes --dist, --n and --seed, not --input");
    }
    let input = a.input.load()?;
    io::write_points(&input.points, &a.output)?;
    eprintln!("wrote {} points ({}) to {}", input.points.len(), input.distribution, a.output.display());
    Ok(true)
}

fn label_of(spec: &RunSpec, input: &Input) -> RunLabel {
    RunLabel {
        algorithm: spec.algorithm.name().into(),
        kernel: spec.kernel.mode,
        distribution: input.distribution.clone(),
        n: input.points.len(),
        k: spec.k,
        seed: input.seed,
    }
}

fn total_millis<'a>(records: impl IntoIterator<Item = &'a StatsRecord>) -> f64 {
    records.into_iter().filter_map(|r| r.wall_time_nanos).sum::<u64>() as f64 / 1e6
}

fn fallback_cones(records: &[StatsRecord]) -> Vec<usize> {
    records.iter().filter(|r| r.fallback).filter_map(|r| r.cone_index).collect()
}

fn cmd_build(a: BuildArgs) -> Result<bool> {
    let spec = a.engine.spec(a.algorithm)?;
    let input = a.input.load()?;
    let outcome = run::run(&input.points, &spec, &label_of(&spec, &input))?;
    if let Some(path) = &a.stats {
        io::write_stats(outcome.records(), path)?;
    }
    let (graph, sweep) = match outcome {
        Outcome::TimedOut { .. } => {
            eprintln!("DNF: {} did not finish within {:?}", spec.algorithm, spec.time_limit);
            return Ok(false);
        }
        Outcome::Done { graph, sweep, records } => {
            eprintln!(
                "{}: n={} k={} edges={} time={:.3} ms",
                graph.provenance,
                graph.n,
                graph.k,
                graph.edges.len(),
                total_millis(&records)
            );
            let fallback = fallback_cones(&records);
            if !fallback.is_empty() {
                eprintln!("fallback: cones {fallback:?} were rerun with the extended kernel");
            }
            (graph, sweep)
        }
    };
    if let Some(path) = &a.output {
        io::write_edges(&graph, path)?;
    }
    if let Some(out) = &sweep {
        check_event_bound(&out.stats)?;
    }
    Ok(true)
}

struct CompareVisitor<'a> {
    points: &'a [Point],
    first: &'a YaoGraph,
    second: &'a YaoGraph,
}

impl KernelVisitor for CompareVisitor<'_> {
    type Output = Result<(Vec<Mismatch>, Vec<Violation>), GraphError>;

    fn visit<K: Kernel>(self, kernel: &K) -> Self::Output {
        let mismatches = compare_graphs(self.first, self.second, self.points, kernel)?;
        let mut violations = check_invariants(self.first, self.points, kernel);
        violations.extend(check_invariants(self.second, self.points, kernel));
        Ok((mismatches, violations))
    }
}

fn read_edge_file(path: &Path, kernel: KernelMode) -> Result<YaoGraph> {
    let provenance = Provenance { algorithm: path.display().to_string(), kernel };
    Ok(io::read_edges(path, provenance)?)
}

/// Builds a graph for verification, failing on a time out.
fn build_for_verify(input: &Input, spec: &RunSpec) -> Result<(YaoGraph, Option<yaograph::sweep::SweepOutput>)> {
    match run::run(&input.points, spec, &label_of(spec, input))? {
        Outcome::Done { graph, sweep, .. } => Ok((graph, sweep)),
        Outcome::TimedOut { .. } => bail!("{} did not finish within {:?}", spec.algorithm, spec.time_limit),
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    if a.edges.len() > 2 {
        return usage("verify compares at most two edge files");
    }
    if a.edges.len() == 2 && a.algorithm.is_some() {
        return usage("--algorithm has no effect with two edge files");
    }
    let input = a.input.load()?;
    let kernel = a.engine.kernel;
    let mut graphs: Vec<YaoGraph> = a.edges.iter().map(|p| read_edge_file(p, kernel)).collect::<Result<_>>()?;
    // cone count of the built graphs follows the edge file, if any
    let k = graphs.first().map_or(a.engine.k, |g| g.k);
    let mut sweep = None;
    if graphs.is_empty() {
        let spec = spec_of(a.algorithm.unwrap_or(Algorithm::Sweepline), kernel, k, &a.engine, a.engine.threads)?;
        let (g, s) = build_for_verify(&input, &spec)?;
        graphs.push(g);
        sweep = s;
    }
    if graphs.len() == 1 {
        let spec = spec_of(a.against, kernel, k, &a.engine, a.engine.threads)?;
        graphs.push(build_for_verify(&input, &spec)?.0);
    }
    let (first, second) = (&graphs[0], &graphs[1]);
    let (mismatches, violations) = match &sweep {
        // a sweep with fallback cones is judged per cone by the kernel that finished it
        Some(out) if a.against == Algorithm::Naive => {
            let report = check_against_naive(&input.points, out, a.engine.epsilon, a.engine.threads).context("incomparable graphs")?;
            (report.mismatches, report.violations)
        }
        _ => {
            let config = KernelConfig { mode: kernel, epsilon: a.engine.epsilon };
            with_kernel(&config, CompareVisitor { points: &input.points, first, second }).context("incomparable graphs")?
        }
    };
    println!(
        "{} vs {}: n={} k={} edges {} / {}, {} mismatch(es), {} violation(s)",
        first.provenance,
        second.provenance,
        first.n,
        first.k,
        first.edges.len(),
        second.edges.len(),
        mismatches.len(),
        violations.len()
    );
    for m in mismatches.iter().take(MAX_LISTED) {
        println!("mismatch {m}");
    }
    if mismatches.len() > MAX_LISTED {
        println!("... and {} more", mismatches.len() - MAX_LISTED);
    }
    for v in violations.iter().take(MAX_LISTED) {
        println!("violation {v:?}");
    }
    Ok(mismatches.is_empty() && violations.is_empty())
}

/// One cell of a bench matrix.
#[derive(Clone, Copy, Debug)]
struct Cell {
    algorithm: Algorithm,
    kernel: KernelMode,
    dist: Distribution,
    n: usize,
    k: usize,
    seed: u64,
}

struct CellResult {
    records: Vec<StatsRecord>,
    error: Option<String>,
}

fn run_cell(cell: &Cell, engine: &EngineArgs) -> CellResult {
    let spec = GeneratorSpec { distribution: cell.dist, n: cell.n, seed: cell.seed };
    let input = Input { points: io::generate(&spec), distribution: cell.dist.label(), seed: Some(cell.seed) };
    let result = spec_of(cell.algorithm, cell.kernel, cell.k, engine, engine.threads).and_then(|rs| {
        let outcome = run::run(&input.points, &rs, &label_of(&rs, &input))?;
        let bound = match &outcome {
            Outcome::Done { sweep: Some(out), .. } => check_event_bound(&out.stats).err().map(|e| e.to_string()),
            _ => None,
        };
        Ok((outcome, bound))
    });
    match result {
        Ok((outcome, bound)) => {
            let records = match outcome {
                Outcome::Done { records, .. } | Outcome::TimedOut { records } => records,
            };
            CellResult { records, error: bound }
        }
        Err(e) => CellResult { records: Vec::new(), error: Some(format!("{e:#}")) },
    }
}

/// Per-run aggregates of stats rows.
#[derive(Clone, Debug, Default)]
struct RunSummary {
    millis: f64,
    /// Mean over cones of `(nIntersection + nDeletion) / n`.
    events_per_point: Option<f64>,
    max_dynamic_queue: Option<usize>,
    max_sweepline_size: Option<usize>,
}

/// Key of one run within a stats file.
type RunKey = (String, KernelMode, String, usize, usize, Option<u64>);

/// Groups rows into runs; DNF runs map to `None`.
fn summarize(records: &[StatsRecord]) -> BTreeMap<RunKey, Option<RunSummary>> {
    let mut rows: BTreeMap<RunKey, Vec<&StatsRecord>> = BTreeMap::new();
    for r in records {
        // fallback rows belong to the inexact run that requested them
        let kernel = if r.fallback { KernelMode::Inexact } else { r.kernel };
        rows.entry((r.algorithm.clone(), kernel, r.distribution.clone(), r.n, r.k, r.seed)).or_default().push(r);
    }
    rows.into_iter()
        .map(|(key, rs)| {
            if rs.iter().any(|r| r.wall_time_nanos.is_none()) {
                return (key, None);
            }
            let n = key.3.max(1) as f64;
            let counters: Vec<_> = rs.iter().filter_map(|r| r.counters).collect();
            let s = RunSummary {
                millis: total_millis(rs.iter().copied()),
                events_per_point: (!counters.is_empty())
                    .then(|| counters.iter().map(|c| (c.n_intersection + c.n_deletion) as f64 / n).sum::<f64>() / counters.len() as f64),
                max_dynamic_queue: counters.iter().map(|c| c.max_dynamic_queue).max(),
                max_sweepline_size: counters.iter().map(|c| c.max_sweepline_size).max(),
            };
            (key, Some(s))
        })
        .collect()
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Seed-averaged values of one configuration.
struct ConfigSummary {
    runs: usize,
    dnf: usize,
    millis: Option<f64>,
    events_per_point: Option<f64>,
    max_dynamic_queue: Option<f64>,
    max_sweepline_size: Option<f64>,
}

/// Key without the seed.
type ConfigKey = (String, KernelMode, String, usize, usize);

fn by_config(runs: &BTreeMap<RunKey, Option<RunSummary>>) -> BTreeMap<ConfigKey, ConfigSummary> {
    let mut groups: BTreeMap<ConfigKey, Vec<&Option<RunSummary>>> = BTreeMap::new();
    for ((alg, kernel, dist, n, k, _), s) in runs {
        groups.entry((alg.clone(), *kernel, dist.clone(), *n, *k)).or_default().push(s);
    }
    groups
        .into_iter()
        .map(|(key, ss)| {
            let done: Vec<&RunSummary> = ss.iter().filter_map(|s| s.as_ref()).collect();
            let pick = |f: &dyn Fn(&RunSummary) -> Option<f64>| mean(&done.iter().filter_map(|s| f(s)).collect::<Vec<_>>());
            let summary = ConfigSummary {
                runs: ss.len(),
                dnf: ss.len() - done.len(),
                millis: pick(&|s| Some(s.millis)),
                events_per_point: pick(&|s| s.events_per_point),
                max_dynamic_queue: pick(&|s| s.max_dynamic_queue.map(|v| v as f64)),
                max_sweepline_size: pick(&|s| s.max_sweepline_size.map(|v| v as f64)),
            };
            (key, summary)
        })
        .collect()
}

fn cmd_bench(a: BenchArgs) -> Result<bool> {
    let engine = EngineArgs {
        kernel: KernelMode::Inexact,
        k: 6,
        threads: a.threads,
        time_limit: a.time_limit,
        no_fallback: a.no_fallback,
        epsilon: a.epsilon,
    };
    let mut cells = Vec::new();
    for &algorithm in &a.algorithm {
        for &kernel in &a.kernel {
            for &dist in &a.dist {
                for &n in &a.n {
                    for &k in &a.k {
                        for &seed in &a.seed {
                            cells.push(Cell { algorithm, kernel, dist, n, k, seed });
                        }
                    }
                }
            }
        }
    }
    // validate once up front so a bad flag is a usage error, not a cell error
    for &k in &a.k {
        spec_of(Algorithm::Sweepline, KernelMode::Inexact, k, &engine, engine.threads)?;
    }
    let show = |c: &Cell, r: &CellResult| {
        let status = match (&r.error, r.records.iter().any(|x| x.wall_time_nanos.is_none())) {
            (Some(e), _) => format!("FAILED: {e}"),
            (None, true) => "DNF".to_string(),
            (None, false) => format!("{:.3} ms", total_millis(&r.records)),
        };
        eprintln!("{} {} {} n={} k={} seed={}: {status}", c.algorithm, c.kernel, c.dist, c.n, c.k, c.seed);
    };
    let results: Vec<CellResult> = if a.parallel_cells {
        let rs: Vec<CellResult> = cells.par_iter().map(|c| run_cell(c, &engine)).collect();
        cells.iter().zip(&rs).for_each(|(c, r)| show(c, r));
        rs
    } else {
        cells
            .iter()
            .map(|c| {
                let r = run_cell(c, &engine);
                show(c, &r);
                r
            })
            .collect()
    };
    let records: Vec<StatsRecord> = results.iter().flat_map(|r| r.records.iter().cloned()).collect();
    if let Some(path) = &a.stats {
        io::write_stats(&records, path)?;
        eprintln!("wrote {} stats rows to {}", records.len(), path.display());
    }
    println!(
        "{:<10} {:<9} {:<34} {:>9} {:>4} {:>5} {:>13} {:>13} {:>10} {:>10} {:>10}",
        "algorithm", "kernel", "distribution", "n", "k", "runs", "mean ms", "ms/(n log2 n)", "events/pt", "maxQueue", "maxSweep"
    );
    let fmt = |v: Option<f64>, p: usize| v.map_or("-".to_string(), |v| format!("{v:.p$}"));
    for ((alg, kernel, dist, n, k), s) in by_config(&summarize(&records)) {
        let per = s.millis.map(|m| m / (n as f64 * (n.max(2) as f64).log2()));
        let runs = if s.dnf > 0 { format!("{}dnf", s.dnf) } else { s.runs.to_string() };
        println!(
            "{alg:<10} {:<9} {dist:<34} {n:>9} {k:>4} {runs:>5} {:>13} {:>13} {:>10} {:>10} {:>10}",
            kernel.name(),
            fmt(s.millis, 3),
            fmt(per, 7),
            fmt(s.events_per_point, 3),
            fmt(s.max_dynamic_queue, 1),
            fmt(s.max_sweepline_size, 1)
        );
    }
    let failures: Vec<&String> = results.iter().filter_map(|r| r.error.as_ref()).collect();
    if !failures.is_empty() {
        eprintln!("{} cell(s) failed", failures.len());
        return Ok(false);
    }
    Ok(true)
}

/// Chart file stem, title and y label of each metric.
const METRICS: [(&str, &str, &str); 5] = [
    ("time", "Running time", "ms"),
    ("time_per_nlogn", "Running time / (n log2 n)", "ms"),
    ("events_per_point", "Intersection and deletion events per point and cone", "events / n"),
    ("max_dynamic_queue", "Largest dynamic queue", "events"),
    ("max_sweepline_size", "Largest sweepline", "boundaries"),
];

fn metric_value(metric: &str, n: usize, s: &ConfigSummary) -> Option<f64> {
    match metric {
        "time" => s.millis,
        "time_per_nlogn" => s.millis.map(|m| m / (n as f64 * (n.max(2) as f64).log2())),
        "events_per_point" => s.events_per_point,
        "max_dynamic_queue" => s.max_dynamic_queue,
        _ => s.max_sweepline_size,
    }
}

fn plot_stats(path: &Path, dir: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim().is_empty() {
        bail!("stats file {} is empty", path.display());
    }
    let records = io::read_stats(path)?;
    if records.is_empty() {
        bail!("stats file {} has no rows", path.display());
    }
    let configs = by_config(&summarize(&records));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (stem, title, y_label) in METRICS {
        let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
        for ((alg, kernel, dist, n, k), s) in &configs {
            if let Some(v) = metric_value(stem, *n, s) {
                series.entry(format!("{alg}/{kernel} {dist} k={k}")).or_default().push((*n as f64, v));
            }
        }
        let series: Vec<Series> = series.into_iter().map(|(name, points)| Series { name, points }).collect();
        let out = dir.join(format!("{stem}.svg"));
        std::fs::write(&out, log_log_svg(title, "n", y_label, &series)).with_context(|| format!("writing {}", out.display()))?;
        eprintln!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_plot(a: PlotArgs) -> Result<bool> {
    match &a.stats {
        Some(stats) => {
            if a.input.is_given() || a.edges.is_some() {
                return usage("--stats cannot be combined with point or edge inputs");
            }
            plot_stats(stats, &a.output)?;
        }
        None => {
            let input = a.input.load()?;
            let graph = match &a.edges {
                Some(path) => read_edge_file(path, a.engine.kernel)?,
                None => build_for_verify(&input, &a.engine.spec(a.algorithm)?)?.0,
            };
            if graph.n != input.points.len() {
                bail!("edge file has {} points but {} were given", graph.n, input.points.len());
            }
            io::write_svg(&input.points, Some(&graph), &a.output)?;
            eprintln!("wrote {}", a.output.display());
        }
    }
    Ok(true)
}
