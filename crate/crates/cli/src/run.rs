//! Running one algorithm on one point set under a time limit.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use yaograph::alt::{grid_yao_until, naive_yao_until, TimedOut};
use yaograph::io::{RunLabel, StatsRecord};
use yaograph::kernel::{with_kernel, Kernel, KernelVisitor};
use yaograph::sweep::{build_yao_graph_sweepline_with, PassStats, SweepError, SweepOptions, SweepOutput};
use yaograph::{KernelConfig, Point, YaoGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Sweepline,
    Grid,
    Naive,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Sweepline => "sweepline",
            Algorithm::Grid => "grid",
            Algorithm::Naive => "naive",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sweepline" => Ok(Algorithm::Sweepline),
            "grid" => Ok(Algorithm::Grid),
            "naive" => Ok(Algorithm::Naive),
            other => Err(format!("unknown algorithm {other:?} (expected sweepline, grid or naive)")),
        }
    }
}

/// Everything that selects how a graph is built.
#[derive(Clone, Copy, Debug)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub kernel: KernelConfig,
    pub k: usize,
    /// Worker threads; 1 runs sequentially.
    pub threads: usize,
    pub time_limit: Duration,
    pub fallback: bool,
}

pub enum Outcome {
    Done {
        graph: YaoGraph,
        /// Present for sweepline runs.
        sweep: Option<SweepOutput>,
        records: Vec<StatsRecord>,
    },
    /// The time limit passed; `records` holds the DNF row.
    TimedOut { records: Vec<StatsRecord> },
}

impl Outcome {
    pub fn records(&self) -> &[StatsRecord] {
        match self {
            Outcome::Done { records, .. } | Outcome::TimedOut { records } => records,
        }
    }
}

struct BaselineVisitor<'a> {
    points: &'a [Point],
    spec: &'a RunSpec,
    deadline: Instant,
}

impl KernelVisitor for BaselineVisitor<'_> {
    type Output = Result<YaoGraph, TimedOut>;

    fn visit<K: Kernel>(self, kernel: &K) -> Self::Output {
        // the baselines take 0 for "use the ambient rayon pool"
        let threads = if self.spec.threads == 1 { 1 } else { 0 };
        let deadline = Some(self.deadline);
        match self.spec.algorithm {
            Algorithm::Naive => naive_yao_until(self.points, self.spec.k, kernel, threads, deadline),
            _ => grid_yao_until(self.points, self.spec.k, kernel, threads, deadline).map(|o| o.graph),
        }
    }
}

/// Builds the graph of `points`. Sweepline cone passes run in parallel when
/// `threads > 1`, on the ambient rayon pool.
pub fn run(points: &[Point], spec: &RunSpec, label: &RunLabel) -> Result<Outcome> {
    let start = Instant::now();
    let deadline = start + spec.time_limit;
    let dnf = || Ok(Outcome::TimedOut { records: vec![label.dnf()] });
    match spec.algorithm {
        Algorithm::Sweepline => {
            let opts = SweepOptions { kernel: spec.kernel, parallel: spec.threads > 1, fallback: spec.fallback, deadline: Some(deadline) };
            match build_yao_graph_sweepline_with(points, spec.k, &opts) {
                Ok(out) => {
                    let records = label.per_cone(&out.stats);
                    Ok(Outcome::Done { graph: out.graph.clone(), sweep: Some(out), records })
                }
                Err(SweepError::Timeout { .. }) => dnf(),
                Err(e) => Err(e.into()),
            }
        }
        Algorithm::Grid | Algorithm::Naive => match with_kernel(&spec.kernel, BaselineVisitor { points, spec, deadline }) {
            Ok(graph) => {
                let nanos = u64::try_from(start.elapsed().as_nanos()).unwrap_or(u64::MAX);
                Ok(Outcome::Done { graph, sweep: None, records: vec![label.whole_run(nanos)] })
            }
            Err(TimedOut) => dnf(),
        },
    }
}

/// Fails if any pass exceeds the per-pass event bound.
pub fn check_event_bound(stats: &[PassStats]) -> Result<()> {
    let bad: Vec<&PassStats> = stats.iter().filter(|s| !s.within_event_bound()).collect();
    if let Some(s) = bad.first() {
        bail!(
            "event bound violated in {} pass(es); first: cone {} sub-wedge {} with n={} nIntersection={} nDeletion={}",
            bad.len(),
            s.cone,
            s.sub_wedge,
            s.n_input,
            s.n_intersection,
            s.n_deletion
        );
    }
    Ok(())
}
