//! Yao graph representation and analyses: oracle comparison modulo ties,
//! structural invariants and stretch factors.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::alt::cone_index_of;
use crate::kernel::{Kernel, KernelMode, Point};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("incomparable: graphs have (n, k) = ({n1}, {k1}) and ({n2}, {k2})")]
    Incomparable { n1: usize, k1: usize, n2: usize, k2: usize },
    #[error("incomparable: graph has {graph} points but {points} were given")]
    PointCountMismatch { graph: usize, points: usize },
}

/// Directed edge `source -> target` found in cone `cone` of `source`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub cone: usize,
}

/// Which algorithm and kernel produced a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub algorithm: String,
    pub kernel: KernelMode,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.algorithm, self.kernel)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YaoGraph {
    pub n: usize,
    pub k: usize,
    /// Sorted by `(source, cone)`.
    pub edges: Vec<Edge>,
    pub provenance: Provenance,
}

impl YaoGraph {
    /// Builds a graph, putting the edges in canonical `(source, cone)` order.
    pub fn new(n: usize, k: usize, mut edges: Vec<Edge>, provenance: Provenance) -> Self {
        edges.sort_unstable_by_key(|e| (e.source, e.cone, e.target));
        Self { n, k, edges, provenance }
    }

    /// Dense `(source, cone) -> target` table.
    pub fn target_table(&self) -> Vec<Option<usize>> {
        let mut t = vec![None; self.n * self.k];
        for e in &self.edges {
            t[e.source * self.k + e.cone] = Some(e.target);
        }
        t
    }

    pub fn target(&self, source: usize, cone: usize) -> Option<usize> {
        let i = self.edges.partition_point(|e| (e.source, e.cone) < (source, cone));
        self.edges.get(i).filter(|e| e.source == source && e.cone == cone).map(|e| e.target)
    }

    pub fn out_degree(&self, source: usize) -> usize {
        let lo = self.edges.partition_point(|e| e.source < source);
        let hi = self.edges.partition_point(|e| e.source <= source);
        hi - lo
    }
}

/// A `(source, cone)` slot where two graphs disagree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub source: usize,
    pub cone: usize,
    pub first: Option<usize>,
    pub second: Option<usize>,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |t: Option<usize>| t.map_or("-".to_string(), |t| t.to_string());
        write!(f, "source {} cone {}: {} vs {}", self.source, self.cone, show(self.first), show(self.second))
    }
}

/// Lists every `(source, cone)` where one graph has an edge and the other
/// does not, or where the two targets lie at different distances.
pub fn compare_graphs<K: Kernel>(g1: &YaoGraph, g2: &YaoGraph, points: &[Point], kernel: &K) -> Result<Vec<Mismatch>, GraphError> {
    if g1.n != g2.n || g1.k != g2.k {
        return Err(GraphError::Incomparable { n1: g1.n, k1: g1.k, n2: g2.n, k2: g2.k });
    }
    if points.len() != g1.n {
        return Err(GraphError::PointCountMismatch { graph: g1.n, points: points.len() });
    }
    let (t1, t2) = (g1.target_table(), g2.target_table());
    let k = g1.k;
    Ok((0..t1.len())
        .filter_map(|slot| {
            let (a, b) = (t1[slot], t2[slot]);
            let (source, cone) = (slot / k, slot % k);
            let same = match (a, b) {
                (None, None) => true,
                (Some(a), Some(b)) => {
                    a == b || kernel.compare_distance(points[source].pos(), points[a].pos(), points[b].pos()) == Ordering::Equal
                }
                _ => false,
            };
            (!same).then_some(Mismatch { source, cone, first: a, second: b })
        })
        .collect())
}

/// A structural defect of a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateSlot { source: usize, cone: usize },
    SelfLoop { source: usize },
    WrongCone { edge: Edge, actual: usize },
    OutOfRange { edge: Edge },
}

/// Checks out-degree per cone, absence of self loops and cone membership
/// (with exact predicates).
pub fn check_invariants<K: Kernel>(g: &YaoGraph, points: &[Point], kernel: &K) -> Vec<Violation> {
    let mut out = Vec::new();
    for (i, e) in g.edges.iter().enumerate() {
        if e.source >= g.n || e.target >= g.n || e.cone >= g.k || e.source >= points.len() || e.target >= points.len() {
            out.push(Violation::OutOfRange { edge: *e });
            continue;
        }
        if i > 0 && (g.edges[i - 1].source, g.edges[i - 1].cone) == (e.source, e.cone) {
            out.push(Violation::DuplicateSlot { source: e.source, cone: e.cone });
        }
        if e.source == e.target {
            out.push(Violation::SelfLoop { source: e.source });
            continue;
        }
        let actual = cone_index_of(&points[e.source], &points[e.target], g.k, kernel).expect("distinct points");
        if actual != e.cone {
            out.push(Violation::WrongCone { edge: *e, actual });
        }
    }
    out
}

/// Upper bound `1 / (1 - 2 sin(π/k))` on the stretch factor, defined for `k > 6`.
pub fn stretch_bound(k: usize) -> Option<f64> {
    (k > 6).then(|| 1.0 / (1.0 - 2.0 * (PI / k as f64).sin()))
}

/// Which ordered pairs a stretch computation looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSampling {
    /// Every ordered pair.
    All,
    /// All targets from `sources` random sources.
    Sources { sources: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StretchReport {
    pub max_stretch: f64,
    pub witness: Option<(usize, usize)>,
    pub bound: Option<f64>,
    pub pairs: usize,
    pub unreachable: usize,
}

impl StretchReport {
    pub fn within_bound(&self) -> Option<bool> {
        self.bound.map(|b| self.unreachable == 0 && self.max_stretch <= b * (1.0 + 1e-9))
    }
}

#[derive(PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Dist {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0)
    }
}

fn dijkstra(offsets: &[usize], adj: &[(usize, f64)], source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; offsets.len() - 1];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Dist(0.0), source)));
    while let Some(Reverse((Dist(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[offsets[u]..offsets[u + 1]] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Dist(nd), v)));
            }
        }
    }
    dist
}

/// Maximum over the sampled ordered pairs `(u, v)` of the shortest directed
/// path length divided by `|uv|`. Unreachable pairs are counted separately.
pub fn stretch_factor(g: &YaoGraph, points: &[Point], sampling: PairSampling) -> StretchReport {
    let n = g.n;
    let mut offsets = vec![0usize; n + 1];
    for e in &g.edges {
        offsets[e.source + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    // edges are sorted by source, so they are already grouped
    let adj: Vec<(usize, f64)> =
        g.edges.iter().map(|e| (e.target, (points[e.target].pos() - points[e.source].pos()).norm2().sqrt())).collect();
    let sources: Vec<usize> = match sampling {
        PairSampling::All => (0..n).collect(),
        PairSampling::Sources { sources, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = sample(&mut rng, n, sources.min(n)).into_vec();
            s.sort_unstable();
            s
        }
    };
    // (stretch, witness pair, pairs, unreachable pairs) per source
    type SourceStretch = (f64, Option<(usize, usize)>, usize, usize);
    let per_source: Vec<SourceStretch> = sources
        .par_iter()
        .map(|&u| {
            let dist = dijkstra(&offsets, &adj, u);
            let (mut best, mut witness, mut pairs, mut unreachable) = (1.0f64, None, 0, 0);
            for v in (0..n).filter(|&v| v != u) {
                pairs += 1;
                if dist[v].is_infinite() {
                    unreachable += 1;
                    continue;
                }
                let direct = (points[v].pos() - points[u].pos()).norm2().sqrt();
                let t = dist[v] / direct;
                if witness.is_none() || t > best {
                    best = t;
                    witness = Some((u, v));
                }
            }
            (best, witness, pairs, unreachable)
        })
        .collect();
    let mut report = StretchReport { max_stretch: 1.0, witness: None, bound: stretch_bound(g.k), pairs: 0, unreachable: 0 };
    for (t, w, p, u) in per_source {
        report.pairs += p;
        report.unreachable += u;
        if w.is_some() && (report.witness.is_none() || t > report.max_stretch) {
            report.max_stretch = t;
            report.witness = w;
        }
    }
    report
}
