//! The two reference algorithms: the all-pairs baseline (also the oracle for
//! every test) and a uniform grid searched in rings around each point.
//!
//! Both identify points by their position in the input slice and break
//! distance ties towards the smaller id.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Edge, Provenance, YaoGraph};
use crate::kernel::{turn_direction, Kernel, KernelError, Point, Vec2};

/// Exact-direction cone boundaries for a fixed `k`.
#[derive(Clone, Debug)]
pub struct ConeTable {
    k: usize,
    dirs: Vec<Vec2>,
}

impl ConeTable {
    pub fn new(k: usize) -> Self {
        assert!(k >= 2, "a Yao graph needs at least two cones");
        Self { k, dirs: (0..=k).map(|i| turn_direction(i as u64, k as u64)).collect() }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Cone of `p` containing `q != p`: guessed from `atan2`, then confirmed
    /// with side-of-line tests against the cone boundaries.
    pub fn index_of<K: Kernel>(&self, p: Vec2, q: Vec2, kernel: &K) -> usize {
        let (k, d) = (self.k, q - p);
        let guess = ((d.y.atan2(d.x).rem_euclid(TAU) * k as f64 / TAU) as usize).min(k - 1);
        for i in [guess, (guess + 1) % k, (guess + k - 1) % k] {
            if kernel.in_angular_range_of(self.dirs[i], self.dirs[i + 1], p, q) {
                return i;
            }
        }
        (0..k).find(|&i| kernel.in_angular_range_of(self.dirs[i], self.dirs[i + 1], p, q)).expect("cones cover every direction")
    }
}

/// Cone `i` of `p` with `q` in `[2iπ/k, 2(i+1)π/k)`.
pub fn cone_index_of<K: Kernel>(p: &Point, q: &Point, k: usize, kernel: &K) -> Result<usize, KernelError> {
    if q.pos() == p.pos() {
        return Err(KernelError::CoincidentPoints);
    }
    if k < 2 {
        return Err(KernelError::InvalidCone { k, i: 0 });
    }
    Ok(ConeTable::new(k).index_of(p.pos(), q.pos(), kernel))
}

/// Whether `q` beats the current candidate `best` for `p`.
#[inline]
fn improves<K: Kernel>(kernel: &K, points: &[Point], p: Vec2, q: usize, best: Option<usize>) -> bool {
    match best {
        None => true,
        Some(b) => match kernel.compare_distance(p, points[q].pos(), points[b].pos()) {
            Ordering::Less => true,
            Ordering::Equal => q < b,
            Ordering::Greater => false,
        },
    }
}

fn naive_point<K: Kernel>(points: &[Point], table: &ConeTable, kernel: &K, s: usize, best: &mut [Option<usize>], best_d2: &mut [f64]) {
    best.fill(None);
    best_d2.fill(f64::INFINITY);
    let p = points[s].pos();
    // Largest current candidate distance; only meaningful once every cone has
    // a candidate, and then used to skip pairs that cannot improve any cone.
    let mut worst = f64::INFINITY;
    let mut filled = 0;
    // The slack keeps pairs the kernel may still call a tie (snapped in
    // inexact mode, exact otherwise) from being filtered out.
    let slack = 1.0 + 4.0 * kernel.config().epsilon + 1e-12;
    for (q, pt) in points.iter().enumerate() {
        let d = pt.pos() - p;
        let d2 = d.norm2();
        if d2 > worst * slack || q == s {
            continue;
        }
        let i = table.index_of(p, pt.pos(), kernel);
        if improves(kernel, points, p, q, best[i]) {
            if best[i].is_none() {
                filled += 1;
            }
            best[i] = Some(q);
            best_d2[i] = d2;
            if filled == best.len() {
                worst = best_d2.iter().copied().fold(0.0, f64::max);
            }
        }
    }
}

/// A deadline passed before the graph was complete.
#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("time limit exceeded")]
pub struct TimedOut;

/// Whether point `s` should give up; the clock is read every 64 points.
#[inline]
fn expired(deadline: Option<Instant>, s: usize) -> bool {
    s.is_multiple_of(64) && deadline.is_some_and(|d| Instant::now() > d)
}

/// All-pairs Yao graph. `threads == 1` runs sequentially, `0` uses the
/// global thread pool.
pub fn naive_yao<K: Kernel>(points: &[Point], k: usize, kernel: &K, threads: usize) -> YaoGraph {
    naive_yao_until(points, k, kernel, threads, None).expect("no deadline")
}

/// [`naive_yao`] that stops once `deadline` has passed.
pub fn naive_yao_until<K: Kernel>(
    points: &[Point],
    k: usize,
    kernel: &K,
    threads: usize,
    deadline: Option<Instant>,
) -> Result<YaoGraph, TimedOut> {
    let table = ConeTable::new(k);
    let run = |s: usize, best: &mut Vec<Option<usize>>, d2: &mut Vec<f64>| {
        if expired(deadline, s) {
            return None;
        }
        naive_point(points, &table, kernel, s, best, d2);
        Some(best.iter().enumerate().filter_map(|(cone, t)| t.map(|target| Edge { source: s, target, cone })).collect::<Vec<_>>())
    };
    let per_point: Option<Vec<Vec<Edge>>> = if threads == 1 {
        let (mut best, mut d2) = (vec![None; k], vec![0.0; k]);
        (0..points.len()).map(|s| run(s, &mut best, &mut d2)).collect()
    } else {
        in_pool(threads, || {
            (0..points.len()).into_par_iter().map_init(|| (vec![None; k], vec![0.0; k]), |(best, d2), s| run(s, best, d2)).collect()
        })
    };
    let edges = per_point.ok_or(TimedOut)?.into_iter().flatten().collect();
    Ok(YaoGraph::new(points.len(), k, edges, Provenance { algorithm: "naive".into(), kernel: kernel.config().mode }))
}

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool").install(f)
}

/// `cells_per_side²` equal cells over the bounding box, with points stored
/// per cell in row-major order (row = y index).
#[derive(Clone, Debug)]
pub struct UniformGrid {
    pub min: Vec2,
    pub max: Vec2,
    pub cells_per_side: usize,
    cell_w: f64,
    cell_h: f64,
    starts: Vec<usize>,
    ids: Vec<usize>,
}

impl UniformGrid {
    pub fn build(points: &[Point]) -> Self {
        assert!(!points.is_empty(), "grid over an empty point set");
        let cps = (points.len() as f64).sqrt().ceil() as usize;
        let cps = if cps * cps < points.len() { cps + 1 } else { cps.max(1) };
        let mut min = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut max = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in points {
            min = Vec2::new(min.x.min(p.x), min.y.min(p.y));
            max = Vec2::new(max.x.max(p.x), max.y.max(p.y));
        }
        // widen degenerate axes by one unit in the last place of the extent
        let widen = |lo: f64, hi: f64| if hi > lo { hi } else { hi + f64::EPSILON * hi.abs().max(1.0) };
        let max = Vec2::new(widen(min.x, max.x), widen(min.y, max.y));
        let mut g = Self {
            min,
            max,
            cells_per_side: cps,
            cell_w: (max.x - min.x) / cps as f64,
            cell_h: (max.y - min.y) / cps as f64,
            starts: vec![0; cps * cps + 1],
            ids: vec![0; points.len()],
        };
        let cells: Vec<usize> = points.iter().map(|p| g.cell_index(g.cell_of(p.pos()))).collect();
        for &c in &cells {
            g.starts[c + 1] += 1;
        }
        for c in 0..cps * cps {
            g.starts[c + 1] += g.starts[c];
        }
        let mut fill = g.starts.clone();
        for (id, &c) in cells.iter().enumerate() {
            g.ids[fill[c]] = id;
            fill[c] += 1;
        }
        g
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_side * self.cells_per_side
    }

    /// Cell `(column, row)` of a position, clamped into the grid.
    pub fn cell_of(&self, p: Vec2) -> (usize, usize) {
        let clamp = |v: f64| (v.max(0.0) as usize).min(self.cells_per_side - 1);
        (clamp((p.x - self.min.x) / self.cell_w), clamp((p.y - self.min.y) / self.cell_h))
    }

    fn cell_index(&self, (cx, cy): (usize, usize)) -> usize {
        cy * self.cells_per_side + cx
    }

    pub fn cell(&self, c: (usize, usize)) -> &[usize] {
        let i = self.cell_index(c);
        &self.ids[self.starts[i]..self.starts[i + 1]]
    }

    /// Largest ring index around `c` that still touches the grid.
    pub fn max_ring(&self, (cx, cy): (usize, usize)) -> usize {
        let last = self.cells_per_side - 1;
        cx.max(last - cx).max(cy).max(last - cy)
    }
}

/// Calls `f` on the in-grid cells at Chebyshev distance `r` from `center`,
/// clockwise starting at the above-left corner `(cx - r, cy + r)`.
pub fn for_each_ring_cell(center: (usize, usize), r: usize, cps: usize, mut f: impl FnMut((usize, usize))) {
    let (cx, cy) = (center.0 as i64, center.1 as i64);
    let (r, n) = (r as i64, cps as i64);
    if r == 0 {
        f(center);
        return;
    }
    let inside = |v: i64| (0..n).contains(&v);
    let (left, right, top, bottom) = (cx - r, cx + r, cy + r, cy - r);
    // top row, left to right
    if inside(top) {
        for x in left.max(0)..=right.min(n - 1) {
            f((x as usize, top as usize));
        }
    }
    // right column, downwards (corners excluded)
    if inside(right) {
        for y in ((bottom + 1).max(0)..=(top - 1).min(n - 1)).rev() {
            f((right as usize, y as usize));
        }
    }
    // bottom row, right to left
    if inside(bottom) {
        for x in (left.max(0)..=right.min(n - 1)).rev() {
            f((x as usize, bottom as usize));
        }
    }
    // left column, upwards
    if inside(left) {
        for y in (bottom + 1).max(0)..=(top - 1).min(n - 1) {
            f((left as usize, y as usize));
        }
    }
}

/// Full spiral visiting order around `center`.
pub fn spiral_cells(center: (usize, usize), grid: &UniformGrid) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(grid.cell_count());
    for r in 0..=grid.max_ring(center) {
        for_each_ring_cell(center, r, grid.cells_per_side, |c| out.push(c));
    }
    out
}

/// Grid result with the number of cells each point's search visited.
#[derive(Clone, Debug)]
pub struct GridOutput {
    pub graph: YaoGraph,
    pub visited: Vec<usize>,
    pub cells: usize,
}

/// Nearest point of the complement of the visited block to `p`: the block is
/// the cell rectangle within Chebyshev distance `r` of the center, and block
/// sides on the grid border are ignored since nothing lies beyond them.
/// `None` when the block covers the grid.
fn nearest_outside(grid: &UniformGrid, center: (usize, usize), r: usize, p: Vec2) -> Option<Vec2> {
    let n = grid.cells_per_side;
    // Pull each side slightly towards p so points whose cell assignment was
    // rounded across the side are still covered.
    let slack = 1e-9 * (grid.cell_w + grid.cell_h);
    let mut best: Option<(f64, Vec2)> = None;
    let mut consider = |x: Vec2| {
        let d = (x - p).norm2();
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, x));
        }
    };
    if center.0 > r {
        let side = grid.min.x + (center.0 - r) as f64 * grid.cell_w + slack;
        consider(Vec2::new(side.min(p.x), p.y));
    }
    if center.0 + r + 1 < n {
        let side = grid.min.x + (center.0 + r + 1) as f64 * grid.cell_w - slack;
        consider(Vec2::new(side.max(p.x), p.y));
    }
    if center.1 > r {
        let side = grid.min.y + (center.1 - r) as f64 * grid.cell_h + slack;
        consider(Vec2::new(p.x, side.min(p.y)));
    }
    if center.1 + r + 1 < n {
        let side = grid.min.y + (center.1 + r + 1) as f64 * grid.cell_h - slack;
        consider(Vec2::new(p.x, side.max(p.y)));
    }
    best.map(|(_, x)| x)
}

fn grid_point<K: Kernel>(
    points: &[Point],
    grid: &UniformGrid,
    table: &ConeTable,
    kernel: &K,
    s: usize,
    best: &mut [Option<usize>],
) -> usize {
    best.fill(None);
    let p = points[s].pos();
    let center = grid.cell_of(p);
    let mut visited = 0;
    for r in 0..=grid.max_ring(center) {
        for_each_ring_cell(center, r, grid.cells_per_side, |c| {
            visited += 1;
            for &q in grid.cell(c) {
                if q == s {
                    continue;
                }
                let i = table.index_of(p, points[q].pos(), kernel);
                if improves(kernel, points, p, q, best[i]) {
                    best[i] = Some(q);
                }
            }
        });
        let Some(x) = nearest_outside(grid, center, r, p) else { break };
        let settled = best.iter().all(|b| b.is_some_and(|b| kernel.compare_distance(p, points[b].pos(), x) == Ordering::Less));
        if settled {
            break;
        }
    }
    visited
}

/// Yao graph by ring search over a uniform grid. `threads` as in [`naive_yao`].
pub fn grid_yao<K: Kernel>(points: &[Point], k: usize, kernel: &K, threads: usize) -> GridOutput {
    grid_yao_until(points, k, kernel, threads, None).expect("no deadline")
}

/// [`grid_yao`] that stops once `deadline` has passed.
pub fn grid_yao_until<K: Kernel>(
    points: &[Point],
    k: usize,
    kernel: &K,
    threads: usize,
    deadline: Option<Instant>,
) -> Result<GridOutput, TimedOut> {
    let provenance = Provenance { algorithm: "grid".into(), kernel: kernel.config().mode };
    if points.is_empty() {
        return Ok(GridOutput { graph: YaoGraph::new(0, k, Vec::new(), provenance), visited: Vec::new(), cells: 0 });
    }
    let grid = UniformGrid::build(points);
    let table = ConeTable::new(k);
    let run = |s: usize, best: &mut Vec<Option<usize>>| {
        if expired(deadline, s) {
            return None;
        }
        let visited = grid_point(points, &grid, &table, kernel, s, best);
        let edges: Vec<Edge> = best.iter().enumerate().filter_map(|(cone, t)| t.map(|target| Edge { source: s, target, cone })).collect();
        Some((edges, visited))
    };
    let per_point: Option<Vec<(Vec<Edge>, usize)>> = if threads == 1 {
        let mut best = vec![None; k];
        (0..points.len()).map(|s| run(s, &mut best)).collect()
    } else {
        in_pool(threads, || (0..points.len()).into_par_iter().map_init(|| vec![None; k], |best, s| run(s, best)).collect())
    };
    let mut edges = Vec::new();
    let mut visited = Vec::with_capacity(points.len());
    for (e, v) in per_point.ok_or(TimedOut)? {
        edges.extend(e);
        visited.push(v);
    }
    Ok(GridOutput { graph: YaoGraph::new(points.len(), k, edges, provenance), visited, cells: grid.cell_count() })
}
