//! Plane-sweep Yao graph construction.
//!
//! Each cone is handled by one pass. Points are swept along the direction
//! opposite to the cone's bisector, so every candidate neighbor of a point is
//! swept before the point itself. The status holds the rays bounding the
//! regions `R_q` (the set of later points whose nearest cone neighbor is `q`).
//! An input point finds its region, gets its edge and opens a new region
//! bounded by two rays along the reversed cone boundaries. Intersection events
//! close a region; deletion events end the segment part of a composite
//! boundary and continue it along a bisector.
//!
//! Sweepline order runs from the clockwise to the counterclockwise side of
//! the sweep direction: a boundary's `left` region lies geometrically to the
//! right of its ray and `right` to the left.

use std::cmp::Ordering;
use std::time::Instant;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::alt::naive_yao;
use crate::graph::{check_invariants, compare_graphs, Edge, GraphError, Mismatch, Provenance, Violation, YaoGraph};
use crate::kernel::{
    line_intersection, project_dir, with_kernel, ConeSpec, DirectedLine, Kernel, KernelConfig, KernelError, KernelMode, KernelVisitor,
    Point, Side, Vec2, Wedge,
};
use crate::queue::{Event, EventHandle, EventKind, EventQueue, QueueError};
use crate::status::{Boundary, BoundaryKind, Handle, PendingSwap, RegionId, SweepStatus};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("numerical-failure in cone {cone}: {reason}")]
    NumericalFailure { cone: usize, reason: String },
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("time limit exceeded in cone {cone}")]
    Timeout { cone: usize },
}

/// Counters of one sweep pass.
#[derive(Clone, Debug, PartialEq)]
pub struct PassStats {
    pub cone: usize,
    /// Index of the swept sub-wedge within the cone (0 unless the cone is split).
    pub sub_wedge: usize,
    pub kernel: KernelMode,
    /// Whether this pass is a rerun with exact predicates after a failure.
    pub fallback: bool,
    pub n_input: usize,
    pub n_intersection: usize,
    pub n_deletion: usize,
    pub max_dynamic_queue: usize,
    pub max_sweepline_size: usize,
    pub final_sweepline_size: usize,
    pub rotations: u64,
    pub wall_time_nanos: u64,
}

impl PassStats {
    pub fn total_events(&self) -> usize {
        self.n_input + self.n_intersection + self.n_deletion
    }

    /// `n_IE ≤ 2n`, `n_DE ≤ 2n` and at most `5n` events overall.
    pub fn within_event_bound(&self) -> bool {
        let n = self.n_input;
        self.n_intersection <= 2 * n && self.n_deletion <= 2 * n && self.total_events() <= 5 * n
    }
}

/// Shape of the boundary that replaces two boundaries meeting at `v`. The
/// lines are anchored at exact input points wherever possible.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryShape {
    /// Reversed cone boundary of one apex: the limit of where it is visible.
    SimpleRay(DirectedLine),
    /// Bisector of the two apexes.
    BisectorRay(DirectedLine),
    /// Reversed cone boundary up to `swap.point`, then the bisector. Without
    /// a swap the segment never ends.
    Composite { segment: DirectedLine, swap: Option<PendingSwap> },
}

/// Bisector of `a` and `b` through their midpoint, oriented so that `a` lies
/// on its right.
fn bisector_line(a: Vec2, b: Vec2) -> DirectedLine {
    DirectedLine::from_direction((a + b) * 0.5, (a - b).rot90_ccw())
}

/// Boundary between the regions of `a` (sweepline-left) and `b`
/// (sweepline-right) beyond the point `v` where they become adjacent.
///
/// The bisector of `a` and `b` is tested against the two rays leaving `v`
/// along the reversed cone boundaries: no crossing gives a simple ray, two
/// crossings (only possible at `v` itself) a bisector ray, and one crossing a
/// composite boundary that switches to the bisector at the crossing. A
/// reversed left boundary limits the visibility of `b` and passes through
/// it; a reversed right boundary does the same for `a`.
pub fn determine_boundary<K: Kernel>(v: Vec2, a: Vec2, b: Vec2, wedge: &Wedge, kernel: &K) -> BoundaryShape {
    assert!(a != b, "boundary between a region and itself");
    let (back_l, back_r) = (-wedge.dir_l, -wedge.dir_r);
    let f0 = kernel.compare_distance(v, a, b);
    if f0 == Ordering::Equal {
        return BoundaryShape::BisectorRay(bisector_line(a, b));
    }
    // Along v + t·d the difference |x-a|² - |x-b|² changes at rate 2 d·(b-a),
    // so the bisector is ahead iff that rate has the opposite sign of f0.
    let crosses = |d: Vec2| kernel.dot_diff_sign(d, a, b) == f0.reverse();
    match (crosses(back_l), crosses(back_r)) {
        (false, false) => BoundaryShape::SimpleRay(if kernel.compare_projection_dir(a, b, wedge.sweep) == Ordering::Less {
            DirectedLine::from_direction(b, back_l)
        } else {
            DirectedLine::from_direction(a, back_r)
        }),
        (true, true) => BoundaryShape::BisectorRay(bisector_line(a, b)),
        (hit_l, _) => {
            let (anchor, d) = if hit_l { (b, back_l) } else { (a, back_r) };
            // solve |x-a|² = |x-b|² for x = anchor + t·d
            let f_anchor = (anchor - a).norm2() - (anchor - b).norm2();
            let mut w = anchor + d * (-f_anchor / (2.0 * d.dot(b - a)));
            if project_dir(w, wedge.sweep) < project_dir(v, wedge.sweep) {
                w = v;
            }
            // a bisector parallel to the edge in floating point never takes over
            let swap = (w.x.is_finite() && w.y.is_finite()).then(|| PendingSwap { point: w, geometry: bisector_line(a, b) });
            BoundaryShape::Composite { segment: DirectedLine::from_direction(anchor, d), swap }
        }
    }
}

/// Edges of one cone and the stats of the passes that produced them.
#[derive(Clone, Debug)]
pub struct ConePassOutput {
    pub edges: Vec<Edge>,
    pub stats: Vec<PassStats>,
}

struct Pass<'a, K: Kernel> {
    kernel: &'a K,
    points: &'a [Point],
    wedge: Wedge,
    cone: usize,
    status: SweepStatus,
    queue: EventQueue,
    /// Pending intersection of each adjacent pair, keyed in sweepline order.
    cache: FxHashMap<(Handle, Handle), EventHandle>,
    deletions: FxHashMap<Handle, EventHandle>,
    targets: Vec<Option<usize>>,
    max_status: usize,
    tolerance: f64,
}

impl<'a, K: Kernel> Pass<'a, K> {
    fn fail(&self, reason: impl Into<String>) -> SweepError {
        SweepError::NumericalFailure { cone: self.cone, reason: reason.into() }
    }

    fn queue_error(&self, e: QueueError) -> SweepError {
        match e {
            QueueError::StaleEvent { .. } => self.fail(e.to_string()),
            other => other.into(),
        }
    }

    fn prj(&self, x: Vec2) -> f64 {
        project_dir(x, self.wedge.sweep)
    }

    fn apex(&self, r: RegionId) -> Vec2 {
        self.points[r.point().expect("bisector next to the unbounded region")].pos()
    }

    /// Whether input point `a` lies in the swept wedge of `p`.
    fn sees(&self, p: Vec2, a: usize) -> bool {
        self.kernel.in_angular_range_of(self.wedge.dir_l, self.wedge.dir_r, p, self.points[a].pos())
    }

    /// Side of `p` relative to boundary `b`; geometric left is sweepline-right.
    /// Every case is an exact predicate on input points, so it never depends
    /// on a computed intersection or swap point.
    fn side(&self, b: &Boundary, p: Vec2) -> Side {
        // left of the bisector means closer to the sweepline-right apex
        let by_distance = || match self.kernel.compare_distance(p, self.apex(b.left), self.apex(b.right)) {
            Ordering::Greater => Side::Left,
            Ordering::Equal => Side::On,
            Ordering::Less => Side::Right,
        };
        match (b.kind, b.edge) {
            (BoundaryKind::Bisector, None) => match by_distance() {
                // An exact tie on the sweepline sees both apexes; a snapped
                // one may not, and then only the visible apex can own `p`.
                Side::On => {
                    let sees = |r: RegionId| self.sees(p, r.point().expect("bisector next to the unbounded region"));
                    match (sees(b.left), sees(b.right)) {
                        (true, false) => Side::Right,
                        (false, true) => Side::Left,
                        _ => Side::On,
                    }
                }
                side => side,
            },
            (BoundaryKind::Ray, None) => self.kernel.side_of_line(&b.geometry, p),
            // The anchor owns the points on its side of its visibility edge
            // that are also closer to it. This splits every sweepline at the
            // same place as the segment before the swap point and as the
            // bisector after it, so the swap time never matters here.
            (_, Some(line)) => {
                let (edge, dist) = (self.kernel.side_of_line(&line, p), by_distance());
                if line.origin == self.apex(b.left) {
                    if edge == Side::Right && dist == Side::Right {
                        Side::Right
                    } else if edge == Side::Left || dist == Side::Left {
                        Side::Left
                    } else {
                        Side::On
                    }
                } else if edge == Side::Right || dist == Side::Right {
                    Side::Right
                } else if edge == Side::Left && dist == Side::Left {
                    Side::Left
                } else {
                    Side::On
                }
            }
        }
    }

    /// Runs a pending intersection of `(l, r)` ahead of its turn when the
    /// exact side tests at `p` show that the two boundaries already crossed.
    fn settle_crossed(&mut self, p: Vec2, l: Handle, r: Handle) -> Result<bool, SweepError> {
        let crossed = self.side(self.status.boundary(l), p) == Side::Right && self.side(self.status.boundary(r), p) != Side::Right;
        match self.cache.get(&(l, r)) {
            Some(&ev) if crossed => {
                let e = self.queue.pop_early(ev);
                self.intersection(e.at, l, r)?;
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    /// Settles the first crossed pair met walking away from `from`. Several
    /// regions can close at `p` at once, so the walk goes on through pairs
    /// whose intersection is due within tolerance of `p`.
    fn settle_near(&mut self, p: Vec2, from: Handle, forward: bool) -> Result<bool, SweepError> {
        let limit = self.prj(p) + self.tolerance;
        let mut x = from;
        loop {
            let next = if forward { self.status.succ(x) } else { self.status.prev(x) };
            let Some(y) = next else { return Ok(false) };
            let (l, r) = if forward { (x, y) } else { (y, x) };
            if self.settle_crossed(p, l, r)? {
                return Ok(true);
            }
            match self.cache.get(&(l, r)) {
                Some(&ev) if self.queue.get(ev).priority <= limit => x = y,
                _ => return Ok(false),
            }
        }
    }

    /// Requeues a popped intersection of `(l, r)` behind an input whose
    /// priority is within tolerance and which the exact side tests place in
    /// the closing region, so its rounded priority did not overtake the input.
    fn postpone_behind_input(&mut self, e: Event, l: Handle, r: Handle) -> Result<bool, SweepError> {
        let limit = e.priority + self.tolerance;
        let (bl, br) = (self.status.boundary(l), self.status.boundary(r));
        let inside = self
            .queue
            .pending_inputs()
            .iter()
            .take_while(|s| s.priority <= limit)
            .find(|s| self.side(bl, s.at) != Side::Right && self.side(br, s.at) == Side::Right)
            .map(|s| s.priority);
        let Some(priority) = inside else { return Ok(false) };
        let ev = self.queue.postpone(e, priority).map_err(|err| self.queue_error(err))?;
        self.cache.insert((l, r), ev);
        Ok(true)
    }

    fn run(&mut self, deadline: Option<Instant>) -> Result<(), SweepError> {
        let mut processed = 0u32;
        while let Some(e) = self.queue.pop() {
            processed = processed.wrapping_add(1);
            if processed.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() > d) {
                return Err(SweepError::Timeout { cone: self.cone });
            }
            match e.kind {
                EventKind::Input(i) => self.input(i)?,
                EventKind::Intersection { left, right } => {
                    if !self.postpone_behind_input(e, left, right)? {
                        self.intersection(e.at, left, right)?
                    }
                }
                EventKind::Deletion { boundary } => self.deletion(boundary)?,
            }
            self.max_status = self.max_status.max(self.status.len());
        }
        Ok(())
    }

    fn input(&mut self, i: usize) -> Result<(), SweepError> {
        let p = self.points[i].pos();
        let (bl, br) = loop {
            let (bl, br) = self.status.find_region(|b| self.side(b, p));
            if let Some(r) = br {
                if self.settle_near(p, r, true)? {
                    continue;
                }
            }
            if let Some(l) = bl {
                if self.settle_near(p, l, false)? {
                    continue;
                }
            }
            break (bl, br);
        };
        if let Some(l) = bl {
            if self.side(self.status.boundary(l), p) == Side::Right {
                return Err(self.fail(format!("point {i} lies outside the region found for it")));
            }
        }
        let region = bl.map_or(RegionId::INFINITE, |l| self.status.boundary(l).right);
        if region != br.map_or(RegionId::INFINITE, |r| self.status.boundary(r).left) {
            return Err(self.fail(format!("inconsistent regions around point {i}")));
        }
        if let Some(a) = region.point() {
            if !self.sees(p, a) {
                return Err(self.fail(format!("point {i} lies in the region of {a} outside its cone")));
            }
        }
        self.targets[i] = region.point();
        if let (Some(l), Some(r)) = (bl, br) {
            self.drop_pair(l, r);
        }
        let me = RegionId::apex(i);
        let ray_l = Boundary::new(DirectedLine::from_direction(p, -self.wedge.dir_l), region, me);
        let ray_r = Boundary::new(DirectedLine::from_direction(p, -self.wedge.dir_r), me, region);
        let (hl, hr) = self.status.insert_pair(bl, ray_l, ray_r);
        if let Some(l) = bl {
            self.check(l, hl)?;
        }
        if let Some(r) = br {
            self.check(hr, r)?;
        }
        Ok(())
    }

    fn intersection(&mut self, v: Vec2, l: Handle, r: Handle) -> Result<(), SweepError> {
        self.cache.remove(&(l, r));
        let prev = self.status.prev(l);
        let succ = self.status.succ(r);
        if let Some(p) = prev {
            self.drop_pair(p, l);
        }
        if let Some(s) = succ {
            self.drop_pair(r, s);
        }
        self.drop_deletion(l);
        self.drop_deletion(r);
        let (a, b) = (self.status.boundary(l).left, self.status.boundary(r).right);
        let shape = match (a.point(), b.point()) {
            (None, None) => return Err(self.fail("two unbounded regions meet")),
            (None, Some(y)) => BoundaryShape::SimpleRay(DirectedLine::from_direction(self.points[y].pos(), -self.wedge.dir_l)),
            (Some(x), None) => BoundaryShape::SimpleRay(DirectedLine::from_direction(self.points[x].pos(), -self.wedge.dir_r)),
            (Some(x), Some(y)) if x == y => return Err(self.fail(format!("region of point {x} meets itself"))),
            (Some(x), Some(y)) => determine_boundary(v, self.points[x].pos(), self.points[y].pos(), &self.wedge, self.kernel),
        };
        let merged = match shape {
            BoundaryShape::SimpleRay(g) => Boundary::new(g, a, b),
            BoundaryShape::BisectorRay(g) => Boundary::new(g, a, b).with_kind(BoundaryKind::Bisector),
            BoundaryShape::Composite { segment, swap } => Boundary::composite(segment, swap, a, b),
        }
        .starting_at(v);
        let h = self.status.replace_pair(l, r, merged);
        if let BoundaryShape::Composite { swap: Some(swap), .. } = shape {
            let ev = self
                .queue
                .insert(self.prj(swap.point), swap.point, EventKind::Deletion { boundary: h })
                .map_err(|e| self.queue_error(e))?;
            self.deletions.insert(h, ev);
        }
        if let Some(p) = prev {
            self.check(p, h)?;
        }
        if let Some(s) = succ {
            self.check(h, s)?;
        }
        Ok(())
    }

    fn deletion(&mut self, h: Handle) -> Result<(), SweepError> {
        self.deletions.remove(&h);
        let prev = self.status.prev(h);
        let succ = self.status.succ(h);
        if let Some(p) = prev {
            self.drop_pair(p, h);
        }
        if let Some(s) = succ {
            self.drop_pair(h, s);
        }
        let swap = self.status.boundary(h).pending.expect("deletion event without a pending swap");
        self.status.swap_geometry(h, swap.geometry);
        if let Some(p) = prev {
            self.check(p, h)?;
        }
        if let Some(s) = succ {
            self.check(h, s)?;
        }
        Ok(())
    }

    fn drop_pair(&mut self, l: Handle, r: Handle) {
        if let Some(ev) = self.cache.remove(&(l, r)) {
            self.queue.remove(ev);
        }
    }

    fn drop_deletion(&mut self, h: Handle) {
        if let Some(ev) = self.deletions.remove(&h) {
            self.queue.remove(ev);
        }
    }

    /// Schedules the point where the region between adjacent `l` and `r`
    /// closes, if it does.
    fn check(&mut self, l: Handle, r: Handle) -> Result<(), SweepError> {
        let (bl, br) = (*self.status.boundary(l), *self.status.boundary(r));
        let (gl, gr) = (bl.geometry, br.geometry);
        let (x, priority) = match self.kernel.cross_sign(gl.dir, gr.dir) {
            Ordering::Less => match line_intersection(&gl, &gr) {
                // converging lines that crossed before both boundaries started
                Some(x) if self.prj(x) < self.prj(bl.start).max(self.prj(br.start)) - self.tolerance => return Ok(()),
                Some(x) => (x, self.prj(x)),
                None => return Ok(()),
            },
            // Colinear boundaries enclose nothing once both have started.
            Ordering::Equal if self.kernel.side_of_line(&gl, gr.origin) == Side::On => {
                let later = if self.prj(bl.start) >= self.prj(br.start) { bl.start } else { br.start };
                let (at, now) = (self.prj(later), self.queue.current());
                if at >= now {
                    (later, at)
                } else {
                    // already empty: close it where the line crosses the sweepline
                    (later + gl.dir * ((now - at) / self.prj(gl.dir)), now)
                }
            }
            _ => return Ok(()),
        };
        // a composite boundary's current ray is only valid up to its swap point
        for b in [bl, br] {
            if b.pending.is_some_and(|s| priority > self.prj(s.point)) {
                return Ok(());
            }
        }
        let ev = self.queue.insert(priority, x, EventKind::Intersection { left: l, right: r }).map_err(|e| self.queue_error(e))?;
        self.cache.insert((l, r), ev);
        Ok(())
    }
}

/// Largest coordinate magnitude plus the bounding-box diagonal; scales the
/// tolerance for events computed slightly behind the sweep position.
fn coordinate_scale(points: &[Point]) -> f64 {
    if points.is_empty() {
        return 1.0;
    }
    let (mut lo, mut hi, mut mag) = (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN), 0.0f64);
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        mag = mag.max(p.x.abs()).max(p.y.abs());
    }
    (mag + (hi - lo).norm2().sqrt()).max(f64::MIN_POSITIVE)
}

/// One sweep over `wedge`: the nearest point inside the wedge for every point.
pub fn sweep_wedge<K: Kernel>(
    points: &[Point],
    wedge: &Wedge,
    cone: usize,
    kernel: &K,
    deadline: Option<Instant>,
) -> Result<(Vec<Option<usize>>, PassStats), SweepError> {
    let start = Instant::now();
    let tolerance = kernel.config().epsilon * coordinate_scale(points);
    let mut pass = Pass {
        kernel,
        points,
        wedge: *wedge,
        cone,
        status: SweepStatus::new(),
        queue: EventQueue::new(points, wedge.sweep, tolerance)?,
        cache: FxHashMap::default(),
        deletions: FxHashMap::default(),
        targets: vec![None; points.len()],
        max_status: 0,
        tolerance,
    };
    pass.run(deadline)?;
    let popped = pass.queue.popped();
    let stats = PassStats {
        cone,
        sub_wedge: 0,
        kernel: kernel.config().mode,
        fallback: false,
        n_input: popped.input,
        n_intersection: popped.intersection,
        n_deletion: popped.deletion,
        max_dynamic_queue: pass.queue.max_dynamic_size(),
        max_sweepline_size: pass.max_status,
        final_sweepline_size: pass.status.len(),
        rotations: pass.status.rotations(),
        wall_time_nanos: start.elapsed().as_nanos() as u64,
    };
    Ok((pass.targets, stats))
}

/// Yao edges of a single cone. Cones wider than a right angle are swept as
/// several sub-wedges and the per-point results merged by distance, ties
/// going to the smaller id.
pub fn run_cone_pass<K: Kernel>(
    points: &[Point],
    cone: &ConeSpec,
    kernel: &K,
    deadline: Option<Instant>,
) -> Result<ConePassOutput, SweepError> {
    validate_points(points)?;
    let mut best: Vec<Option<usize>> = vec![None; points.len()];
    let mut stats = Vec::new();
    for (j, wedge) in cone.sweep_wedges().iter().enumerate() {
        let (targets, mut s) = sweep_wedge(points, wedge, cone.i, kernel, deadline)?;
        s.sub_wedge = j;
        stats.push(s);
        for (p, t) in targets.into_iter().enumerate() {
            let Some(t) = t else { continue };
            best[p] = Some(match best[p] {
                None => t,
                Some(b) => match kernel.compare_distance(points[p].pos(), points[t].pos(), points[b].pos()) {
                    Ordering::Less => t,
                    Ordering::Equal => t.min(b),
                    Ordering::Greater => b,
                },
            });
        }
    }
    let edges = best.into_iter().enumerate().filter_map(|(source, t)| t.map(|target| Edge { source, target, cone: cone.i })).collect();
    Ok(ConePassOutput { edges, stats })
}

fn validate_points(points: &[Point]) -> Result<(), SweepError> {
    for (i, p) in points.iter().enumerate() {
        if p.id != i {
            return Err(SweepError::InvalidInput(format!("point at position {i} has id {}", p.id)));
        }
        if !p.pos().is_finite() {
            return Err(SweepError::InvalidInput(format!("point {i} has a non-finite coordinate")));
        }
    }
    Ok(())
}

/// Settings for [`build_yao_graph_sweepline_with`].
#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub kernel: KernelConfig,
    /// Run the cone passes on the rayon thread pool.
    pub parallel: bool,
    /// Rerun a cone with exact predicates when the inexact kernel fails.
    pub fallback: bool,
    pub deadline: Option<Instant>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { kernel: KernelConfig::inexact(), parallel: false, fallback: true, deadline: None }
    }
}

#[derive(Clone, Debug)]
pub struct SweepOutput {
    pub graph: YaoGraph,
    pub stats: Vec<PassStats>,
}

impl SweepOutput {
    /// Kernel mode that finished each cone; fallback cones report the
    /// extended mode.
    pub fn cone_kernels(&self) -> Vec<KernelMode> {
        let mut modes = vec![KernelMode::Inexact; self.graph.k];
        let mut seen = vec![false; self.graph.k];
        for s in &self.stats {
            if !seen[s.cone] || s.kernel == KernelMode::Extended {
                modes[s.cone] = s.kernel;
            }
            seen[s.cone] = true;
        }
        modes
    }
}

/// Differences between a sweep result and the naive oracle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub mismatches: Vec<Mismatch>,
    pub violations: Vec<Violation>,
}

impl OracleReport {
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty() && self.violations.is_empty()
    }
}

struct OracleVisitor<'a> {
    points: &'a [Point],
    graph: YaoGraph,
    cones: Vec<bool>,
    threads: usize,
}

impl KernelVisitor for OracleVisitor<'_> {
    type Output = Result<OracleReport, GraphError>;

    fn visit<K: Kernel>(self, kernel: &K) -> Self::Output {
        let mut naive = naive_yao(self.points, self.graph.k, kernel, self.threads);
        naive.edges.retain(|e| self.cones[e.cone]);
        Ok(OracleReport {
            mismatches: compare_graphs(&naive, &self.graph, self.points, kernel)?,
            violations: check_invariants(&self.graph, self.points, kernel),
        })
    }
}

/// Checks a sweep result against the naive oracle. Each cone is judged with
/// the kernel that finished it, so ties and boundary directions are decided
/// by the same predicates on both sides.
pub fn check_against_naive(points: &[Point], output: &SweepOutput, epsilon: f64, threads: usize) -> Result<OracleReport, GraphError> {
    let modes = output.cone_kernels();
    let mut report = OracleReport::default();
    for mode in [KernelMode::Inexact, KernelMode::Extended] {
        let cones: Vec<bool> = modes.iter().map(|&m| m == mode).collect();
        if !cones.contains(&true) {
            continue;
        }
        let edges = output.graph.edges.iter().filter(|e| cones[e.cone]).copied().collect();
        let graph = YaoGraph::new(output.graph.n, output.graph.k, edges, output.graph.provenance.clone());
        let config = KernelConfig { mode, epsilon };
        let part = with_kernel(&config, OracleVisitor { points, graph, cones, threads })?;
        report.mismatches.extend(part.mismatches);
        report.violations.extend(part.violations);
    }
    report.mismatches.sort_by_key(|m| (m.source, m.cone));
    Ok(report)
}

struct ConeVisitor<'a> {
    points: &'a [Point],
    cone: ConeSpec,
    deadline: Option<Instant>,
}

impl KernelVisitor for ConeVisitor<'_> {
    type Output = Result<ConePassOutput, SweepError>;

    fn visit<K: Kernel>(self, kernel: &K) -> Self::Output {
        run_cone_pass(self.points, &self.cone, kernel, self.deadline)
    }
}

fn cone_with_fallback(points: &[Point], cone: ConeSpec, opts: &SweepOptions) -> Result<ConePassOutput, SweepError> {
    let first = with_kernel(&opts.kernel, ConeVisitor { points, cone, deadline: opts.deadline });
    match first {
        Err(SweepError::NumericalFailure { .. }) if opts.fallback && opts.kernel.mode == KernelMode::Inexact => {
            let exact = KernelConfig { mode: KernelMode::Extended, ..opts.kernel };
            let mut out = with_kernel(&exact, ConeVisitor { points, cone, deadline: opts.deadline })?;
            for s in &mut out.stats {
                s.fallback = true;
            }
            Ok(out)
        }
        other => other,
    }
}

/// Sweepline Yao graph with default options for the given kernel (sequential
/// passes, exact fallback enabled).
pub fn build_yao_graph_sweepline(points: &[Point], k: usize, kernel: &KernelConfig) -> Result<YaoGraph, SweepError> {
    let opts = SweepOptions { kernel: *kernel, ..SweepOptions::default() };
    build_yao_graph_sweepline_with(points, k, &opts).map(|o| o.graph)
}

pub fn build_yao_graph_sweepline_with(points: &[Point], k: usize, opts: &SweepOptions) -> Result<SweepOutput, SweepError> {
    if k < 2 {
        return Err(KernelError::InvalidCone { k, i: 0 }.into());
    }
    let cones = (0..k).map(|i| ConeSpec::new(k, i)).collect::<Result<Vec<_>, _>>()?;
    let outputs: Vec<ConePassOutput> = if opts.parallel {
        cones.into_par_iter().map(|c| cone_with_fallback(points, c, opts)).collect::<Result<_, _>>()?
    } else {
        cones.into_iter().map(|c| cone_with_fallback(points, c, opts)).collect::<Result<_, _>>()?
    };
    let mut edges = Vec::new();
    let mut stats = Vec::new();
    for o in outputs {
        edges.extend(o.edges);
        stats.extend(o.stats);
    }
    let provenance = Provenance { algorithm: "sweepline".into(), kernel: opts.kernel.mode };
    Ok(SweepOutput { graph: YaoGraph::new(points.len(), k, edges, provenance), stats })
}
