//! Geometric primitives, predicates and constructions.
//!
//! Predicates live behind the [`Kernel`] trait so the algorithms can run
//! either with plain `f64` arithmetic and an epsilon snap ([`InexactKernel`])
//! or with exactly evaluated determinant signs ([`ExtendedKernel`]).
//! Constructions (projections, ray intersections, bisectors) are inexact in
//! both modes.

pub mod exact;

use std::cmp::Ordering;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, TAU};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("degenerate-bisector: bisector of identical points")]
    DegenerateBisector,
    #[error("coincident-points: angle between identical points")]
    CoincidentPoints,
    #[error("degenerate-overlap: rays are colinear and overlap")]
    DegenerateOverlap,
    #[error("invalid cone: k = {k}, i = {i}")]
    InvalidCone { k: usize, i: usize },
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    #[inline]
    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn rot90_ccw(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Direction angle normalized to `[0, 2π)`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// An input site. Ids index into the point set they belong to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(id: usize, x: f64, y: f64) -> Self {
        Self { id, x, y }
    }

    #[inline]
    pub fn pos(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

/// Builds a point set with ids `0..n` from coordinate pairs.
pub fn points_from_coords(coords: &[(f64, f64)]) -> Vec<Point> {
    coords.iter().enumerate().map(|(id, &(x, y))| Point::new(id, x, y)).collect()
}

pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Unit vector for the angle `2π · num / den`.
///
/// The angle is reduced to an octant with integer arithmetic and the octant
/// symmetries are applied exactly, so e.g. the directions for `θ` and `θ + π`
/// are exact negations and axis directions have exact zero components.
pub fn turn_direction(num: u64, den: u64) -> Vec2 {
    assert!(den > 0);
    let num = num % den;
    let t = 8 * num;
    let oct = t / den;
    let rem = t % den;
    let (lx, ly) = if rem == 0 {
        if oct.is_multiple_of(2) {
            (1.0, 0.0)
        } else {
            (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
        }
    } else if oct.is_multiple_of(2) {
        let a = (rem as f64 / den as f64) * FRAC_PI_4;
        (a.cos(), a.sin())
    } else {
        let b = ((den - rem) as f64 / den as f64) * FRAC_PI_4;
        (b.sin(), b.cos())
    };
    match oct / 2 {
        0 => Vec2::new(lx, ly),
        1 => Vec2::new(-ly, lx),
        2 => Vec2::new(-lx, -ly),
        _ => Vec2::new(ly, -lx),
    }
}

/// Directed line (ray) with origin and angle; `dir` points along the angle
/// and need not be unit length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectedLine {
    pub origin: Vec2,
    pub angle: f64,
    pub dir: Vec2,
}

impl DirectedLine {
    pub fn new(origin: Vec2, angle: f64) -> Self {
        let angle = normalize_angle(angle);
        Self { origin, angle, dir: Vec2::new(angle.cos(), angle.sin()) }
    }

    /// Ray with angle `2π · num / den`, using [`turn_direction`].
    pub fn from_turn(origin: Vec2, num: u64, den: u64) -> Self {
        let angle = normalize_angle(TAU * ((num % den) as f64 / den as f64));
        Self { origin, angle, dir: turn_direction(num, den) }
    }

    pub fn from_direction(origin: Vec2, dir: Vec2) -> Self {
        Self { origin, angle: dir.angle(), dir }
    }

    /// Point at parameter `t` along `dir`.
    #[inline]
    pub fn at(&self, t: f64) -> Vec2 {
        self.origin + self.dir * t
    }
}

impl fmt::Display for DirectedLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) @ {:.6}", self.origin.x, self.origin.y, self.angle)
    }
}

/// An angular sector `[2π·l/den, 2π·(l+1)/den)` together with its cached
/// boundary and sweep directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wedge {
    pub num: u64,
    pub den: u64,
    pub theta_l: f64,
    pub theta_r: f64,
    /// Sweep direction: the reverse of the internal angle bisector.
    pub tau: f64,
    pub dir_l: Vec2,
    pub dir_r: Vec2,
    pub sweep: Vec2,
}

impl Wedge {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0 && num < den);
        let theta_l = TAU * num as f64 / den as f64;
        let theta_r = TAU * (num + 1) as f64 / den as f64;
        let tau_num = 2 * num + 1 + den;
        Self {
            num,
            den,
            theta_l,
            theta_r,
            tau: normalize_angle(TAU * (tau_num % (2 * den)) as f64 / (2 * den) as f64),
            dir_l: turn_direction(num, den),
            dir_r: turn_direction(num + 1, den),
            sweep: turn_direction(tau_num, 2 * den),
        }
    }

    /// Whether the open angular width exceeds a right angle.
    pub fn is_wider_than_right_angle(&self) -> bool {
        self.den < 4
    }
}

/// Cone `C_i` of a Yao graph with `k` cones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeSpec {
    pub k: usize,
    pub i: usize,
    pub theta_l: f64,
    pub theta_r: f64,
    pub tau: f64,
    pub wedge: Wedge,
}

impl ConeSpec {
    pub fn new(k: usize, i: usize) -> Result<Self, KernelError> {
        if k < 2 || i >= k {
            return Err(KernelError::InvalidCone { k, i });
        }
        let wedge = Wedge::new(i as u64, k as u64);
        Ok(Self { k, i, theta_l: wedge.theta_l, theta_r: wedge.theta_r, tau: wedge.tau, wedge })
    }

    /// Wedges swept to compute this cone. Cones wider than a right angle are
    /// split into equal sub-wedges, since a single pass assumes that a point
    /// swept later always beats earlier points inside its own reverse cone.
    pub fn sweep_wedges(&self) -> Vec<Wedge> {
        let k = self.k as u64;
        let parts = 4u64.div_ceil(k).max(1);
        let den = k * parts;
        (0..parts).map(|j| Wedge::new(self.i as u64 * parts + j, den)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    On,
    Right,
}

impl Side {
    fn from_sign(s: Ordering) -> Side {
        match s {
            Ordering::Greater => Side::Left,
            Ordering::Equal => Side::On,
            Ordering::Less => Side::Right,
        }
    }

    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::On => Side::On,
            Side::Right => Side::Left,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KernelMode {
    Inexact,
    Extended,
}

impl KernelMode {
    pub fn name(self) -> &'static str {
        match self {
            KernelMode::Inexact => "inexact",
            KernelMode::Extended => "extended",
        }
    }
}

impl fmt::Display for KernelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for KernelMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inexact" => Ok(KernelMode::Inexact),
            "extended" => Ok(KernelMode::Extended),
            other => Err(format!("unknown kernel {other:?}")),
        }
    }
}

pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelConfig {
    pub mode: KernelMode,
    /// Relative snap tolerance of the inexact kernel. Also scales the
    /// stale-event tolerance of the sweep in both modes.
    pub epsilon: f64,
}

impl KernelConfig {
    pub fn inexact() -> Self {
        Self { mode: KernelMode::Inexact, epsilon: DEFAULT_EPSILON }
    }

    pub fn extended() -> Self {
        Self { mode: KernelMode::Extended, epsilon: DEFAULT_EPSILON }
    }

    pub fn with_mode(mode: KernelMode) -> Self {
        Self { mode, epsilon: DEFAULT_EPSILON }
    }
}

/// Geometric predicates. All methods are pure.
pub trait Kernel: Send + Sync {
    fn config(&self) -> KernelConfig;

    /// Side of `q` relative to the line through `origin` along `dir`.
    fn orient(&self, origin: Vec2, dir: Vec2, q: Vec2) -> Side;

    /// Sign of `u × w`.
    fn cross_sign(&self, u: Vec2, w: Vec2) -> Ordering;

    /// Sign of `d · (b - a)`.
    fn dot_diff_sign(&self, d: Vec2, a: Vec2, b: Vec2) -> Ordering;

    /// `d(p, a)` compared with `d(p, b)`.
    fn compare_distance(&self, p: Vec2, a: Vec2, b: Vec2) -> Ordering;

    /// Projection of `a` onto `dir` compared with that of `b`.
    fn compare_projection_dir(&self, a: Vec2, b: Vec2, dir: Vec2) -> Ordering;

    fn side_of_line(&self, line: &DirectedLine, q: Vec2) -> Side {
        self.orient(line.origin, line.dir, q)
    }

    fn compare_projection(&self, a: Vec2, b: Vec2, tau: f64) -> Ordering {
        self.compare_projection_dir(a, b, Vec2::new(tau.cos(), tau.sin()))
    }

    /// Whether `v` lies in the half-open angular range `[start, end)` measured
    /// counterclockwise from `start`. `start` and `end` must be nonzero.
    fn in_angular_range(&self, start: Vec2, end: Vec2, v: Vec2) -> bool {
        self.in_angular_range_of(start, end, Vec2::default(), v)
    }

    /// [`Kernel::in_angular_range`] for the direction `q - p`, which is never
    /// rounded.
    fn in_angular_range_of(&self, start: Vec2, end: Vec2, p: Vec2, q: Vec2) -> bool {
        // sign of start × (q - p)
        let turn_from_start = match self.orient(p, start, q) {
            Side::Left => Ordering::Greater,
            Side::On => Ordering::Equal,
            Side::Right => Ordering::Less,
        };
        // half 0: angle from `start` in [0, π); half 1: [π, 2π)
        let half_of_end = match self.cross_sign(start, end) {
            Ordering::Greater => 0,
            Ordering::Less => 1,
            Ordering::Equal if self.dot_diff_sign(start, Vec2::default(), end) == Ordering::Greater => 0,
            Ordering::Equal => 1,
        };
        let half_of_v = match turn_from_start {
            Ordering::Greater => 0,
            Ordering::Less => 1,
            Ordering::Equal if self.dot_diff_sign(start, p, q) == Ordering::Greater => 0,
            Ordering::Equal => 1,
        };
        if half_of_v != half_of_end {
            return half_of_v < half_of_end;
        }
        if half_of_v == 0 && turn_from_start == Ordering::Equal {
            // q - p points along `start`
            return true;
        }
        // (q - p) × end > 0, i.e. q lies right of the line through p along end
        self.orient(p, end, q) == Side::Right
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InexactKernel {
    pub epsilon: f64,
}

impl Default for InexactKernel {
    fn default() -> Self {
        Self { epsilon: DEFAULT_EPSILON }
    }
}

impl InexactKernel {
    #[inline]
    fn snapped(&self, t0: f64, t1: f64) -> Ordering {
        let s = t0 + t1;
        if s.abs() <= self.epsilon * (t0.abs() + t1.abs()) {
            Ordering::Equal
        } else if s > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl Kernel for InexactKernel {
    fn config(&self) -> KernelConfig {
        KernelConfig { mode: KernelMode::Inexact, epsilon: self.epsilon }
    }

    #[inline]
    fn orient(&self, origin: Vec2, dir: Vec2, q: Vec2) -> Side {
        Side::from_sign(self.snapped(dir.x * (q.y - origin.y), -dir.y * (q.x - origin.x)))
    }

    #[inline]
    fn cross_sign(&self, u: Vec2, w: Vec2) -> Ordering {
        self.snapped(u.x * w.y, -u.y * w.x)
    }

    #[inline]
    fn dot_diff_sign(&self, d: Vec2, a: Vec2, b: Vec2) -> Ordering {
        self.snapped(d.x * (b.x - a.x), d.y * (b.y - a.y))
    }

    #[inline]
    fn compare_distance(&self, p: Vec2, a: Vec2, b: Vec2) -> Ordering {
        let da = (p - a).norm2();
        let db = (p - b).norm2();
        if (da - db).abs() <= self.epsilon * da.max(db) {
            Ordering::Equal
        } else {
            da.partial_cmp(&db).unwrap_or(Ordering::Equal)
        }
    }

    #[inline]
    fn compare_projection_dir(&self, a: Vec2, b: Vec2, dir: Vec2) -> Ordering {
        project_dir(a, dir).partial_cmp(&project_dir(b, dir)).unwrap_or(Ordering::Equal)
    }

    fn compare_projection(&self, a: Vec2, b: Vec2, tau: f64) -> Ordering {
        project(a, tau).partial_cmp(&project(b, tau)).unwrap_or(Ordering::Equal)
    }
}

/// Predicates with exactly evaluated signs on `f64` inputs.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ExtendedKernel;

impl Kernel for ExtendedKernel {
    fn config(&self) -> KernelConfig {
        KernelConfig::extended()
    }

    #[inline]
    fn orient(&self, origin: Vec2, dir: Vec2, q: Vec2) -> Side {
        Side::from_sign(exact::orient(origin, dir, q))
    }

    #[inline]
    fn cross_sign(&self, u: Vec2, w: Vec2) -> Ordering {
        exact::cross_sign(u, w)
    }

    #[inline]
    fn dot_diff_sign(&self, d: Vec2, a: Vec2, b: Vec2) -> Ordering {
        exact::dot_diff_sign(d, a, b)
    }

    #[inline]
    fn compare_distance(&self, p: Vec2, a: Vec2, b: Vec2) -> Ordering {
        exact::compare_squared_distance(p, a, b)
    }

    #[inline]
    fn compare_projection_dir(&self, a: Vec2, b: Vec2, dir: Vec2) -> Ordering {
        exact::dot_diff_sign(dir, b, a)
    }
}

/// Projection `(p · s) / (s · s)` with `s = (cos τ, sin τ)`.
pub fn project(p: Vec2, tau: f64) -> f64 {
    project_dir(p, Vec2::new(tau.cos(), tau.sin()))
}

#[inline]
pub fn project_dir(p: Vec2, s: Vec2) -> f64 {
    p.dot(s) / s.dot(s)
}

/// The two rays `(p, θ_L)` and `(p, θ_R)` delimiting cone `i` at `p`.
pub fn cone_boundaries(p: Vec2, cone: &ConeSpec) -> (DirectedLine, DirectedLine) {
    let w = &cone.wedge;
    (DirectedLine::from_turn(p, w.num, w.den), DirectedLine::from_turn(p, w.num + 1, w.den))
}

/// Forward-forward intersection of two rays.
///
/// Colinear rays that share more than a single point report
/// [`KernelError::DegenerateOverlap`].
pub fn ray_intersection(r1: &DirectedLine, r2: &DirectedLine) -> Result<Option<Vec2>, KernelError> {
    // canonical argument order keeps the result bit-identical under swapping
    let key = |r: &DirectedLine| (r.origin.x, r.origin.y, r.dir.x, r.dir.y);
    let (r1, r2) = if key(r1).partial_cmp(&key(r2)) == Some(Ordering::Greater) { (r2, r1) } else { (r1, r2) };
    let denom_sign = exact::cross_sign(r1.dir, r2.dir);
    if denom_sign == Ordering::Equal {
        if exact::orient(r1.origin, r1.dir, r2.origin) != Ordering::Equal {
            return Ok(None);
        }
        if exact::dot_diff_sign(r1.dir, Vec2::default(), r2.dir) == Ordering::Greater {
            return Err(KernelError::DegenerateOverlap);
        }
        // opposite directions: they overlap iff each origin is ahead of the other
        return match exact::dot_diff_sign(r1.dir, r1.origin, r2.origin) {
            Ordering::Greater => Err(KernelError::DegenerateOverlap),
            Ordering::Equal => Ok(Some(r1.origin)),
            Ordering::Less => Ok(None),
        };
    }
    let denom = r1.dir.cross(r2.dir);
    let d = r2.origin - r1.origin;
    let t1 = d.cross(r2.dir) / denom;
    let t2 = d.cross(r1.dir) / denom;
    if t1 >= 0.0 && t2 >= 0.0 {
        Ok(Some(if t1 == 0.0 {
            r1.origin
        } else if t2 == 0.0 {
            r2.origin
        } else {
            r1.at(t1)
        }))
    } else {
        Ok(None)
    }
}

/// Intersection of the supporting lines, `None` when parallel.
pub fn line_intersection(l1: &DirectedLine, l2: &DirectedLine) -> Option<Vec2> {
    let denom = l1.dir.cross(l2.dir);
    if denom == 0.0 {
        return None;
    }
    let t = (l2.origin - l1.origin).cross(l2.dir) / denom;
    Some(l1.at(t))
}

/// Perpendicular bisector of `ab` through the midpoint with angle `∠ab + π/2`.
pub fn bisector(a: Vec2, b: Vec2) -> Result<DirectedLine, KernelError> {
    if a == b {
        return Err(KernelError::DegenerateBisector);
    }
    let mid = Vec2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
    let angle = normalize_angle((b - a).angle() + FRAC_PI_2);
    let d = (b - a).rot90_ccw();
    let len = d.norm2().sqrt();
    Ok(DirectedLine { origin: mid, angle, dir: Vec2::new(d.x / len, d.y / len) })
}

/// Angle of `q - p` in `[0, 2π)`.
pub fn angle_of(p: Vec2, q: Vec2) -> Result<f64, KernelError> {
    if p == q {
        return Err(KernelError::CoincidentPoints);
    }
    Ok((q - p).angle())
}

/// Runs `f` with the kernel selected by `config`.
pub fn with_kernel<R>(config: &KernelConfig, f: impl KernelVisitor<Output = R>) -> R {
    match config.mode {
        KernelMode::Inexact => f.visit(&InexactKernel { epsilon: config.epsilon }),
        KernelMode::Extended => f.visit(&ExtendedKernel),
    }
}

/// Monomorphization helper for [`with_kernel`].
pub trait KernelVisitor {
    type Output;
    fn visit<K: Kernel>(self, kernel: &K) -> Self::Output;
}
