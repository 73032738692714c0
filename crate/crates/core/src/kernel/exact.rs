//! Error-free transformations and small floating-point expansions.
//!
//! Every predicate used by the extended kernel reduces to the sign of a short
//! sum of products of input coordinates (or their differences). Those sums are
//! evaluated exactly as nonoverlapping expansions, after a cheap filter that
//! settles the easy cases in plain `f64`.

use std::cmp::Ordering;

use super::Vec2;

/// Relative error bound for the filtered evaluations below. It covers the few
/// roundings each predicate performs with a comfortable margin.
const FILTER_BOUND: f64 = 1e-15;

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let x = a + b;
    let bv = x - a;
    let av = x - bv;
    (x, (a - av) + (b - bv))
}

#[inline]
pub fn two_diff(a: f64, b: f64) -> (f64, f64) {
    let x = a - b;
    let bv = a - x;
    let av = x + bv;
    (x, (a - av) + (bv - b))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let x = a * b;
    (x, a.mul_add(b, -x))
}

/// A nonoverlapping expansion with components sorted by increasing magnitude.
#[derive(Clone, Debug)]
pub struct Expansion {
    comps: [f64; 32],
    len: usize,
}

impl Default for Expansion {
    fn default() -> Self {
        Self::new()
    }
}

impl Expansion {
    pub fn new() -> Self {
        Self { comps: [0.0; 32], len: 0 }
    }

    /// Adds `b` exactly (Shewchuk's grow-expansion with zero elimination).
    pub fn add(&mut self, b: f64) {
        let mut q = b;
        let mut out = 0;
        for i in 0..self.len {
            let (sum, err) = two_sum(q, self.comps[i]);
            q = sum;
            if err != 0.0 {
                self.comps[out] = err;
                out += 1;
            }
        }
        if q != 0.0 {
            assert!(out < self.comps.len(), "expansion capacity exceeded");
            self.comps[out] = q;
            out += 1;
        }
        self.len = out;
    }

    pub fn add_product(&mut self, a: f64, b: f64) {
        let (x, y) = two_prod(a, b);
        self.add(y);
        self.add(x);
    }

    /// Exact sign of the represented value.
    pub fn sign(&self) -> Ordering {
        match self.len {
            0 => Ordering::Equal,
            n => self.comps[n - 1].partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    /// Best `f64` approximation of the value.
    pub fn estimate(&self) -> f64 {
        self.comps[..self.len].iter().sum()
    }
}

fn sign_of(v: f64) -> Ordering {
    v.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
}

/// Exact sign of `m0 * (a0 - b0) + m1 * (a1 - b1)`.
pub fn sign_sum_scaled_diffs(m0: f64, a0: f64, b0: f64, m1: f64, a1: f64, b1: f64) -> Ordering {
    let t0 = m0 * (a0 - b0);
    let t1 = m1 * (a1 - b1);
    let approx = t0 + t1;
    if approx.abs() > FILTER_BOUND * (t0.abs() + t1.abs()) {
        return sign_of(approx);
    }
    let mut e = Expansion::new();
    for (m, a, b) in [(m0, a0, b0), (m1, a1, b1)] {
        let (h, l) = two_diff(a, b);
        e.add_product(m, h);
        e.add_product(m, l);
    }
    e.sign()
}

/// Exact sign of the cross product `u × w`.
pub fn cross_sign(u: Vec2, w: Vec2) -> Ordering {
    let t0 = u.x * w.y;
    let t1 = u.y * w.x;
    let approx = t0 - t1;
    if approx.abs() > FILTER_BOUND * (t0.abs() + t1.abs()) {
        return sign_of(approx);
    }
    let mut e = Expansion::new();
    e.add_product(u.x, w.y);
    e.add_product(-u.y, w.x);
    e.sign()
}

/// Exact sign of `cross(dir, q - origin)`: positive when `q` is to the left.
pub fn orient(origin: Vec2, dir: Vec2, q: Vec2) -> Ordering {
    sign_sum_scaled_diffs(dir.x, q.y, origin.y, -dir.y, q.x, origin.x)
}

/// Exact sign of `d · (b - a)`.
pub fn dot_diff_sign(d: Vec2, a: Vec2, b: Vec2) -> Ordering {
    sign_sum_scaled_diffs(d.x, b.x, a.x, d.y, b.y, a.y)
}

/// Exact comparison of `|p - a|²` against `|p - b|²`.
pub fn compare_squared_distance(p: Vec2, a: Vec2, b: Vec2) -> Ordering {
    let da = (p - a).norm2();
    let db = (p - b).norm2();
    let approx = da - db;
    if approx.abs() > FILTER_BOUND * (da + db) {
        return sign_of(approx);
    }
    let mut e = Expansion::new();
    for (pc, ac, bc) in [(p.x, a.x, b.x), (p.y, a.y, b.y)] {
        let (h, l) = two_diff(pc, ac);
        e.add_product(h, h);
        e.add_product(2.0 * h, l);
        e.add_product(l, l);
        let (h, l) = two_diff(pc, bc);
        e.add_product(-h, h);
        e.add_product(-2.0 * h, l);
        e.add_product(-l, l);
    }
    e.sign()
}
