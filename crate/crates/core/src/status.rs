//! Sweepline status: the boundaries currently crossing the sweepline.
//!
//! Boundaries are the leaves of an AVL tree and are also threaded into a
//! doubly linked list. Internal nodes carry only routing data: children,
//! parent, height and a link to the rightmost leaf of their subtree. Because
//! the algorithm always knows *where* a change happens, insertion and removal
//! start from a known leaf and skip the search phase entirely; only the
//! rebalancing walk remains.

use std::fmt;

use crate::kernel::{DirectedLine, Side, Vec2};

/// Region label: the apex point id, or the unbounded region seen by nobody.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RegionId(u32);

impl RegionId {
    pub const INFINITE: RegionId = RegionId(u32::MAX);

    pub fn apex(id: usize) -> Self {
        assert!(id < u32::MAX as usize);
        RegionId(id as u32)
    }

    pub fn point(self) -> Option<usize> {
        (self != Self::INFINITE).then_some(self.0 as usize)
    }

    pub fn is_infinite(self) -> bool {
        self == Self::INFINITE
    }
}

impl fmt::Debug for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.point() {
            Some(p) => write!(f, "R{p}"),
            None => f.write_str("R∞"),
        }
    }
}

/// How a boundary's side test is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Against the supporting line of `geometry`.
    Ray,
    /// By comparing distances to the two apexes of the adjacent regions.
    Bisector,
}

/// Geometry a composite boundary switches to once the sweep reaches `point`;
/// the continuation is always a bisector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PendingSwap {
    pub point: Vec2,
    pub geometry: DirectedLine,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Boundary {
    /// Supporting line. Its origin is any point of the line, preferably an
    /// exact one such as an input point.
    pub geometry: DirectedLine,
    /// Where the boundary begins.
    pub start: Vec2,
    pub kind: BoundaryKind,
    pub left: RegionId,
    pub right: RegionId,
    pub pending: Option<PendingSwap>,
    /// Visibility edge of a composite boundary's anchor, kept after the swap.
    pub edge: Option<DirectedLine>,
}

impl Boundary {
    /// Ray boundary beginning at its origin.
    pub fn new(geometry: DirectedLine, left: RegionId, right: RegionId) -> Self {
        debug_assert!(left != right, "boundary between a region and itself");
        Self { geometry, start: geometry.origin, kind: BoundaryKind::Ray, left, right, pending: None, edge: None }
    }

    pub fn starting_at(self, start: Vec2) -> Self {
        Self { start, ..self }
    }

    pub fn with_kind(self, kind: BoundaryKind) -> Self {
        Self { kind, ..self }
    }

    pub fn composite(geometry: DirectedLine, swap: Option<PendingSwap>, left: RegionId, right: RegionId) -> Self {
        Self { pending: swap, edge: Some(geometry), ..Self::new(geometry, left, right) }
    }
}

/// Handle to a leaf (boundary) of the status structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Handle(u32);

impl Handle {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[cfg(test)]
    pub(crate) fn from_index(i: u32) -> Self {
        Handle(i)
    }
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Debug)]
struct Node {
    parent: u32,
    height: u32,
    // internal nodes
    left: u32,
    right: u32,
    rightmost: u32,
    // leaves
    prev: u32,
    next: u32,
    boundary: Option<Boundary>,
}

impl Node {
    fn leaf(boundary: Boundary) -> Self {
        Self { parent: NIL, height: 0, left: NIL, right: NIL, rightmost: NIL, prev: NIL, next: NIL, boundary: Some(boundary) }
    }

    fn internal(left: u32, right: u32) -> Self {
        Self { parent: NIL, height: 0, left, right, rightmost: NIL, prev: NIL, next: NIL, boundary: None }
    }

    fn is_leaf(&self) -> bool {
        self.boundary.is_some()
    }
}

/// Validation outcome: the first violated invariant, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport {
    Pass,
    Fail { node: usize, reason: String },
}

impl ValidationReport {
    pub fn is_pass(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

#[derive(Clone, Debug, Default)]
pub struct SweepStatus {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    head: u32,
    tail: u32,
    len: usize,
    rotations: u64,
}

impl SweepStatus {
    pub fn new() -> Self {
        Self { nodes: Vec::new(), free: Vec::new(), root: NIL, head: NIL, tail: NIL, len: 0, rotations: 0 }
    }

    /// Number of boundaries.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Rotations performed so far (a double rotation counts twice).
    pub fn rotations(&self) -> u64 {
        self.rotations
    }

    pub fn height(&self) -> u32 {
        if self.root == NIL {
            0
        } else {
            self.nodes[self.root as usize].height
        }
    }

    pub fn boundary(&self, h: Handle) -> &Boundary {
        self.nodes[h.index()].boundary.as_ref().expect("handle does not reference a live boundary")
    }

    pub fn first(&self) -> Option<Handle> {
        wrap(self.head)
    }

    pub fn last(&self) -> Option<Handle> {
        wrap(self.tail)
    }

    /// Left neighbor; `None` is the BEGIN sentinel.
    pub fn prev(&self, h: Handle) -> Option<Handle> {
        self.check_live(h);
        wrap(self.nodes[h.index()].prev)
    }

    /// Right neighbor; `None` is the END sentinel.
    pub fn succ(&self, h: Handle) -> Option<Handle> {
        self.check_live(h);
        wrap(self.nodes[h.index()].next)
    }

    /// Boundaries in sweepline order.
    pub fn iter(&self) -> impl Iterator<Item = (Handle, &Boundary)> + '_ {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            if cur == NIL {
                return None;
            }
            let h = Handle(cur);
            let node = &self.nodes[cur as usize];
            cur = node.next;
            Some((h, node.boundary.as_ref().unwrap()))
        })
    }

    fn check_live(&self, h: Handle) {
        assert!(self.nodes.get(h.index()).is_some_and(Node::is_leaf), "stale status handle {h:?}");
    }

    fn alloc(&mut self, node: Node) -> u32 {
        if let Some(i) = self.free.pop() {
            self.nodes[i as usize] = node;
            i
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    fn release(&mut self, i: u32) {
        let n = &mut self.nodes[i as usize];
        n.boundary = None;
        n.parent = NIL;
        n.left = NIL;
        n.right = NIL;
        self.free.push(i);
    }

    #[inline]
    fn rightmost_of(&self, i: u32) -> u32 {
        let n = &self.nodes[i as usize];
        if n.is_leaf() {
            i
        } else {
            n.rightmost
        }
    }

    #[inline]
    fn h(&self, i: u32) -> u32 {
        self.nodes[i as usize].height
    }

    /// Puts `new` where `old` hangs in the tree.
    fn replace_child(&mut self, old: u32, new: u32) {
        let parent = self.nodes[old as usize].parent;
        self.nodes[new as usize].parent = parent;
        if parent == NIL {
            self.root = new;
        } else {
            let p = &mut self.nodes[parent as usize];
            if p.left == old {
                p.left = new;
            } else {
                debug_assert_eq!(p.right, old);
                p.right = new;
            }
        }
    }

    fn make_internal(&mut self, left: u32, right: u32) -> u32 {
        let i = self.alloc(Node::internal(left, right));
        self.nodes[left as usize].parent = i;
        self.nodes[right as usize].parent = i;
        self.refresh(i);
        i
    }

    /// Recomputes height and rightmost link of internal node `i` from its children.
    #[inline]
    fn refresh(&mut self, i: u32) {
        let (l, r) = (self.nodes[i as usize].left, self.nodes[i as usize].right);
        let height = 1 + self.h(l).max(self.h(r));
        let rightmost = self.rightmost_of(r);
        let n = &mut self.nodes[i as usize];
        n.height = height;
        n.rightmost = rightmost;
    }

    fn rotate_left(&mut self, x: u32) -> u32 {
        let y = self.nodes[x as usize].right;
        let b = self.nodes[y as usize].left;
        self.replace_child(x, y);
        self.nodes[x as usize].right = b;
        self.nodes[b as usize].parent = x;
        self.nodes[y as usize].left = x;
        self.nodes[x as usize].parent = y;
        self.refresh(x);
        self.refresh(y);
        self.rotations += 1;
        y
    }

    fn rotate_right(&mut self, x: u32) -> u32 {
        let y = self.nodes[x as usize].left;
        let b = self.nodes[y as usize].right;
        self.replace_child(x, y);
        self.nodes[x as usize].left = b;
        self.nodes[b as usize].parent = x;
        self.nodes[y as usize].right = x;
        self.nodes[x as usize].parent = y;
        self.refresh(x);
        self.refresh(y);
        self.rotations += 1;
        y
    }

    fn balance(&self, i: u32) -> i64 {
        let n = &self.nodes[i as usize];
        self.h(n.left) as i64 - self.h(n.right) as i64
    }

    /// Walks up from internal node `start`, restoring heights, rightmost links
    /// and AVL balance. Stops as soon as a subtree is unchanged.
    fn retrace(&mut self, start: u32) {
        let mut cur = start;
        while cur != NIL {
            let old_height = self.nodes[cur as usize].height;
            let old_rightmost = self.nodes[cur as usize].rightmost;
            self.refresh(cur);
            let bal = self.balance(cur);
            let top = if bal > 1 {
                let l = self.nodes[cur as usize].left;
                if self.balance(l) < 0 {
                    self.rotate_left(l);
                }
                self.rotate_right(cur)
            } else if bal < -1 {
                let r = self.nodes[cur as usize].right;
                if self.balance(r) > 0 {
                    self.rotate_right(r);
                }
                self.rotate_left(cur)
            } else {
                cur
            };
            let n = &self.nodes[top as usize];
            if n.height == old_height && n.rightmost == old_rightmost {
                break;
            }
            cur = n.parent;
        }
    }

    /// Inserts the adjacent pair `[left, right]` directly after `after`
    /// (`None`: at the front), with a single rebalancing walk.
    pub fn insert_pair(&mut self, after: Option<Handle>, left: Boundary, right: Boundary) -> (Handle, Handle) {
        debug_assert_eq!(left.right, right.left, "paired boundaries must share their middle region");
        let l = self.alloc(Node::leaf(left));
        let r = self.alloc(Node::leaf(right));
        let pair = self.make_internal(l, r);
        self.len += 2;

        let (prev, next) = match after {
            Some(a) => {
                self.check_live(a);
                (a.0, self.nodes[a.index()].next)
            }
            None => (NIL, self.head),
        };
        self.nodes[l as usize].prev = prev;
        self.nodes[l as usize].next = r;
        self.nodes[r as usize].prev = l;
        self.nodes[r as usize].next = next;
        if prev == NIL {
            self.head = l;
        } else {
            self.nodes[prev as usize].next = l;
        }
        if next == NIL {
            self.tail = r;
        } else {
            self.nodes[next as usize].prev = r;
        }

        if self.root == NIL {
            self.root = pair;
            self.nodes[pair as usize].parent = NIL;
            return (Handle(l), Handle(r));
        }
        // Hang the pair next to an existing leaf: after `prev` if there is
        // one, otherwise in front of the old head.
        let (anchor, pair_first) = if prev != NIL { (prev, false) } else { (next, true) };
        let parent_before = self.nodes[anchor as usize].parent;
        let joint = self.alloc(Node::internal(NIL, NIL));
        self.nodes[joint as usize].parent = parent_before;
        if parent_before == NIL {
            self.root = joint;
        } else {
            let p = &mut self.nodes[parent_before as usize];
            if p.left == anchor {
                p.left = joint;
            } else {
                p.right = joint;
            }
        }
        let (a, b) = if pair_first { (pair, anchor) } else { (anchor, pair) };
        self.nodes[joint as usize].left = a;
        self.nodes[joint as usize].right = b;
        self.nodes[a as usize].parent = joint;
        self.nodes[b as usize].parent = joint;
        self.refresh(joint);
        if parent_before != NIL {
            self.retrace(parent_before);
        }
        (Handle(l), Handle(r))
    }

    /// Replaces the adjacent pair `[left, right]` by `replacement`, which
    /// takes over `left`'s handle and position.
    pub fn replace_pair(&mut self, left: Handle, right: Handle, replacement: Boundary) -> Handle {
        self.check_live(left);
        self.check_live(right);
        assert_eq!(self.nodes[left.index()].next, right.0, "replace_pair on non-adjacent boundaries");
        self.nodes[left.index()].boundary = Some(replacement);
        self.remove_leaf(right.0);
        left
    }

    fn remove_leaf(&mut self, r: u32) {
        let (prev, next) = (self.nodes[r as usize].prev, self.nodes[r as usize].next);
        if prev == NIL {
            self.head = next;
        } else {
            self.nodes[prev as usize].next = next;
        }
        if next == NIL {
            self.tail = prev;
        } else {
            self.nodes[next as usize].prev = prev;
        }
        let p = self.nodes[r as usize].parent;
        self.len -= 1;
        if p == NIL {
            self.root = NIL;
            self.release(r);
            return;
        }
        let sibling = if self.nodes[p as usize].left == r { self.nodes[p as usize].right } else { self.nodes[p as usize].left };
        let grand = self.nodes[p as usize].parent;
        self.replace_child(p, sibling);
        self.release(p);
        self.release(r);
        if grand != NIL {
            self.retrace(grand);
        }
    }

    /// Swaps a composite boundary to its bisector continuation in place.
    pub fn swap_geometry(&mut self, h: Handle, geometry: DirectedLine) {
        self.check_live(h);
        let b = self.nodes[h.index()].boundary.as_mut().unwrap();
        let swap = b.pending.take().expect("swap_geometry on a boundary without a pending swap");
        b.geometry = geometry;
        b.start = swap.point;
        b.kind = BoundaryKind::Bisector;
    }

    /// Locates the region containing a point: returns `(B_L, B_R)` where
    /// `B_R` is the first boundary with the point strictly to its right
    /// (`side` returns [`Side::Right`]) and `B_L` its predecessor. Points on a
    /// boundary belong to the region right of it in sweepline order.
    pub fn find_region(&self, mut side: impl FnMut(&Boundary) -> Side) -> (Option<Handle>, Option<Handle>) {
        if self.root == NIL {
            return (None, None);
        }
        let mut cur = self.root;
        while !self.nodes[cur as usize].is_leaf() {
            let n = &self.nodes[cur as usize];
            let probe = self.rightmost_of(n.left);
            cur = if side(self.nodes[probe as usize].boundary.as_ref().unwrap()) == Side::Right { n.left } else { n.right };
        }
        let leaf = &self.nodes[cur as usize];
        if side(leaf.boundary.as_ref().unwrap()) == Side::Right {
            (wrap(leaf.prev), Some(Handle(cur)))
        } else {
            (Some(Handle(cur)), wrap(leaf.next))
        }
    }

    /// Checks AVL balance, heights, parent links, rightmost links and that
    /// the in-order leaf sequence equals the linked list.
    pub fn validate(&self) -> ValidationReport {
        let fail = |node: u32, reason: String| ValidationReport::Fail { node: node as usize, reason };
        if self.root == NIL {
            if self.head != NIL || self.tail != NIL || self.len != 0 {
                return fail(NIL, "empty tree with nonempty list".into());
            }
            return ValidationReport::Pass;
        }
        if self.nodes[self.root as usize].parent != NIL {
            return fail(self.root, "root has a parent".into());
        }
        let mut leaves = Vec::with_capacity(self.len);
        // explicit stack: (node, visited children)
        let mut stack = vec![(self.root, false)];
        while let Some((i, done)) = stack.pop() {
            let n = &self.nodes[i as usize];
            if n.is_leaf() {
                if n.height != 0 {
                    return fail(i, "leaf height is not zero".into());
                }
                leaves.push(i);
                continue;
            }
            if done {
                let (l, r) = (n.left, n.right);
                if self.nodes[l as usize].parent != i || self.nodes[r as usize].parent != i {
                    return fail(i, "child parent link mismatch".into());
                }
                let (hl, hr) = (self.h(l), self.h(r));
                if n.height != 1 + hl.max(hr) {
                    return fail(i, format!("height {} but children {hl}/{hr}", n.height));
                }
                if hl.abs_diff(hr) > 1 {
                    return fail(i, format!("unbalanced: {hl} vs {hr}"));
                }
                let mut walk = i;
                while !self.nodes[walk as usize].is_leaf() {
                    walk = self.nodes[walk as usize].right;
                }
                if n.rightmost != walk {
                    return fail(i, "rightmost link does not reach the maximum leaf".into());
                }
                continue;
            }
            if n.left == NIL || n.right == NIL {
                return fail(i, "internal node with a missing child".into());
            }
            stack.push((i, true));
            stack.push((n.right, false));
            stack.push((n.left, false));
        }
        if leaves.len() != self.len {
            return fail(NIL, format!("{} leaves but len {}", leaves.len(), self.len));
        }
        let mut cur = self.head;
        let mut prev = NIL;
        for &leaf in &leaves {
            if cur != leaf {
                return fail(leaf, "in-order traversal differs from list order".into());
            }
            if self.nodes[cur as usize].prev != prev {
                return fail(cur, "broken prev link".into());
            }
            prev = cur;
            cur = self.nodes[cur as usize].next;
        }
        if cur != NIL || self.tail != prev {
            return fail(prev, "list longer than tree or bad tail".into());
        }
        ValidationReport::Pass
    }

    #[cfg(test)]
    fn corrupt_height(&mut self) -> bool {
        if self.root == NIL || self.nodes[self.root as usize].is_leaf() {
            return false;
        }
        self.nodes[self.root as usize].height += 1;
        true
    }
}

#[inline]
fn wrap(i: u32) -> Option<Handle> {
    (i != NIL).then_some(Handle(i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{ExtendedKernel, Kernel};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Boundary tagged with a label in its origin x coordinate.
    fn tagged(label: u32) -> Boundary {
        Boundary::new(DirectedLine::new(Vec2::new(label as f64, 0.0), 0.0), RegionId(label), RegionId(label + 1))
    }

    fn pair(label: u32) -> (Boundary, Boundary) {
        let mut a = tagged(label);
        let mut b = tagged(label + 1);
        a.right = RegionId(1_000_000 + label);
        b.left = a.right;
        (a, b)
    }

    fn labels(s: &SweepStatus) -> Vec<u32> {
        s.iter().map(|(_, b)| b.geometry.origin.x as u32).collect()
    }

    #[test]
    fn insert_into_empty() {
        let mut s = SweepStatus::new();
        let (b1, b2) = pair(1);
        let (h1, h2) = s.insert_pair(None, b1, b2);
        assert_eq!(labels(&s), vec![1, 2]);
        assert_eq!(s.succ(h1), Some(h2));
        assert_eq!(s.prev(h1), None);
        assert_eq!(s.succ(h2), None);
        assert!(s.validate().is_pass());
    }

    #[test]
    fn insert_between_and_replace() {
        let mut s = SweepStatus::new();
        let (a, d) = pair(10);
        let (ha, hd) = s.insert_pair(None, a, d);
        let (b, c) = pair(20);
        let (hb, hc) = s.insert_pair(Some(ha), b, c);
        assert_eq!(labels(&s), vec![10, 20, 21, 11]);
        assert!(s.validate().is_pass());

        let hx = s.replace_pair(hb, hc, tagged(99));
        assert_eq!(labels(&s), vec![10, 99, 11]);
        assert_eq!(s.succ(ha), Some(hx));
        assert_eq!(s.prev(hd), Some(hx));
        assert!(s.validate().is_pass());
    }

    #[test]
    fn replace_only_pair() {
        let mut s = SweepStatus::new();
        let (b, c) = pair(1);
        let (hb, hc) = s.insert_pair(None, b, c);
        let hx = s.replace_pair(hb, hc, tagged(7));
        assert_eq!(labels(&s), vec![7]);
        assert_eq!(s.prev(hx), None);
        assert_eq!(s.succ(hx), None);
        assert!(s.validate().is_pass());
        assert_eq!(s.prev(s.first().unwrap()), None);
    }

    #[test]
    #[should_panic(expected = "non-adjacent")]
    fn replace_non_adjacent_panics() {
        let mut s = SweepStatus::new();
        let (a, d) = pair(10);
        let (ha, _) = s.insert_pair(None, a, d);
        let (b, c) = pair(20);
        let (_, hc) = s.insert_pair(Some(ha), b, c);
        s.replace_pair(ha, hc, tagged(0));
    }

    #[test]
    fn swap_geometry_keeps_neighbors() {
        let mut s = SweepStatus::new();
        let (a, d) = pair(10);
        let (ha, hd) = s.insert_pair(None, a, d);
        let w = Vec2::new(3.0, 4.0);
        let post = DirectedLine::new(w, 1.0);
        let comp = Boundary::composite(
            DirectedLine::new(Vec2::new(0.0, 0.0), 0.9),
            Some(PendingSwap { point: w, geometry: post }),
            RegionId(1),
            RegionId(2),
        );
        let hx = s.replace_pair(ha, hd, comp);
        let (b, c) = pair(30);
        let (hb, _) = s.insert_pair(Some(hx), b, c);
        s.swap_geometry(hx, post);
        assert_eq!(s.boundary(hx).geometry, post);
        assert!(s.boundary(hx).pending.is_none());
        assert_eq!(s.boundary(hx).start, w);
        assert_eq!(s.boundary(hx).kind, BoundaryKind::Bisector);
        assert_eq!(s.succ(hx), Some(hb));
        assert_eq!(s.prev(hx), None);
    }

    #[test]
    #[should_panic(expected = "pending swap")]
    fn swap_without_pending_panics() {
        let mut s = SweepStatus::new();
        let (a, d) = pair(1);
        let (ha, _) = s.insert_pair(None, a, d);
        s.swap_geometry(ha, DirectedLine::new(Vec2::new(1.0, 0.0), 0.0));
    }

    #[test]
    fn validate_reports_corruption() {
        let mut s = SweepStatus::new();
        assert!(s.validate().is_pass());
        let mut after = None;
        for i in 0..8 {
            let (a, b) = pair(i * 2);
            after = Some(s.insert_pair(after, a, b).1);
        }
        assert!(s.validate().is_pass());
        assert!(s.corrupt_height());
        match s.validate() {
            ValidationReport::Fail { node, .. } => assert_eq!(node, s.root as usize),
            ValidationReport::Pass => panic!("corruption not detected"),
        }
    }

    #[test]
    fn find_region_empty_and_single_pair() {
        let k = ExtendedKernel;
        let s = SweepStatus::new();
        assert_eq!(s.find_region(|_| Side::Right), (None, None));

        // one processed point q at the origin, cone (0, π/2): its rays point
        // down-left (π) and down (3π/2); sweep direction is 5π/4
        let mut s = SweepStatus::new();
        let q = Vec2::new(0.0, 0.0);
        let bl = Boundary::new(DirectedLine::from_turn(q, 2, 4), RegionId::INFINITE, RegionId::apex(0));
        let br = Boundary::new(DirectedLine::from_turn(q, 3, 4), RegionId::apex(0), RegionId::INFINITE);
        let (hl, hr) = s.insert_pair(None, bl, br);
        let p = Vec2::new(-1.0, -2.0);
        let (l, r) = s.find_region(|b| k.side_of_line(&b.geometry, p));
        assert_eq!((l, r), (Some(hl), Some(hr)));
        assert_eq!(s.boundary(hl).right, RegionId::apex(0));
        // outside the cone on either side
        let (l, r) = s.find_region(|b| k.side_of_line(&b.geometry, Vec2::new(-5.0, 1.0)));
        assert_eq!((l, r), (None, Some(hl)));
        let (l, r) = s.find_region(|b| k.side_of_line(&b.geometry, Vec2::new(1.0, -5.0)));
        assert_eq!((l, r), (Some(hr), None));
    }

    /// Random operation sequences compared against a plain list of labels.
    fn run_random_ops(seed: u64, ops: usize) -> (SweepStatus, Vec<u32>, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = SweepStatus::new();
        let mut reference: Vec<(u32, Handle)> = Vec::new();
        let mut label = 0u32;
        let mut structural_ops = 0;
        for _ in 0..ops {
            let insert = reference.len() < 2 || rng.random_bool(0.55);
            if insert {
                let pos = rng.random_range(0..=reference.len());
                let after = if pos == 0 { None } else { Some(reference[pos - 1].1) };
                let (a, b) = pair(label);
                let (ha, hb) = s.insert_pair(after, a, b);
                reference.insert(pos, (label, ha));
                reference.insert(pos + 1, (label + 1, hb));
                label += 2;
            } else {
                let pos = rng.random_range(0..reference.len() - 1);
                let (l, r) = (reference[pos].1, reference[pos + 1].1);
                let h = s.replace_pair(l, r, tagged(label));
                reference.splice(pos..pos + 2, [(label, h)]);
                label += 1;
            }
            structural_ops += 1;
        }
        let labels_ref = reference.iter().map(|x| x.0).collect();
        (s, labels_ref, structural_ops)
    }

    #[test]
    fn random_sequences_match_reference_list() {
        for seed in 0..50 {
            let (s, reference, ops) = run_random_ops(seed, 400);
            assert_eq!(labels(&s), reference);
            assert_eq!(s.validate(), ValidationReport::Pass);
            assert!(s.rotations() <= 3 * ops as u64);
            let bound = 1.44 * ((s.len() + 2) as f64).log2();
            assert!((s.height() as f64) <= bound + 1.0, "height {} > {bound}", s.height());
        }
    }

    #[test]
    fn find_region_matches_linear_scan() {
        // Parallel downward rays at sorted x positions model a consistent status.
        let k = ExtendedKernel;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut s = SweepStatus::new();
            let m = rng.random_range(1..40) * 2;
            let mut xs: Vec<f64> = (0..m).map(|_| rng.random_range(-100.0..100.0f64).round()).collect();
            xs.sort_by(f64::total_cmp);
            let mut after = None;
            for c in xs.chunks(2) {
                let mk = |x: f64, l, r| Boundary::new(DirectedLine::from_turn(Vec2::new(x, 0.0), 3, 4), RegionId(l), RegionId(r));
                let (_, hb) = s.insert_pair(after, mk(c[0], 1, 2), mk(c[1], 2, 3));
                after = Some(hb);
            }
            for _ in 0..20 {
                let p = Vec2::new(rng.random_range(-110.0..110.0f64).round(), rng.random_range(-5.0..5.0));
                let got = s.find_region(|b| k.side_of_line(&b.geometry, p));
                // linear scan: first boundary with p strictly to its right
                let all: Vec<_> = s.iter().map(|(h, _)| h).collect();
                let idx = all.iter().position(|&h| k.side_of_line(&s.boundary(h).geometry, p) == Side::Right);
                let expect = match idx {
                    Some(0) => (None, Some(all[0])),
                    Some(i) => (Some(all[i - 1]), Some(all[i])),
                    None => (all.last().copied(), None),
                };
                assert_eq!(got, expect);
            }
        }
    }

    proptest! {
        #[test]
        fn prop_tree_matches_list(seed in any::<u64>(), ops in 1usize..300) {
            let (s, reference, _) = run_random_ops(seed, ops);
            prop_assert_eq!(labels(&s), reference);
            prop_assert!(s.validate().is_pass());
        }
    }
}
