//! Event queue for one sweep pass.
//!
//! Input events are known up front, so they live in a sorted array read
//! through a cursor. Intersection and deletion events appear and disappear as
//! the status changes; they go into a small addressable binary heap whose
//! handles carry a generation so stale removals are caught.

use std::cmp::Ordering;

use thiserror::Error;

use crate::kernel::{project_dir, Point, Vec2};
use crate::status::Handle;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueueError {
    #[error("duplicate-input: points {first} and {second} coincide at ({x}, {y})")]
    DuplicateInput { first: usize, second: usize, x: f64, y: f64 },
    #[error("stale-event: priority {priority} lies before the sweep position {current}")]
    StaleEvent { priority: f64, current: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    Input(usize),
    Intersection { left: Handle, right: Handle },
    Deletion { boundary: Handle },
}

impl EventKind {
    /// Tie rank: input before intersection before deletion.
    pub fn rank(&self) -> u8 {
        match self {
            EventKind::Input(_) => 0,
            EventKind::Intersection { .. } => 1,
            EventKind::Deletion { .. } => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub priority: f64,
    pub at: Vec2,
    pub kind: EventKind,
    /// Insertion sequence number, the last tie breaker.
    pub seq: u64,
}

impl Event {
    /// Total order by (priority, kind rank, x, y, sequence).
    pub fn key_cmp(&self, o: &Event) -> Ordering {
        self.priority
            .total_cmp(&o.priority)
            .then(self.kind.rank().cmp(&o.kind.rank()))
            .then(self.at.x.total_cmp(&o.at.x))
            .then(self.at.y.total_cmp(&o.at.y))
            .then(self.seq.cmp(&o.seq))
    }
}

/// Stable reference to a dynamic event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EventHandle {
    slot: u32,
    generation: u32,
}

/// Cumulative counters per event kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PopCounts {
    pub input: usize,
    pub intersection: usize,
    pub deletion: usize,
}

impl PopCounts {
    pub fn total(&self) -> usize {
        self.input + self.intersection + self.deletion
    }
}

#[derive(Clone, Copy, Debug)]
struct Slot {
    pos: u32,
    generation: u32,
}

const VACANT: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct EventQueue {
    statics: Vec<Event>,
    cursor: usize,
    heap: Vec<(Event, u32)>,
    slots: Vec<Slot>,
    free: Vec<u32>,
    next_seq: u64,
    current: f64,
    tolerance: f64,
    popped: PopCounts,
    max_dynamic: usize,
}

impl EventQueue {
    /// Builds the static part from `points` ordered along sweep direction `s`.
    /// `tolerance` is how far behind the sweep position a dynamic event may
    /// land before it is reported as stale.
    pub fn new(points: &[Point], s: Vec2, tolerance: f64) -> Result<Self, QueueError> {
        let mut statics: Vec<Event> = points
            .iter()
            .enumerate()
            .map(|(i, p)| Event { priority: project_dir(p.pos(), s), at: p.pos(), kind: EventKind::Input(p.id), seq: i as u64 })
            .collect();
        statics.sort_unstable_by(Event::key_cmp);
        // Coincident points share priority and coordinates, so they end up adjacent.
        for w in statics.windows(2) {
            if w[0].at == w[1].at {
                let (EventKind::Input(a), EventKind::Input(b)) = (w[0].kind, w[1].kind) else { unreachable!() };
                return Err(QueueError::DuplicateInput { first: a.min(b), second: a.max(b), x: w[0].at.x, y: w[0].at.y });
            }
        }
        let next_seq = statics.len() as u64;
        Ok(Self {
            statics,
            cursor: 0,
            heap: Vec::new(),
            slots: Vec::new(),
            free: Vec::new(),
            next_seq,
            current: f64::NEG_INFINITY,
            tolerance,
            popped: PopCounts::default(),
            max_dynamic: 0,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.cursor == self.statics.len() && self.heap.is_empty()
    }

    /// Priority of the last popped event.
    pub fn current(&self) -> f64 {
        self.current
    }

    pub fn dynamic_size(&self) -> usize {
        self.heap.len()
    }

    pub fn max_dynamic_size(&self) -> usize {
        self.max_dynamic
    }

    pub fn popped(&self) -> PopCounts {
        self.popped
    }

    /// Adds an intersection or deletion event. Priorities slightly behind the
    /// sweep position (within tolerance) are clamped to it.
    pub fn insert(&mut self, priority: f64, at: Vec2, kind: EventKind) -> Result<EventHandle, QueueError> {
        assert!(!matches!(kind, EventKind::Input(_)), "input events cannot be inserted dynamically");
        if priority.is_nan() || priority < self.current - self.tolerance {
            return Err(QueueError::StaleEvent { priority, current: self.current });
        }
        let priority = priority.max(self.current);
        let event = Event { priority, at, kind, seq: self.next_seq };
        self.next_seq += 1;
        let slot = match self.free.pop() {
            Some(s) => s,
            None => {
                self.slots.push(Slot { pos: VACANT, generation: 0 });
                (self.slots.len() - 1) as u32
            }
        };
        let pos = self.heap.len();
        self.heap.push((event, slot));
        self.slots[slot as usize].pos = pos as u32;
        self.sift_up(pos);
        self.max_dynamic = self.max_dynamic.max(self.heap.len());
        Ok(EventHandle { slot, generation: self.slots[slot as usize].generation })
    }

    /// Reads a live dynamic event.
    pub fn get(&self, h: EventHandle) -> &Event {
        &self.heap[self.pos_of(h)].0
    }

    /// Removes a live dynamic event.
    pub fn remove(&mut self, h: EventHandle) -> Event {
        let pos = self.pos_of(h);
        self.take_at(pos)
    }

    /// Pops a live dynamic event ahead of its turn, for events whose computed
    /// priority rounded past an event that must follow them. The sweep
    /// position is left unchanged.
    pub fn pop_early(&mut self, h: EventHandle) -> Event {
        let e = self.remove(h);
        match e.kind {
            EventKind::Input(_) => unreachable!("input events are static"),
            EventKind::Intersection { .. } => self.popped.intersection += 1,
            EventKind::Deletion { .. } => self.popped.deletion += 1,
        }
        e
    }

    /// Input events not yet popped, in pop order.
    pub fn pending_inputs(&self) -> &[Event] {
        &self.statics[self.cursor..]
    }

    /// Puts a just popped dynamic event back with a later priority, undoing
    /// its pop count.
    pub fn postpone(&mut self, e: Event, priority: f64) -> Result<EventHandle, QueueError> {
        match e.kind {
            EventKind::Input(_) => panic!("input events cannot be postponed"),
            EventKind::Intersection { .. } => self.popped.intersection -= 1,
            EventKind::Deletion { .. } => self.popped.deletion -= 1,
        }
        self.insert(priority, e.at, e.kind)
    }

    /// Pops the least event of both parts.
    pub fn pop(&mut self) -> Option<Event> {
        let from_static = match (self.statics.get(self.cursor), self.heap.first()) {
            (None, None) => return None,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (Some(s), Some((d, _))) => s.key_cmp(d) == Ordering::Less,
        };
        let e = if from_static {
            self.cursor += 1;
            self.statics[self.cursor - 1]
        } else {
            self.take_at(0)
        };
        match e.kind {
            EventKind::Input(_) => self.popped.input += 1,
            EventKind::Intersection { .. } => self.popped.intersection += 1,
            EventKind::Deletion { .. } => self.popped.deletion += 1,
        }
        self.current = self.current.max(e.priority);
        Some(e)
    }

    fn pos_of(&self, h: EventHandle) -> usize {
        let slot = self.slots.get(h.slot as usize).expect("foreign event handle");
        assert!(slot.generation == h.generation && slot.pos != VACANT, "invalidated event handle");
        slot.pos as usize
    }

    fn take_at(&mut self, pos: usize) -> Event {
        let last = self.heap.len() - 1;
        self.heap.swap(pos, last);
        let (event, slot) = self.heap.pop().unwrap();
        let s = &mut self.slots[slot as usize];
        s.pos = VACANT;
        s.generation = s.generation.wrapping_add(1);
        self.free.push(slot);
        if pos < self.heap.len() {
            self.slots[self.heap[pos].1 as usize].pos = pos as u32;
            let pos = self.sift_up(pos);
            self.sift_down(pos);
        }
        event
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.heap[a].0.key_cmp(&self.heap[b].0) == Ordering::Less
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.heap.swap(a, b);
        self.slots[self.heap[a].1 as usize].pos = a as u32;
        self.slots[self.heap[b].1 as usize].pos = b as u32;
    }

    fn sift_up(&mut self, mut pos: usize) -> usize {
        while pos > 0 {
            let parent = (pos - 1) / 2;
            if !self.less(pos, parent) {
                break;
            }
            self.swap(pos, parent);
            pos = parent;
        }
        pos
    }

    fn sift_down(&mut self, mut pos: usize) {
        loop {
            let (l, r) = (2 * pos + 1, 2 * pos + 2);
            let mut m = pos;
            if l < self.heap.len() && self.less(l, m) {
                m = l;
            }
            if r < self.heap.len() && self.less(r, m) {
                m = r;
            }
            if m == pos {
                return;
            }
            self.swap(pos, m);
            pos = m;
        }
    }
}
