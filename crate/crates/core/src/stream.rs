//! The pull interface shared by every enumeration mode.

use std::ops::Sub;

use crate::ranking::OutputTuple;

/// Work counters. Priority-queue pushes and pops are the delay proxy;
/// `ops` counts elementary steps of queue-free modes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub pq_push: u64,
    pub pq_pop: u64,
    pub topdown_calls: u64,
    pub nontrivial_topdown: u64,
    pub cells: u64,
    pub ops: u64,
    pub emitted: u64,
}

impl Counters {
    pub fn pq_ops(&self) -> u64 {
        self.pq_push + self.pq_pop
    }

    pub fn add(&mut self, other: &Counters) {
        self.pq_push += other.pq_push;
        self.pq_pop += other.pq_pop;
        self.topdown_calls += other.topdown_calls;
        self.nontrivial_topdown += other.nontrivial_topdown;
        self.cells += other.cells;
        self.ops += other.ops;
        self.emitted += other.emitted;
    }
}

impl Sub for Counters {
    type Output = Counters;

    fn sub(self, rhs: Counters) -> Counters {
        Counters {
            pq_push: self.pq_push - rhs.pq_push,
            pq_pop: self.pq_pop - rhs.pq_pop,
            topdown_calls: self.topdown_calls - rhs.topdown_calls,
            nontrivial_topdown: self.nontrivial_topdown - rhs.nontrivial_topdown,
            cells: self.cells - rhs.cells,
            ops: self.ops - rhs.ops,
            emitted: self.emitted - rhs.emitted,
        }
    }
}

/// A ranked stream of distinct answers. Successive answers strictly increase
/// under the query's output order.
pub trait Enumerator {
    fn next_answer(&mut self) -> Option<OutputTuple>;

    /// Cumulative counters since the stream was created, preprocessing
    /// included.
    fn counters(&self) -> Counters;
}

impl<E: Enumerator + ?Sized> Enumerator for Box<E> {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        (**self).next_answer()
    }

    fn counters(&self) -> Counters {
        (**self).counters()
    }
}

/// Pulls up to `limit` answers (all when `None`).
pub fn drain<E: Enumerator + ?Sized>(e: &mut E, limit: Option<usize>) -> Vec<OutputTuple> {
    let mut out = Vec::new();
    while limit.is_none_or(|k| out.len() < k) {
        match e.next_answer() {
            Some(t) => out.push(t),
            None => break,
        }
    }
    out
}

/// A stream over answers that are already sorted.
#[derive(Debug, Clone, Default)]
pub struct VecStream {
    items: std::vec::IntoIter<OutputTuple>,
    counters: Counters,
}

impl VecStream {
    pub fn new(items: Vec<OutputTuple>) -> Self {
        VecStream {
            items: items.into_iter(),
            counters: Counters::default(),
        }
    }
}

impl Enumerator for VecStream {
    fn next_answer(&mut self) -> Option<OutputTuple> {
        let t = self.items.next()?;
        self.counters.emitted += 1;
        Some(t)
    }

    fn counters(&self) -> Counters {
        self.counters
    }
}
