use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::network::CircuitId;

use super::traffic::Request;

#[derive(Debug, Clone)]
pub(crate) enum EventKind {
    Departure(CircuitId),
    Arrival(Request),
}

impl EventKind {
    // departures sort before arrivals at the same instant
    fn rank(&self) -> u8 {
        match self {
            EventKind::Departure(_) => 0,
            EventKind::Arrival(_) => 1,
        }
    }
}

#[derive(Debug)]
struct Scheduled {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl Scheduled {
    fn key(&self) -> (u8, u64) {
        (self.kind.rank(), self.seq)
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then_with(|| self.key().cmp(&other.key()))
    }
}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Scheduled {}

/// Time-ordered event queue. Ties go to departures, then to the earlier
/// scheduled event.
#[derive(Debug, Default)]
pub(crate) struct EventQueue {
    heap: BinaryHeap<Reverse<Scheduled>>,
    seq: u64,
}

impl EventQueue {
    pub fn push(&mut self, time: f64, kind: EventKind) {
        self.heap.push(Reverse(Scheduled {
            time,
            seq: self.seq,
            kind,
        }));
        self.seq += 1;
    }

    pub fn pop(&mut self) -> Option<EventKind> {
        self.heap.pop().map(|Reverse(s)| s.kind)
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.heap.len()
    }
}
