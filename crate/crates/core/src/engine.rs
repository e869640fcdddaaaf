//! Discrete-event core: an integer-microsecond clock and a totally ordered
//! event queue.
//!
//! Events are ordered by `(fire_at, seq)` where `seq` is a per-queue insertion
//! counter, so two events scheduled for the same instant always pop in the
//! order they were scheduled.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Simulation time in whole microseconds since the start of the run.
pub type Micros = u64;

pub const MICROS_PER_SEC: Micros = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("causality violation: event at {at} us scheduled when clock is at {now} us")]
    Causality { at: Micros, now: Micros },
}

/// Opaque handle returned by [`EventQueue::schedule`]; it is the event's
/// insertion sequence number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventHandle(pub u64);

#[derive(Debug, Clone)]
pub struct Event<K> {
    pub fire_at: Micros,
    pub seq: u64,
    pub kind: K,
}

impl<K> Event<K> {
    fn key(&self) -> (Micros, u64) {
        (self.fire_at, self.seq)
    }
}

impl<K> PartialEq for Event<K> {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl<K> Eq for Event<K> {}

impl<K> PartialOrd for Event<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for Event<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        // BinaryHeap is a max-heap; invert so the earliest event is on top.
        other.key().cmp(&self.key())
    }
}

/// Event queue plus the virtual clock it drives.
#[derive(Debug, Clone)]
pub struct EventQueue<K> {
    now: Micros,
    next_seq: u64,
    processed: u64,
    heap: BinaryHeap<Event<K>>,
}

impl<K> Default for EventQueue<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K> EventQueue<K> {
    pub fn new() -> Self {
        Self {
            now: 0,
            next_seq: 0,
            processed: 0,
            heap: BinaryHeap::new(),
        }
    }

    pub fn now(&self) -> Micros {
        self.now
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Total number of events popped over the queue's lifetime.
    pub fn processed(&self) -> u64 {
        self.processed
    }

    pub fn peek_time(&self) -> Option<Micros> {
        self.heap.peek().map(|e| e.fire_at)
    }

    pub fn schedule(&mut self, fire_at: Micros, kind: K) -> Result<EventHandle, EngineError> {
        if fire_at < self.now {
            return Err(EngineError::Causality {
                at: fire_at,
                now: self.now,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Event { fire_at, seq, kind });
        Ok(EventHandle(seq))
    }

    /// Schedules `delay` microseconds after the current time. Cannot violate
    /// causality.
    pub fn schedule_in(&mut self, delay: Micros, kind: K) -> EventHandle {
        let at = self.now.saturating_add(delay);
        self.schedule(at, kind)
            .expect("relative schedule is never in the past")
    }

    /// Pops the head event and advances the clock to its firing time.
    pub fn pop(&mut self) -> Option<Event<K>> {
        let ev = self.heap.pop()?;
        debug_assert!(ev.fire_at >= self.now);
        self.now = ev.fire_at;
        self.processed += 1;
        Some(ev)
    }

    /// Processes every event with `fire_at <= t_end` in order, handing each to
    /// `handler`, then sets the clock to `t_end`. Returns the number of events
    /// processed by this call.
    pub fn run_until<F>(&mut self, t_end: Micros, mut handler: F) -> Result<u64, EngineError>
    where
        F: FnMut(&mut Self, Event<K>),
    {
        if t_end < self.now {
            return Err(EngineError::Causality {
                at: t_end,
                now: self.now,
            });
        }
        let mut count = 0;
        while self.peek_time().is_some_and(|t| t <= t_end) {
            let ev = self.pop().expect("peeked");
            handler(self, ev);
            count += 1;
        }
        self.now = t_end;
        Ok(count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_instant_pops_before_later() {
        let mut q = EventQueue::new();
        q.schedule(1, "later").unwrap();
        q.schedule(0, "now").unwrap();
        assert_eq!(q.pop().unwrap().kind, "now");
        assert_eq!(q.pop().unwrap().kind, "later");
    }

    #[test]
    fn ties_break_by_insertion_order() {
        let mut q = EventQueue::new();
        for i in 0..5 {
            q.schedule(100, i).unwrap();
        }
        let a = q.pop().unwrap();
        let b = q.pop().unwrap();
        assert!(a.seq < b.seq);
        assert_eq!((a.kind, b.kind), (0, 1));
    }

    #[test]
    fn past_event_is_rejected() {
        let mut q = EventQueue::new();
        q.schedule(10, ()).unwrap();
        q.pop();
        assert_eq!(
            q.schedule(9, ()),
            Err(EngineError::Causality { at: 9, now: 10 })
        );
    }

    #[test]
    fn run_until_on_empty_queue_moves_clock() {
        let mut q: EventQueue<()> = EventQueue::new();
        let n = q.run_until(1_000_000, |_, _| {}).unwrap();
        assert_eq!(n, 0);
        assert_eq!(q.now(), 1_000_000);
    }

    #[test]
    fn run_until_stops_at_boundary() {
        let mut q = EventQueue::new();
        for t in [10, 20, 30, 31] {
            q.schedule(t, t).unwrap();
        }
        let n = q.run_until(30, |_, _| {}).unwrap();
        assert_eq!(n, 3);
        assert_eq!(q.now(), 30);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn handler_may_schedule_follow_ups() {
        let mut q = EventQueue::new();
        q.schedule(0, 0u32).unwrap();
        let mut seen = Vec::new();
        q.run_until(50, |q, ev| {
            seen.push((ev.fire_at, ev.kind));
            if ev.kind < 3 {
                q.schedule_in(10, ev.kind + 1);
            }
        })
        .unwrap();
        assert_eq!(seen, vec![(0, 0), (10, 1), (20, 2), (30, 3)]);
    }

    #[test]
    fn run_until_before_now_is_rejected() {
        let mut q: EventQueue<()> = EventQueue::new();
        q.run_until(100, |_, _| {}).unwrap();
        assert!(q.run_until(99, |_, _| {}).is_err());
    }
}
