use crate::engine::Micros;
use crate::mac::StationId;
use crate::rng::RngStream;

/// Sorted, non-overlapping record of the intervals during which some frame
/// was on the air.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BusyLog {
    intervals: Vec<(Micros, Micros)>,
}

impl BusyLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `[start, end)`. Intervals must arrive in start order; an
    /// interval overlapping or touching the previous one is merged into it.
    pub fn push(&mut self, start: Micros, end: Micros) {
        if end <= start {
            return;
        }
        if let Some(last) = self.intervals.last_mut() {
            debug_assert!(start >= last.0, "busy intervals out of order");
            if start <= last.1 {
                last.1 = last.1.max(end);
                return;
            }
        }
        self.intervals.push((start, end));
    }

    pub fn intervals(&self) -> &[(Micros, Micros)] {
        &self.intervals
    }

    /// Busy microseconds inside `[from, to)`.
    pub fn busy_within(&self, from: Micros, to: Micros) -> Micros {
        if to <= from {
            return 0;
        }
        let first = self.intervals.partition_point(|&(_, e)| e <= from);
        self.intervals[first..]
            .iter()
            .take_while(|&&(s, _)| s < to)
            .map(|&(s, e)| e.min(to) - s.max(from))
            .sum()
    }

    pub fn total(&self) -> Micros {
        self.intervals.iter().map(|(s, e)| e - s).sum()
    }
}

/// Shared-medium carrier-sense state. Every station hears every other, so a
/// single idle/busy view suffices.
#[derive(Debug, Clone, Default)]
pub struct ChannelState {
    /// When the medium last became idle; `None` while a frame exchange holds
    /// it (including the SIFS gap before an ACK).
    pub idle_since: Option<Micros>,
    pub busy_until: Micros,
    pub current_transmitters: Vec<StationId>,
    pub busy: BusyLog,
}

impl ChannelState {
    pub fn new() -> Self {
        Self {
            idle_since: Some(0),
            ..Self::default()
        }
    }

    pub fn is_idle(&self) -> bool {
        self.idle_since.is_some()
    }

    pub fn occupy(&mut self, transmitters: Vec<StationId>, until: Micros) {
        self.idle_since = None;
        self.current_transmitters = transmitters;
        self.busy_until = until;
    }

    pub fn release(&mut self, at: Micros) {
        self.current_transmitters.clear();
        self.idle_since = Some(at);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub station: StationId,
    pub airtime: Micros,
    /// Frame error probability of this frame at its rate.
    pub fer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttemptOutcome {
    Success,
    Collision,
    ChannelError,
}

impl AttemptOutcome {
    pub fn is_success(self) -> bool {
        self == AttemptOutcome::Success
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub outcomes: Vec<(StationId, AttemptOutcome)>,
    /// How long the medium stays busy: the longest frame involved.
    pub busy_for: Micros,
}

/// Decides the fate of frames that started in the same slot. Two or more
/// collide; a lone frame survives with probability `1 - fer`.
pub fn resolve_transmissions(set: &[Transmission], error_rng: &mut RngStream) -> Resolution {
    assert!(!set.is_empty(), "resolve_transmissions on an empty set");
    let busy_for = set.iter().map(|t| t.airtime).max().unwrap_or(0);
    let outcomes = if let [only] = set {
        let outcome = if error_rng.next_unit() < only.fer {
            AttemptOutcome::ChannelError
        } else {
            AttemptOutcome::Success
        };
        vec![(only.station, outcome)]
    } else {
        set.iter()
            .map(|t| (t.station, AttemptOutcome::Collision))
            .collect()
    };
    Resolution { outcomes, busy_for }
}
