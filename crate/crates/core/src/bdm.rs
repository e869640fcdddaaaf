//! Bandwidth/data-rate moderation.
//!
//! Each sender walks two coupled ladders. A successful transmission moves the
//! data rate one level up and the free-bandwidth reserve one level down; a
//! failure does the opposite. Both ladders saturate at their ends.
//!
//! | level | rate     | reserve |
//! |-------|----------|---------|
//! | 0     | 1 Mbps   | 1 %     |
//! | 1     | 2 Mbps   | 2 %     |
//! | 2     | 5.5 Mbps | 3 %     |
//! | 3     | 11 Mbps  | 4 %     |
//! | 4     |          | 5 %     |
//!
//! The reserve is compared against the measured free share of channel time
//! (a sliding window over the shared medium) to gate new calls and
//! best-effort data. Frames of calls already admitted are never held back.

use crate::engine::Micros;
use crate::mac::backoff::TxResult;
use crate::mac::channel::BusyLog;
use crate::mac::rate::DataRate;
use crate::mac::FrameClass;

pub const RATE_TOP_LEVEL: u8 = DataRate::TOP_LEVEL;
pub const FREE_BW_TOP_LEVEL: u8 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LastOutcome {
    None,
    Success,
    Failure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BdmState {
    rate_level: u8,
    free_bw_level: u8,
    last_outcome: LastOutcome,
}

impl Default for BdmState {
    fn default() -> Self {
        Self::init()
    }
}

impl BdmState {
    /// Lowest rate, highest reserve, no history.
    pub fn init() -> Self {
        Self {
            rate_level: 0,
            free_bw_level: FREE_BW_TOP_LEVEL,
            last_outcome: LastOutcome::None,
        }
    }

    pub fn with_levels(rate_level: u8, free_bw_level: u8) -> Option<Self> {
        (rate_level <= RATE_TOP_LEVEL && free_bw_level <= FREE_BW_TOP_LEVEL).then_some(Self {
            rate_level,
            free_bw_level,
            last_outcome: LastOutcome::None,
        })
    }

    pub fn rate_level(&self) -> u8 {
        self.rate_level
    }

    pub fn free_bw_level(&self) -> u8 {
        self.free_bw_level
    }

    pub fn last_outcome(&self) -> LastOutcome {
        self.last_outcome
    }

    pub fn rate(&self) -> DataRate {
        DataRate::from_level(self.rate_level).expect("rate level in range")
    }

    pub fn target_free_pct(&self) -> f64 {
        target_free_pct(self.free_bw_level)
    }

    #[must_use]
    pub fn update(self, result: TxResult) -> Self {
        match result {
            TxResult::Success => Self {
                rate_level: (self.rate_level + 1).min(RATE_TOP_LEVEL),
                free_bw_level: self.free_bw_level.saturating_sub(1),
                last_outcome: LastOutcome::Success,
            },
            TxResult::Failure => Self {
                rate_level: self.rate_level.saturating_sub(1),
                free_bw_level: (self.free_bw_level + 1).min(FREE_BW_TOP_LEVEL),
                last_outcome: LastOutcome::Failure,
            },
        }
    }
}

/// Reserve percentage for a free-bandwidth level: level k is (k+1) %.
pub fn target_free_pct(level: u8) -> f64 {
    f64::from(level.min(FREE_BW_TOP_LEVEL)) + 1.0
}

/// Busy time observed over a measurement window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UtilizationWindow {
    pub window_len: Micros,
    pub busy: Micros,
}

impl UtilizationWindow {
    pub fn utilization_pct(&self) -> f64 {
        if self.window_len == 0 {
            return 0.0;
        }
        100.0 * self.busy.min(self.window_len) as f64 / self.window_len as f64
    }

    pub fn free_pct(&self) -> f64 {
        100.0 - self.utilization_pct()
    }
}

/// Free share of the window in percent: total minus utilized.
pub fn measure_free_bandwidth(window: &UtilizationWindow) -> f64 {
    window.free_pct()
}

/// Sliding window over the channel's busy log, sampled on a fixed tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UtilizationMonitor {
    pub window_len: Micros,
    pub tick: Micros,
}

impl UtilizationMonitor {
    /// Window ending at `now`; shorter than `window_len` early in the run.
    pub fn sample(&self, busy: &BusyLog, now: Micros) -> UtilizationWindow {
        let from = now.saturating_sub(self.window_len);
        UtilizationWindow {
            window_len: now - from,
            busy: busy.busy_within(from, now),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateDecision {
    Send,
    Defer,
}

/// Holds back call-setup and best-effort frames while the measured free
/// bandwidth is under the state's reserve.
pub fn tx_gate(state: &BdmState, measured_free_pct: f64, class: FrameClass) -> GateDecision {
    gate_against(state.target_free_pct(), measured_free_pct, class)
}

pub(crate) fn gate_against(target_pct: f64, measured_free_pct: f64, class: FrameClass) -> GateDecision {
    match class {
        FrameClass::Voice => GateDecision::Send,
        FrameClass::CallSetup | FrameClass::Data if measured_free_pct < target_pct => {
            GateDecision::Defer
        }
        _ => GateDecision::Send,
    }
}

/// A new call is admitted only if the reserve survives its airtime.
pub fn admit_call(measured_free_pct: f64, target_free_pct: f64, per_call_airtime_pct: f64) -> bool {
    measured_free_pct - per_call_airtime_pct >= target_free_pct
}
