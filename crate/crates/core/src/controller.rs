//! Per-station rate-control policies: BDM, the ARF-style rate-only ablation,
//! and fixed rates (also used by the EDCA baseline).

use crate::bdm::{gate_against, BdmState, GateDecision};
use crate::mac::backoff::TxResult;
use crate::mac::rate::DataRate;
use crate::mac::FrameClass;

/// When the ladder hears about outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Granularity {
    /// Once per frame: its final delivery, or its drop at the retry limit.
    #[default]
    PerFrame,
    /// After every individual attempt, retries included.
    PerAttempt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatePolicy {
    Bdm(BdmState),
    /// Rate ladder only; no reserve, no gate.
    Arf(BdmState),
    Fixed(DataRate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Controller {
    policy: RatePolicy,
    granularity: Granularity,
}

impl Controller {
    pub fn new(policy: RatePolicy, granularity: Granularity) -> Self {
        Self {
            policy,
            granularity,
        }
    }

    pub fn fixed(rate: DataRate) -> Self {
        Self::new(RatePolicy::Fixed(rate), Granularity::PerFrame)
    }

    pub fn policy(&self) -> &RatePolicy {
        &self.policy
    }

    pub fn rate(&self) -> DataRate {
        match &self.policy {
            RatePolicy::Bdm(s) | RatePolicy::Arf(s) => s.rate(),
            RatePolicy::Fixed(r) => *r,
        }
    }

    /// Free-bandwidth reserve in percent, for policies that keep one.
    pub fn reserve_pct(&self) -> Option<f64> {
        match &self.policy {
            RatePolicy::Bdm(s) => Some(s.target_free_pct()),
            _ => None,
        }
    }

    pub fn gate(&self, measured_free_pct: f64, class: FrameClass) -> GateDecision {
        match self.reserve_pct() {
            Some(target) => gate_against(target, measured_free_pct, class),
            None => GateDecision::Send,
        }
    }

    pub fn on_attempt(&mut self, result: TxResult) {
        if self.granularity == Granularity::PerAttempt {
            self.apply(result);
        }
    }

    pub fn on_frame_done(&mut self, result: TxResult) {
        if self.granularity == Granularity::PerFrame {
            self.apply(result);
        }
    }

    fn apply(&mut self, result: TxResult) {
        match &mut self.policy {
            RatePolicy::Bdm(s) | RatePolicy::Arf(s) => *s = s.update(result),
            RatePolicy::Fixed(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn per_frame_ignores_attempts() {
        let mut c = Controller::new(RatePolicy::Bdm(BdmState::init()), Granularity::PerFrame);
        c.on_attempt(TxResult::Success);
        assert_eq!(c.rate(), DataRate::Mbps1);
        c.on_frame_done(TxResult::Success);
        assert_eq!(c.rate(), DataRate::Mbps2);
        assert_eq!(c.reserve_pct(), Some(4.0));
    }

    #[test]
    fn per_attempt_ignores_frame_completion() {
        let mut c = Controller::new(RatePolicy::Arf(BdmState::init()), Granularity::PerAttempt);
        c.on_frame_done(TxResult::Success);
        assert_eq!(c.rate(), DataRate::Mbps1);
        c.on_attempt(TxResult::Success);
        assert_eq!(c.rate(), DataRate::Mbps2);
        assert_eq!(c.reserve_pct(), None);
    }

    #[test]
    fn fixed_never_moves_or_gates() {
        let mut c = Controller::fixed(DataRate::Mbps11);
        c.on_frame_done(TxResult::Failure);
        assert_eq!(c.rate(), DataRate::Mbps11);
        assert_eq!(c.gate(0.0, FrameClass::Data), GateDecision::Send);
    }

    #[test]
    fn arf_never_gates() {
        let c = Controller::new(RatePolicy::Arf(BdmState::init()), Granularity::PerFrame);
        assert_eq!(c.gate(0.0, FrameClass::Data), GateDecision::Send);
        let b = Controller::new(RatePolicy::Bdm(BdmState::init()), Granularity::PerFrame);
        assert_eq!(b.gate(0.0, FrameClass::Data), GateDecision::Defer);
    }
}
