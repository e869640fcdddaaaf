//! The per-station DCF automaton.
//!
//! A station only reacts to [`MacEvent`]s handed to it by the medium and
//! answers with [`MacAction`]s for the engine to carry out. Backoff counts
//! down on a slot grid anchored at the end of the station's IFS after the
//! medium went idle, so stations whose counters expire on the same slot
//! boundary start transmitting together and collide.

use std::collections::VecDeque;

use crate::controller::Controller;
use crate::engine::Micros;
use crate::mac::backoff::{advance_cw, draw_backoff, TxResult};
use crate::mac::rate::DataRate;
use crate::mac::timing::{AccessParams, MacTiming};
use crate::rng::RngStream;

pub type StationId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameClass {
    /// Voice of an admitted call.
    Voice,
    /// Signalling for a call not yet admitted.
    CallSetup,
    /// Best-effort data.
    Data,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub src: StationId,
    pub dst: StationId,
    pub flow: usize,
    pub class: FrameClass,
    /// Bytes above the MAC header (voice sample plus RTP/UDP/IP).
    pub payload_bytes: u32,
    /// Highest rate the receiver's distance allows.
    pub rate_cap: DataRate,
    /// Rate of the most recent attempt.
    pub rate: Option<DataRate>,
    pub enqueue_time: Micros,
    pub first_attempt: Option<Micros>,
    pub retry_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Idle,
    DifsWait,
    Backoff,
    Transmitting,
    AwaitingAck,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MacEvent {
    /// A frame was queued, or a deferral was lifted.
    Wake {
        now: Micros,
        idle_since: Option<Micros>,
    },
    MediumIdle {
        at: Micros,
    },
    MediumBusy {
        at: Micros,
    },
    /// The station's backoff counter expired at `at`.
    AccessSlot {
        at: Micros,
        free_pct: f64,
    },
    /// The station's own frame left the air.
    TxEnd {
        at: Micros,
        acked: bool,
        response_timeout: Micros,
    },
    AckReceived {
        at: Micros,
    },
    AckTimeout {
        at: Micros,
        idle_since: Option<Micros>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum MacAction {
    /// The station will transmit at `tx_at` unless the medium turns busy first.
    Contend { tx_at: Micros },
    Transmit { payload_bytes: u32, rate: DataRate },
    /// The gate held the head frame back; wake the station later.
    Deferred,
    ArmAckTimeout { at: Micros },
    Delivered { frame: Frame, at: Micros },
    Dropped { frame: Frame, at: Micros },
}

#[derive(Debug, Clone)]
pub struct Station {
    pub id: StationId,
    pub distance_m: f64,
    params: AccessParams,
    slot: Micros,
    retry_limit: u32,
    cw: u32,
    backoff: u32,
    phase: Phase,
    count_from: Option<Micros>,
    queue: VecDeque<Frame>,
    queue_limit: usize,
    controller: Controller,
    rng: RngStream,
}

impl Station {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        id: StationId,
        distance_m: f64,
        params: AccessParams,
        timing: &MacTiming,
        retry_limit: u32,
        queue_limit: usize,
        controller: Controller,
        rng: RngStream,
    ) -> Self {
        Self {
            id,
            distance_m,
            params,
            slot: timing.slot,
            retry_limit,
            cw: params.cw_min,
            backoff: 0,
            phase: Phase::Idle,
            count_from: None,
            queue: VecDeque::new(),
            queue_limit,
            controller,
            rng,
        }
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn cw(&self) -> u32 {
        self.cw
    }

    pub fn backoff(&self) -> u32 {
        self.backoff
    }

    pub fn params(&self) -> &AccessParams {
        &self.params
    }

    pub fn controller(&self) -> &Controller {
        &self.controller
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    pub fn head(&self) -> Option<&Frame> {
        self.queue.front()
    }

    pub fn rng_mut(&mut self) -> &mut RngStream {
        &mut self.rng
    }

    /// Idle with frames waiting: the gate deferred the head frame.
    pub fn is_deferred(&self) -> bool {
        self.phase == Phase::Idle && !self.queue.is_empty()
    }

    /// When the backoff counter will expire, if the station is counting down.
    pub fn tx_at(&self) -> Option<Micros> {
        match (self.phase, self.count_from) {
            (Phase::Backoff, Some(from)) => Some(from + self.backoff as Micros * self.slot),
            _ => None,
        }
    }

    /// Appends to the transmit queue; hands the frame back when full.
    pub fn enqueue(&mut self, frame: Frame) -> Result<(), Frame> {
        if self.queue.len() >= self.queue_limit {
            return Err(frame);
        }
        self.queue.push_back(frame);
        Ok(())
    }

    pub fn step(&mut self, event: MacEvent) -> Vec<MacAction> {
        match (self.phase, event) {
            (Phase::Idle, MacEvent::Wake { now, idle_since }) => {
                if self.queue.is_empty() {
                    return Vec::new();
                }
                self.backoff = draw_backoff(self.cw, &mut self.rng);
                self.contend(now, idle_since).into_iter().collect()
            }
            (_, MacEvent::Wake { .. }) => Vec::new(),

            (Phase::DifsWait, MacEvent::MediumIdle { at }) => {
                self.contend(at, Some(at)).into_iter().collect()
            }
            (Phase::Idle | Phase::AwaitingAck, MacEvent::MediumIdle { .. }) => Vec::new(),

            (Phase::Backoff, MacEvent::MediumBusy { at }) => {
                let from = self.count_from.take().expect("backoff has an origin");
                let elapsed = at.saturating_sub(from) / self.slot;
                self.backoff -= (elapsed as u32).min(self.backoff);
                self.phase = Phase::DifsWait;
                Vec::new()
            }
            (_, MacEvent::MediumBusy { .. }) => Vec::new(),

            (Phase::Backoff, MacEvent::AccessSlot { at, free_pct }) => {
                assert_eq!(self.tx_at(), Some(at), "station {} accessed off its slot", self.id);
                self.count_from = None;
                self.backoff = 0;
                let controller = self.controller;
                let head = self.queue.front_mut().expect("contending with a frame");
                if controller.gate(free_pct, head.class) == crate::bdm::GateDecision::Defer {
                    self.phase = Phase::Idle;
                    return vec![MacAction::Deferred];
                }
                let rate = controller.rate().min(head.rate_cap);
                head.rate = Some(rate);
                head.first_attempt.get_or_insert(at);
                self.phase = Phase::Transmitting;
                vec![MacAction::Transmit {
                    payload_bytes: head.payload_bytes,
                    rate,
                }]
            }

            (
                Phase::Transmitting,
                MacEvent::TxEnd {
                    at,
                    acked,
                    response_timeout,
                },
            ) => {
                self.phase = Phase::AwaitingAck;
                if acked {
                    Vec::new()
                } else {
                    vec![MacAction::ArmAckTimeout {
                        at: at + response_timeout,
                    }]
                }
            }

            (Phase::AwaitingAck, MacEvent::AckReceived { at }) => {
                let frame = self.queue.pop_front().expect("acked frame");
                self.controller.on_attempt(TxResult::Success);
                self.controller.on_frame_done(TxResult::Success);
                self.cw = advance_cw(self.cw, TxResult::Success, &self.params);
                let mut actions = vec![MacAction::Delivered { frame, at }];
                // the medium is still held until the ACK ends
                actions.extend(self.next_frame(at, None));
                actions
            }

            (Phase::AwaitingAck, MacEvent::AckTimeout { at, idle_since }) => {
                self.controller.on_attempt(TxResult::Failure);
                let head = self.queue.front_mut().expect("frame awaiting ack");
                if head.retry_count >= self.retry_limit {
                    let frame = self.queue.pop_front().expect("head");
                    self.controller.on_frame_done(TxResult::Failure);
                    self.cw = self.params.cw_min;
                    let mut actions = vec![MacAction::Dropped { frame, at }];
                    actions.extend(self.next_frame(at, idle_since));
                    actions
                } else {
                    head.retry_count += 1;
                    self.cw = advance_cw(self.cw, TxResult::Failure, &self.params);
                    self.backoff = draw_backoff(self.cw, &mut self.rng);
                    self.contend(at, idle_since).into_iter().collect()
                }
            }

            (phase, event) => panic!(
                "station {}: event {event:?} is inconsistent with phase {phase:?}",
                self.id
            ),
        }
    }

    fn next_frame(&mut self, now: Micros, idle_since: Option<Micros>) -> Option<MacAction> {
        if self.queue.is_empty() {
            self.phase = Phase::Idle;
            return None;
        }
        self.backoff = draw_backoff(self.cw, &mut self.rng);
        self.contend(now, idle_since)
    }

    /// Enters contention with the current backoff. While the medium is busy
    /// the station waits for idle; otherwise it counts from the first slot
    /// boundary at or after `now`.
    fn contend(&mut self, now: Micros, idle_since: Option<Micros>) -> Option<MacAction> {
        let Some(idle) = idle_since else {
            self.phase = Phase::DifsWait;
            self.count_from = None;
            return None;
        };
        let origin = idle + self.params.ifs;
        let from = if now <= origin {
            origin
        } else {
            origin + (now - origin).div_ceil(self.slot) * self.slot
        };
        self.phase = Phase::Backoff;
        self.count_from = Some(from);
        self.tx_at().map(|tx_at| MacAction::Contend { tx_at })
    }
}
