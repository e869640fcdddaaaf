//! One BSS: an access point (station 0) and its stations on a shared medium.
//!
//! The engine owns the medium. Stations announce when their backoff will
//! expire; the engine fires an access event at the earliest such instant,
//! resolves whoever transmits there, and replays the outcome to the stations
//! as carrier-sense, ACK and timeout events.

use thiserror::Error;

use crate::bdm::{admit_call, BdmState, UtilizationMonitor};
use crate::controller::{Controller, RatePolicy};
use crate::engine::{EventQueue, Micros, MICROS_PER_SEC};
use crate::mac::{
    frame_error_rate, rate_for_distance, resolve_transmissions, AccessParams, AttemptOutcome, ChannelState,
    DataRate, Frame, FrameClass, MacAction, MacEvent, MacTiming, OutOfCoverage, Phase, Station, StationId,
    Transmission,
};
use crate::metrics::{
    build_report, throughput, AttemptRecord, FreeSample, Interval, MetricsLog, MetricsReport, Outcome, ReportSpec,
    TxRecord,
};
use crate::rng::{station_stream, RngStream, CHANNEL_STREAM};
use crate::voip::{number_of_calls, CapacityInputs, VoiceSource, VoipError};

use super::config::{Accounting, ControllerKind, DataLoad, InvalidConfig, ScenarioConfig, Traffic};

pub const AP: StationId = 0;

/// Access-category parameters of the simplified EDCA baseline.
pub const EDCA_VOICE: (u32, u32, u32) = (2, 8, 16);
pub const EDCA_DATA: (u32, u32, u32) = (3, 32, 1023);

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    Config(#[from] InvalidConfig),
    #[error(transparent)]
    Coverage(#[from] OutOfCoverage),
    #[error(transparent)]
    Voip(#[from] VoipError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Ev {
    Access { epoch: u64 },
    /// The exchange holding the medium is over; `completes` hears its ACK.
    MediumIdle { completes: Option<StationId> },
    AckTimeout { station: StationId },
    Arrival { flow: usize },
    Tick,
    CallStart { call: usize },
}

#[derive(Debug, Clone)]
enum Source {
    Voice(VoiceSource),
    Poisson { mean_gap_us: f64 },
    /// Refilled whenever the previous frame completes.
    Saturated,
    /// A call's setup frame; no arrivals of its own.
    Setup { call: usize },
}

#[derive(Debug, Clone)]
struct Flow {
    src: StationId,
    dst: StationId,
    class: FrameClass,
    payload_bytes: u32,
    rate_cap: DataRate,
    source: Source,
}

#[derive(Debug, Clone, Copy)]
struct Call {
    station: StationId,
    up: usize,
    down: usize,
    setup: usize,
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ScenarioConfig,
    pub report: MetricsReport,
    pub log: MetricsLog,
    pub calls_admitted: u32,
    pub calls_blocked: u32,
    pub events: u64,
    /// Run parameters worth keeping next to the numbers.
    pub metadata: Vec<(String, String)>,
}

pub struct Simulation {
    cfg: ScenarioConfig,
    timing: MacTiming,
    stations: Vec<Station>,
    flows: Vec<Flow>,
    calls: Vec<Call>,
    channel: ChannelState,
    error_rng: RngStream,
    queue: EventQueue<Ev>,
    epoch: u64,
    scheduled_access: Option<(Micros, u64)>,
    monitor: UtilizationMonitor,
    free_pct: f64,
    log: MetricsLog,
    calls_admitted: u32,
    calls_blocked: u32,
}

fn rate_cap(distance_m: f64, cfg: &ScenarioConfig) -> Result<DataRate, OutOfCoverage> {
    let bps = rate_for_distance(distance_m, cfg.profile)?;
    Ok(DataRate::highest_within(bps).unwrap_or(DataRate::Mbps1))
}

fn controller_for(cfg: &ScenarioConfig) -> Controller {
    let start = BdmState::with_levels(cfg.bdm_initial_rate_level, crate::bdm::FREE_BW_TOP_LEVEL)
        .unwrap_or_default();
    match cfg.controller {
        ControllerKind::Bdm => Controller::new(RatePolicy::Bdm(start), cfg.granularity),
        ControllerKind::Arf => Controller::new(RatePolicy::Arf(start), cfg.granularity),
        ControllerKind::Edca => Controller::fixed(DataRate::Mbps11),
        ControllerKind::Fixed(r) => Controller::fixed(r),
    }
}

fn access_params(cfg: &ScenarioConfig, voice: bool) -> AccessParams {
    let (aifsn, cw_min, cw_max) = if voice { EDCA_VOICE } else { EDCA_DATA };
    match cfg.controller {
        ControllerKind::Edca => AccessParams::edca(&cfg.timing, aifsn, cw_min, cw_max),
        _ => AccessParams::dcf(&cfg.timing),
    }
}

impl Simulation {
    pub fn new(cfg: ScenarioConfig) -> Result<Self, SimError> {
        cfg.validate()?;
        let timing = cfg.timing;
        let distances = cfg.distances();
        let voice_flow = cfg.voice_flow();
        let wire_bytes = voice_flow.wire_payload_bytes()?;
        let voice_senders = cfg.traffic == Traffic::Voice;

        let mut stations = Vec::with_capacity(1 + distances.len());
        let mut caps = vec![DataRate::Mbps11];
        let mk = |id: StationId, d: f64, voice: bool| {
            Station::new(
                id,
                d,
                access_params(&cfg, voice),
                &timing,
                cfg.retry_limit,
                cfg.queue_limit,
                controller_for(&cfg),
                RngStream::new(cfg.seed, station_stream(id)),
            )
        };
        stations.push(mk(AP, 0.0, true));
        for (i, &d) in distances.iter().enumerate() {
            let id = i + 1;
            stations.push(mk(id, d, voice_senders && i < cfg.stations));
            caps.push(rate_cap(d, &cfg)?);
        }

        let mut flows = Vec::new();
        let mut calls = Vec::new();
        for i in 1..=cfg.stations {
            match cfg.traffic {
                Traffic::Voice => {
                    let voice = |src, dst, cap| Flow {
                        src,
                        dst,
                        class: FrameClass::Voice,
                        payload_bytes: wire_bytes,
                        rate_cap: cap,
                        source: Source::Voice(VoiceSource::new(cfg.ptime_ms, voice_flow.activity)),
                    };
                    let call = Call {
                        station: i,
                        up: flows.len(),
                        down: flows.len() + 1,
                        setup: flows.len() + 2,
                    };
                    flows.push(voice(i, AP, caps[i]));
                    flows.push(voice(AP, i, caps[i]));
                    flows.push(Flow {
                        src: i,
                        dst: AP,
                        class: FrameClass::CallSetup,
                        payload_bytes: voice_flow.header.bytes(),
                        rate_cap: caps[i],
                        source: Source::Setup { call: calls.len() },
                    });
                    calls.push(call);
                }
                Traffic::Saturated => flows.push(Flow {
                    src: i,
                    dst: AP,
                    class: FrameClass::Data,
                    payload_bytes: cfg.payload_bytes.unwrap_or(wire_bytes),
                    rate_cap: caps[i],
                    source: Source::Saturated,
                }),
            }
        }
        for i in cfg.stations + 1..=cfg.stations + cfg.data_stations {
            let source = match cfg.data_load {
                DataLoad::Saturated => Source::Saturated,
                DataLoad::Poisson { bps } if bps > 0.0 => Source::Poisson {
                    mean_gap_us: 8.0 * cfg.data_frame_bytes as f64 / bps * MICROS_PER_SEC as f64,
                },
                DataLoad::Poisson { .. } => continue,
            };
            flows.push(Flow {
                src: i,
                dst: AP,
                class: FrameClass::Data,
                payload_bytes: cfg.data_frame_bytes,
                rate_cap: caps[i],
                source,
            });
        }

        let mut sim = Self {
            timing,
            stations,
            flows,
            calls,
            channel: ChannelState::new(),
            error_rng: RngStream::new(cfg.seed, CHANNEL_STREAM),
            queue: EventQueue::new(),
            epoch: 0,
            scheduled_access: None,
            monitor: UtilizationMonitor {
                window_len: cfg.window_ms * 1000,
                tick: cfg.tick_ms * 1000,
            },
            free_pct: 100.0,
            log: MetricsLog::default(),
            calls_admitted: 0,
            calls_blocked: 0,
            cfg,
        };
        sim.schedule_initial();
        Ok(sim)
    }

    fn schedule_initial(&mut self) {
        self.at(self.monitor.tick, Ev::Tick);
        let ptime = self.cfg.ptime_ms as u64 * 1000;
        for (k, call) in self.calls.clone().iter().enumerate() {
            let rng = self.stations[call.station].rng_mut();
            let jitter = rng.next_uniform(ptime).unwrap_or(0);
            self.at(k as Micros * self.cfg.call_spacing_ms * 1000 + jitter, Ev::CallStart { call: k });
        }
        for f in 0..self.flows.len() {
            let src = self.flows[f].src;
            match self.flows[f].source {
                Source::Saturated => self.at(0, Ev::Arrival { flow: f }),
                Source::Poisson { mean_gap_us } => {
                    let gap = self.stations[src].rng_mut().next_exp(mean_gap_us);
                    self.at(gap.round() as Micros, Ev::Arrival { flow: f });
                }
                _ => {}
            }
        }
    }

    fn at(&mut self, t: Micros, ev: Ev) {
        self.queue.schedule(t, ev).expect("events are never scheduled in the past");
    }

    pub fn now(&self) -> Micros {
        self.queue.now()
    }

    pub fn log(&self) -> &MetricsLog {
        &self.log
    }

    pub fn stations(&self) -> &[Station] {
        &self.stations
    }

    /// Processes one event if any is due by `t_end`.
    pub fn step(&mut self, t_end: Micros) -> bool {
        if !self.queue.peek_time().is_some_and(|t| t <= t_end) {
            return false;
        }
        let ev = self.queue.pop().expect("peeked");
        let now = ev.fire_at;
        match ev.kind {
            Ev::Access { epoch } => {
                if self.scheduled_access.map(|(_, e)| e) == Some(epoch) {
                    self.scheduled_access = None;
                    self.on_access(now);
                }
            }
            Ev::MediumIdle { completes } => self.on_medium_idle(now, completes),
            Ev::AckTimeout { station } => {
                let idle_since = self.channel.idle_since;
                let acts = self.stations[station].step(MacEvent::AckTimeout { at: now, idle_since });
                self.apply(acts);
            }
            Ev::Arrival { flow } => self.on_arrival(now, flow),
            Ev::Tick => self.on_tick(now),
            Ev::CallStart { call } => self.on_call_start(now, call),
        }
        self.reschedule_access();
        true
    }

    pub fn run(mut self) -> RunOutput {
        let end = self.cfg.duration();
        while self.step(end) {}
        self.finish()
    }

    fn reschedule_access(&mut self) {
        if !self.channel.is_idle() {
            return;
        }
        let next = self.stations.iter().filter_map(Station::tx_at).min();
        match next {
            Some(t) if self.scheduled_access.map(|(at, _)| at) != Some(t) => {
                self.epoch += 1;
                self.scheduled_access = Some((t, self.epoch));
                self.at(t, Ev::Access { epoch: self.epoch });
            }
            Some(_) => {}
            None => self.scheduled_access = None,
        }
    }

    fn on_access(&mut self, t: Micros) {
        let contenders: Vec<StationId> = (0..self.stations.len())
            .filter(|&s| self.stations[s].tx_at() == Some(t))
            .collect();
        let mut txs = Vec::new();
        for s in contenders {
            let acts = self.stations[s].step(MacEvent::AccessSlot {
                at: t,
                free_pct: self.free_pct,
            });
            for a in acts {
                if let MacAction::Transmit { payload_bytes, rate } = a {
                    txs.push((s, payload_bytes, rate));
                }
            }
        }
        if txs.is_empty() {
            return;
        }
        for st in &mut self.stations {
            if st.phase() == Phase::Backoff {
                st.step(MacEvent::MediumBusy { at: t });
            }
        }

        let timing = self.timing;
        let rts = self.cfg.rts_cts;
        let set: Vec<Transmission> = txs
            .iter()
            .map(|&(s, payload, rate)| Transmission {
                station: s,
                airtime: if rts {
                    timing.rts_airtime()
                } else {
                    timing.data_airtime(payload, rate)
                },
                fer: frame_error_rate(payload, timing.mac_header_bytes, rate, &self.cfg.ber),
            })
            .collect();
        let resolution = resolve_transmissions(&set, &mut self.error_rng);

        let mut busy = Vec::new();
        // (station, end of its frame, acked, response timeout)
        let mut ends = Vec::new();
        let mut completes = None;
        let idle_at;
        if let [(s, payload, rate)] = txs[..] {
            let outcome = resolution.outcomes[0].1;
            let mut data_start = t;
            if rts {
                let cts_start = t + timing.rts_airtime() + timing.sifs;
                busy.push((t, t + timing.rts_airtime()));
                busy.push((cts_start, cts_start + timing.cts_airtime()));
                data_start = cts_start + timing.cts_airtime() + timing.sifs;
            }
            let data_end = data_start + timing.data_airtime(payload, rate);
            busy.push((data_start, data_end));
            if outcome.is_success() {
                let ack_start = data_end + timing.sifs;
                busy.push((ack_start, ack_start + timing.ack_time));
                idle_at = ack_start + timing.ack_time;
                completes = Some(s);
            } else {
                idle_at = data_end;
            }
            ends.push((s, data_end, outcome.is_success(), timing.ack_timeout()));
            self.log_attempt(s, t, data_end, rate, outcome);
        } else {
            idle_at = t + resolution.busy_for;
            busy.push((t, idle_at));
            let timeout = if rts {
                timing.cts_timeout()
            } else {
                timing.ack_timeout()
            };
            for (tx, &(s, _, rate)) in set.iter().zip(&txs) {
                ends.push((s, t + tx.airtime, false, timeout));
                self.log_attempt(s, t, t + tx.airtime, rate, AttemptOutcome::Collision);
            }
        }

        self.channel.occupy(txs.iter().map(|x| x.0).collect(), idle_at);
        for (a, b) in busy {
            self.channel.busy.push(a, b);
        }
        self.at(idle_at, Ev::MediumIdle { completes });
        for (s, at, acked, response_timeout) in ends {
            let acts = self.stations[s].step(MacEvent::TxEnd {
                at,
                acked,
                response_timeout,
            });
            for a in acts {
                if let MacAction::ArmAckTimeout { at } = a {
                    self.at(at, Ev::AckTimeout { station: s });
                }
            }
        }
    }

    fn log_attempt(&mut self, s: StationId, start: Micros, end: Micros, rate: DataRate, outcome: AttemptOutcome) {
        let enq = self.stations[s].head().map_or(start, |f| f.enqueue_time);
        self.log.attempts.push(AttemptRecord {
            station: s,
            start,
            end,
            rate,
            outcome,
            wait: start - enq,
        });
    }

    fn on_medium_idle(&mut self, now: Micros, completes: Option<StationId>) {
        if let Some(s) = completes {
            let acts = self.stations[s].step(MacEvent::AckReceived { at: now });
            self.apply(acts);
        }
        self.channel.release(now);
        for s in 0..self.stations.len() {
            if self.stations[s].phase() == Phase::DifsWait {
                let acts = self.stations[s].step(MacEvent::MediumIdle { at: now });
                self.apply(acts);
            }
        }
    }

    fn apply(&mut self, actions: Vec<MacAction>) {
        for a in actions {
            match a {
                MacAction::Delivered { frame, at } => self.complete(frame, at, Outcome::Delivered),
                MacAction::Dropped { frame, at } => self.complete(frame, at, Outcome::Dropped),
                MacAction::Contend { .. } | MacAction::Deferred => {}
                other => unreachable!("{other:?} outside an access slot"),
            }
        }
    }

    fn record(&mut self, frame: &Frame, at: Micros, outcome: Outcome) {
        self.log.records.push(TxRecord {
            station: frame.src,
            flow: frame.flow,
            class: frame.class,
            enqueue_time: frame.enqueue_time,
            first_attempt_time: frame.first_attempt,
            completion_time: at,
            payload_bytes: frame.payload_bytes,
            outcome,
            retries: frame.retry_count,
            rate_used: frame.rate,
        });
    }

    fn complete(&mut self, frame: Frame, at: Micros, outcome: Outcome) {
        self.record(&frame, at, outcome);
        match self.flows[frame.flow].source {
            Source::Saturated => self.enqueue(frame.flow, at),
            Source::Setup { call } => {
                if outcome == Outcome::Delivered {
                    self.calls_admitted += 1;
                    let c = self.calls[call];
                    let ptime = self.cfg.ptime_ms as u64 * 1000;
                    let offset = self.stations[AP].rng_mut().next_uniform(ptime).unwrap_or(0);
                    self.start_voice(c.up, at);
                    self.start_voice(c.down, at + offset);
                } else {
                    self.calls_blocked += 1;
                }
            }
            _ => {}
        }
    }

    fn start_voice(&mut self, flow: usize, at: Micros) {
        let src = self.flows[flow].src;
        if let Source::Voice(v) = &mut self.flows[flow].source {
            let first = v.start(at, self.stations[src].rng_mut());
            self.at(first, Ev::Arrival { flow });
        }
    }

    fn enqueue(&mut self, flow: usize, now: Micros) {
        let f = &self.flows[flow];
        let frame = Frame {
            src: f.src,
            dst: f.dst,
            flow,
            class: f.class,
            payload_bytes: f.payload_bytes,
            rate_cap: f.rate_cap,
            rate: None,
            enqueue_time: now,
            first_attempt: None,
            retry_count: 0,
        };
        let src = f.src;
        match self.stations[src].enqueue(frame) {
            Ok(()) => self.wake(src, now),
            Err(frame) => self.record(&frame, now, Outcome::Overflow),
        }
    }

    fn wake(&mut self, s: StationId, now: Micros) {
        let idle_since = self.channel.idle_since;
        let acts = self.stations[s].step(MacEvent::Wake { now, idle_since });
        self.apply(acts);
    }

    fn on_arrival(&mut self, now: Micros, flow: usize) {
        self.enqueue(flow, now);
        let src = self.flows[flow].src;
        let rng = self.stations[src].rng_mut();
        let next = match &mut self.flows[flow].source {
            Source::Voice(v) => Some(v.next_voice_packet(now, rng)),
            Source::Poisson { mean_gap_us } => Some(now + (rng.next_exp(*mean_gap_us).round() as Micros).max(1)),
            Source::Saturated | Source::Setup { .. } => None,
        };
        if let Some(t) = next {
            self.at(t, Ev::Arrival { flow });
        }
    }

    fn on_tick(&mut self, now: Micros) {
        let window = self.monitor.sample(&self.channel.busy, now);
        self.free_pct = window.free_pct();
        self.log.free_samples.push(FreeSample {
            at: now,
            free_pct: self.free_pct,
        });
        for s in 0..self.stations.len() {
            if self.stations[s].is_deferred() {
                self.wake(s, now);
            }
        }
        self.at(now + self.monitor.tick, Ev::Tick);
    }

    /// Airtime share one more call would take, from the AP's current rate.
    pub fn per_call_airtime_pct(&self, station: StationId) -> f64 {
        let flow = self.cfg.voice_flow();
        let bytes = flow.wire_payload_bytes().unwrap_or(0);
        let rate = self.stations[AP].controller().rate().min(self.flows_cap(station));
        let per_packet = self.timing.data_airtime(bytes, rate) + self.timing.ack_time;
        2.0 * flow.packets_per_second() * flow.activity.on_fraction() * per_packet as f64 / MICROS_PER_SEC as f64
            * 100.0
    }

    fn flows_cap(&self, station: StationId) -> DataRate {
        self.flows
            .iter()
            .find(|f| f.src == station)
            .map_or(DataRate::Mbps11, |f| f.rate_cap)
    }

    /// Reserve that admission protects: the configured target, else the
    /// AP's BDM reserve, else 1 %.
    pub fn admission_target_pct(&self) -> f64 {
        self.cfg
            .admission_target_pct
            .or_else(|| self.stations[AP].controller().reserve_pct())
            .unwrap_or(1.0)
    }

    fn on_call_start(&mut self, now: Micros, call: usize) {
        let c = self.calls[call];
        if self.cfg.admission_enabled()
            && !admit_call(self.free_pct, self.admission_target_pct(), self.per_call_airtime_pct(c.station))
        {
            self.calls_blocked += 1;
            return;
        }
        self.enqueue(c.setup, now);
    }

    fn report_spec(&self) -> ReportSpec {
        ReportSpec {
            run_end: self.cfg.duration(),
            warmup: self.cfg.warmup(),
            window: self.cfg.report_window_ms * 1000,
            per_call_rate_bps: self.cfg.per_call_rate_bps(),
            overhead_bytes: match self.cfg.accounting {
                Accounting::Payload => 0,
                Accounting::Airtime => self.timing.mac_header_bytes,
            },
        }
    }

    fn metadata(&self) -> Vec<(String, String)> {
        let cfg = &self.cfg;
        let controller = match cfg.controller {
            ControllerKind::Bdm => format!("bdm ({:?})", cfg.granularity),
            ControllerKind::Arf => format!("arf ({:?})", cfg.granularity),
            ControllerKind::Edca => format!(
                "edca voice aifsn={} cw={}..{}; data aifsn={} cw={}..{}; 11 Mbps",
                EDCA_VOICE.0, EDCA_VOICE.1, EDCA_VOICE.2, EDCA_DATA.0, EDCA_DATA.1, EDCA_DATA.2
            ),
            ControllerKind::Fixed(r) => format!("fixed {r}"),
        };
        let data_bps = self.class_throughput_bps(FrameClass::Data);
        let planned = number_of_calls(&CapacityInputs {
            correc_fac: cfg.correc_fac,
            rb: DataRate::Mbps11.bits_per_second() as f64,
            rbt: data_bps.clamp(0.0, DataRate::Mbps11.bits_per_second() as f64),
            codec_bw: cfg.per_call_rate_bps(),
        })
        .map_or_else(|e| e.to_string(), |n| n.to_string());
        vec![
            ("name".into(), cfg.name.clone()),
            ("seed".into(), cfg.seed.to_string()),
            ("controller".into(), controller),
            ("stations".into(), cfg.stations.to_string()),
            ("data_stations".into(), cfg.data_stations.to_string()),
            ("per_call_rate_bps".into(), cfg.per_call_rate_bps().to_string()),
            ("admission".into(), cfg.admission_enabled().to_string()),
            ("calls_admitted".into(), self.calls_admitted.to_string()),
            ("calls_blocked".into(), self.calls_blocked.to_string()),
            ("planned_calls".into(), planned),
        ]
    }

    fn class_throughput_bps(&self, class: FrameClass) -> f64 {
        let iv = Interval::new(self.cfg.warmup(), self.cfg.duration());
        let of_class: Vec<TxRecord> = self.log.records.iter().filter(|r| r.class == class).cloned().collect();
        throughput(&of_class, iv)
    }

    fn finish(mut self) -> RunOutput {
        self.log.busy = self.channel.busy.clone();
        let report = build_report(&self.log, &self.report_spec());
        let metadata = self.metadata();
        RunOutput {
            report,
            metadata,
            calls_admitted: self.calls_admitted,
            calls_blocked: self.calls_blocked,
            events: self.queue.processed(),
            log: self.log,
            config: self.cfg,
        }
    }
}

/// Builds and runs one scenario to completion.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, SimError> {
    Ok(Simulation::new(cfg.clone())?.run())
}
