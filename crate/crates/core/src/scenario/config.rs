//! Scenario files: line-oriented `key=value` with `#` comments.

use std::collections::HashMap;
use std::str::FromStr;

use thiserror::Error;

use crate::controller::Granularity;
use crate::engine::{Micros, MICROS_PER_SEC};
use crate::mac::{rate_for_distance, BerTable, DataRate, MacTiming, RateProfile};
use crate::voip::{per_call_bandwidth, Activity, CodecProfile, HeaderMode, VoipFlow, DEFAULT_CORREC_FAC};

pub const MAX_STATIONS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: `{key}`: {msg}")]
    BadValue { line: usize, key: String, msg: String },
    #[error("line {line}: missing required key `{key}`")]
    Missing { line: usize, key: &'static str },
}

/// A config rejected by [`ScenarioConfig::validate`].
#[derive(Debug, Clone, PartialEq, Error)]
#[error("`{key}`: {msg}")]
pub struct InvalidConfig {
    pub key: &'static str,
    pub msg: String,
}

fn invalid(key: &'static str, msg: impl Into<String>) -> InvalidConfig {
    InvalidConfig { key, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Traffic {
    /// One two-way call per station, the AP carrying every downlink.
    Voice,
    /// Every station always has a frame for the AP.
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControllerKind {
    Bdm,
    /// Rate ladder only.
    Arf,
    /// Two access categories at a fixed 11 Mbps.
    Edca,
    Fixed(DataRate),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataLoad {
    Saturated,
    /// Poisson arrivals offering this many bits/s per data station.
    Poisson { bps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    /// On for BDM, off otherwise.
    Auto,
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accounting {
    /// Throughput counts payload above the MAC header.
    Payload,
    /// Throughput also counts the MAC header.
    Airtime,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Placement {
    /// Every station at the same distance.
    Fixed(f64),
    /// Evenly spread between the bounds.
    Spread { min_m: f64, max_m: f64 },
    /// One distance per station, voice stations first.
    Listed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    /// Voice stations, or saturated senders under [`Traffic::Saturated`].
    pub stations: usize,
    pub data_stations: usize,
    pub traffic: Traffic,
    /// Frame size of saturated senders; defaults to one voice packet.
    pub payload_bytes: Option<u32>,
    pub codec: CodecProfile,
    pub ptime_ms: u32,
    pub header: HeaderMode,
    pub talkspurt_ms: f64,
    /// Zero disables silence suppression.
    pub silence_ms: f64,
    pub controller: ControllerKind,
    pub granularity: Granularity,
    pub bdm_initial_rate_level: u8,
    pub data_load: DataLoad,
    pub data_frame_bytes: u32,
    pub placement: Placement,
    pub profile: RateProfile,
    pub duration_s: f64,
    pub warmup_s: Option<f64>,
    pub seed: u64,
    pub ber: BerTable,
    pub rts_cts: bool,
    pub window_ms: u64,
    pub tick_ms: u64,
    pub report_window_ms: u64,
    pub correc_fac: f64,
    pub admission: Admission,
    pub admission_target_pct: Option<f64>,
    pub capacity_divisor_bps: Option<f64>,
    pub accounting: Accounting,
    pub retry_limit: u32,
    pub queue_limit: usize,
    pub call_spacing_ms: u64,
    pub timing: MacTiming,
}

impl ScenarioConfig {
    /// Defaults everywhere but the station count.
    pub fn new(stations: usize) -> Self {
        Self {
            name: String::from("scenario"),
            stations,
            data_stations: 0,
            traffic: Traffic::Voice,
            payload_bytes: None,
            codec: CodecProfile::G729,
            ptime_ms: 20,
            header: HeaderMode::Full,
            talkspurt_ms: 1000.0,
            silence_ms: 0.0,
            controller: ControllerKind::Bdm,
            granularity: Granularity::PerFrame,
            bdm_initial_rate_level: 0,
            data_load: DataLoad::Poisson { bps: 0.0 },
            data_frame_bytes: 1500,
            placement: Placement::Fixed(10.0),
            profile: RateProfile::Dot11b,
            duration_s: 30.0,
            warmup_s: None,
            seed: 1,
            ber: BerTable::default(),
            rts_cts: false,
            window_ms: 1000,
            tick_ms: 100,
            report_window_ms: 1000,
            correc_fac: DEFAULT_CORREC_FAC,
            admission: Admission::Auto,
            admission_target_pct: None,
            capacity_divisor_bps: None,
            accounting: Accounting::Payload,
            retry_limit: 7,
            queue_limit: 50,
            call_spacing_ms: 1000,
            timing: MacTiming::default(),
        }
    }

    pub fn validate(&self) -> Result<(), InvalidConfig> {
        if !(1..=MAX_STATIONS).contains(&self.stations) {
            return Err(invalid("stations", format!("must lie in 1..={MAX_STATIONS}")));
        }
        if self.stations + self.data_stations > MAX_STATIONS {
            return Err(invalid(
                "data_stations",
                format!("stations plus data_stations exceeds {MAX_STATIONS}"),
            ));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(invalid("duration_s", "must be positive"));
        }
        if let Some(w) = self.warmup_s {
            if !(w >= 0.0 && w < self.duration_s) {
                return Err(invalid("warmup_s", "must lie in [0, duration_s)"));
            }
        }
        if self.ptime_ms == 0 {
            return Err(invalid("ptime_ms", "must be positive"));
        }
        self.voice_flow()
            .wire_payload_bytes()
            .map_err(|e| invalid("ptime_ms", e.to_string()))?;
        if !(self.talkspurt_ms > 0.0) || !(self.silence_ms >= 0.0) {
            return Err(invalid("silence_ms", "talkspurt must be positive and silence non-negative"));
        }
        if self.bdm_initial_rate_level > DataRate::TOP_LEVEL {
            return Err(invalid("bdm_initial_rate_level", "must lie in 0..=3"));
        }
        if let DataLoad::Poisson { bps } = self.data_load {
            if !(bps >= 0.0 && bps.is_finite()) {
                return Err(invalid("data_load_kbps", "must be non-negative"));
            }
        }
        if self.data_frame_bytes == 0 || self.payload_bytes == Some(0) {
            return Err(invalid("data_frame_bytes", "frames must carry a payload"));
        }
        if !self.ber.is_valid() {
            return Err(invalid("ber", "each entry must lie in [0, 1)"));
        }
        if self.window_ms == 0 || self.tick_ms == 0 || self.report_window_ms == 0 {
            return Err(invalid("window_ms", "windows and ticks must be positive"));
        }
        if !(self.correc_fac > 0.0 && self.correc_fac <= 1.0) {
            return Err(invalid("correc_fac", "must lie in (0, 1]"));
        }
        if let Some(t) = self.admission_target_pct {
            if !(0.0..=100.0).contains(&t) {
                return Err(invalid("admission_target_pct", "must lie in [0, 100]"));
            }
        }
        if let Some(d) = self.capacity_divisor_bps {
            if !(d > 0.0) {
                return Err(invalid("capacity_divisor_bps", "must be positive"));
            }
        }
        if self.queue_limit == 0 {
            return Err(invalid("queue_limit", "must be positive"));
        }
        let key = match self.placement {
            Placement::Fixed(_) => "distance_m",
            Placement::Spread { .. } => "distance_range_m",
            Placement::Listed(_) => "distances",
        };
        if let Placement::Listed(d) = &self.placement {
            if d.len() != self.stations + self.data_stations {
                return Err(invalid(key, "need one distance per station"));
            }
        }
        if let Placement::Spread { min_m, max_m } = self.placement {
            if !(min_m <= max_m) {
                return Err(invalid(key, "min must not exceed max"));
            }
        }
        for d in self.distances() {
            rate_for_distance(d, self.profile).map_err(|e| invalid(key, e.to_string()))?;
        }
        Ok(())
    }

    /// Distance of each non-AP station, voice stations first.
    pub fn distances(&self) -> Vec<f64> {
        let n = self.stations + self.data_stations;
        match &self.placement {
            Placement::Fixed(d) => vec![*d; n],
            Placement::Spread { min_m, max_m } => (0..n)
                .map(|i| {
                    if n == 1 {
                        *min_m
                    } else {
                        min_m + (max_m - min_m) * i as f64 / (n - 1) as f64
                    }
                })
                .collect(),
            Placement::Listed(d) => d.clone(),
        }
    }

    pub fn voice_flow(&self) -> VoipFlow {
        let mut flow = VoipFlow::new(self.codec, self.ptime_ms, self.header);
        flow.activity = Activity::on_off(self.talkspurt_ms, self.silence_ms);
        flow
    }

    /// Capacity divisor: both directions of one call.
    pub fn per_call_rate_bps(&self) -> f64 {
        self.capacity_divisor_bps
            .unwrap_or_else(|| 2.0 * per_call_bandwidth(&self.voice_flow()))
    }

    pub fn admission_enabled(&self) -> bool {
        match self.admission {
            Admission::Auto => self.controller == ControllerKind::Bdm,
            Admission::On => true,
            Admission::Off => false,
        }
    }

    pub fn duration(&self) -> Micros {
        secs_to_micros(self.duration_s)
    }

    /// Explicit warmup, else until one window after the last call starts,
    /// capped at half the run.
    pub fn warmup(&self) -> Micros {
        let w = self.warmup_s.map(secs_to_micros).unwrap_or_else(|| {
            let calls = match self.traffic {
                Traffic::Voice => self.stations as Micros,
                Traffic::Saturated => 0,
            };
            (calls.saturating_sub(1) * self.call_spacing_ms + self.window_ms) * 1000
        });
        w.min(self.duration() / 2).min(self.duration())
    }

    /// Equal apart from controller choice and name.
    pub fn differs_only_in_controller(&self, other: &ScenarioConfig) -> bool {
        let strip = |c: &ScenarioConfig| {
            let mut c = c.clone();
            c.name.clear();
            c.controller = ControllerKind::Bdm;
            c.granularity = Granularity::default();
            c.bdm_initial_rate_level = 0;
            c
        };
        strip(self) == strip(other)
    }
}

fn secs_to_micros(s: f64) -> Micros {
    (s * MICROS_PER_SEC as f64).round() as Micros
}

fn parse_num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse::<T>().map_err(|_| format!("cannot parse {v:?}"))
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|s| parse_num::<f64>(s.trim())).collect()
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(format!("expected a boolean, got {v:?}")),
    }
}

fn apply(cfg: &mut ScenarioConfig, key: &str, v: &str) -> Result<(), String> {
    match key {
        "name" => cfg.name = v.to_string(),
        "stations" => cfg.stations = parse_num(v)?,
        "data_stations" => cfg.data_stations = parse_num(v)?,
        "traffic" => {
            cfg.traffic = match v {
                "voice" => Traffic::Voice,
                "saturated" => Traffic::Saturated,
                _ => return Err("expected voice or saturated".into()),
            }
        }
        "payload_bytes" => cfg.payload_bytes = Some(parse_num(v)?),
        "codec" => cfg.codec = v.parse().map_err(|e: crate::voip::VoipError| e.to_string())?,
        "ptime_ms" => cfg.ptime_ms = parse_num(v)?,
        "header" => cfg.header = v.parse().map_err(|e: crate::voip::VoipError| e.to_string())?,
        "talkspurt_ms" => cfg.talkspurt_ms = parse_num(v)?,
        "silence_ms" => cfg.silence_ms = parse_num(v)?,
        "silence_suppression" => {
            if !parse_bool(v)? {
                cfg.silence_ms = 0.0;
            } else if cfg.silence_ms == 0.0 {
                cfg.silence_ms = 1500.0;
            }
        }
        "controller" => {
            cfg.controller = match v {
                "bdm" => ControllerKind::Bdm,
                "arf" => ControllerKind::Arf,
                "edca" => ControllerKind::Edca,
                "fixed" => ControllerKind::Fixed(match cfg.controller {
                    ControllerKind::Fixed(r) => r,
                    _ => DataRate::Mbps11,
                }),
                _ => return Err("expected bdm, arf, edca or fixed".into()),
            }
        }
        "rate_mbps" => {
            let r = DataRate::from_mbps_str(v).ok_or("expected 1, 2, 5.5 or 11")?;
            cfg.controller = ControllerKind::Fixed(r);
        }
        "granularity" => {
            cfg.granularity = match v {
                "frame" => Granularity::PerFrame,
                "attempt" => Granularity::PerAttempt,
                _ => return Err("expected frame or attempt".into()),
            }
        }
        "bdm_initial_rate_level" => cfg.bdm_initial_rate_level = parse_num(v)?,
        "data_load_kbps" => {
            cfg.data_load = if v == "saturated" {
                DataLoad::Saturated
            } else {
                DataLoad::Poisson {
                    bps: parse_num::<f64>(v)? * 1000.0,
                }
            }
        }
        "data_frame_bytes" => cfg.data_frame_bytes = parse_num(v)?,
        "distance_m" => cfg.placement = Placement::Fixed(parse_num(v)?),
        "distance_range_m" => match parse_list(v)?.as_slice() {
            [min_m, max_m] => {
                cfg.placement = Placement::Spread {
                    min_m: *min_m,
                    max_m: *max_m,
                }
            }
            _ => return Err("expected min,max".into()),
        },
        "distances" => cfg.placement = Placement::Listed(parse_list(v)?),
        "profile" => {
            cfg.profile = match v {
                "11b" | "dot11b" => RateProfile::Dot11b,
                "full" => RateProfile::FullTable,
                _ => return Err("expected 11b or full".into()),
            }
        }
        "duration_s" => cfg.duration_s = parse_num(v)?,
        "warmup_s" => cfg.warmup_s = Some(parse_num(v)?),
        "seed" => cfg.seed = parse_num(v)?,
        "ber" => {
            let list = parse_list(v)?;
            let arr: [f64; 4] = list
                .try_into()
                .map_err(|_| "expected four values for 1, 2, 5.5 and 11 Mbps")?;
            cfg.ber = BerTable(arr);
        }
        "rts_cts" => cfg.rts_cts = parse_bool(v)?,
        "window_ms" => cfg.window_ms = parse_num(v)?,
        "tick_ms" => cfg.tick_ms = parse_num(v)?,
        "report_window_ms" => cfg.report_window_ms = parse_num(v)?,
        "correc_fac" => cfg.correc_fac = parse_num(v)?,
        "admission" => {
            cfg.admission = match v {
                "auto" => Admission::Auto,
                "on" => Admission::On,
                "off" => Admission::Off,
                _ => return Err("expected auto, on or off".into()),
            }
        }
        "admission_target_pct" => cfg.admission_target_pct = Some(parse_num(v)?),
        "capacity_divisor_bps" => cfg.capacity_divisor_bps = Some(parse_num(v)?),
        "accounting" => {
            cfg.accounting = match v {
                "payload" => Accounting::Payload,
                "airtime" => Accounting::Airtime,
                _ => return Err("expected payload or airtime".into()),
            }
        }
        "retry_limit" => cfg.retry_limit = parse_num(v)?,
        "queue_limit" => cfg.queue_limit = parse_num(v)?,
        "call_spacing_ms" => cfg.call_spacing_ms = parse_num(v)?,
        _ => return Err(String::new()),
    }
    Ok(())
}

/// Parses and validates a scenario. Errors name the offending line and key.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg = ScenarioConfig::new(0);
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut line_count = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        line_count = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
        let (key, value) = (key.trim(), value.trim());
        if seen.insert(key.to_string(), line).is_some() {
            return Err(ConfigError::Duplicate {
                line,
                key: key.to_string(),
            });
        }
        apply(&mut cfg, key, value).map_err(|msg| {
            if msg.is_empty() {
                ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                }
            } else {
                ConfigError::BadValue {
                    line,
                    key: key.to_string(),
                    msg,
                }
            }
        })?;
    }
    if !seen.contains_key("stations") {
        return Err(ConfigError::Missing {
            line: line_count + 1,
            key: "stations",
        });
    }
    cfg.validate().map_err(|e| {
        let line = std::iter::once(e.key)
            .chain(aliases(e.key).iter().copied())
            .find_map(|k| seen.get(k).copied())
            .unwrap_or(line_count + 1);
        ConfigError::BadValue {
            line,
            key: e.key.to_string(),
            msg: e.msg,
        }
    })?;
    Ok(cfg)
}

/// Other keys that feed a validated field.
fn aliases(key: &str) -> &'static [&'static str] {
    match key {
        "silence_ms" => &["silence_suppression", "talkspurt_ms"],
        "data_frame_bytes" => &["payload_bytes"],
        "ptime_ms" => &["codec"],
        "data_stations" => &["stations"],
        "window_ms" => &["tick_ms", "report_window_ms"],
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let cfg = parse_scenario("stations=10\ncontroller=bdm").unwrap();
        assert_eq!(cfg.stations, 10);
        assert_eq!(cfg.controller, ControllerKind::Bdm);
        assert_eq!(cfg.codec, CodecProfile::G729);
        assert_eq!(cfg.ptime_ms, 20);
        assert_eq!(cfg.header, HeaderMode::Full);
        assert_eq!(cfg.duration_s, 30.0);
        assert_eq!(cfg.seed, 1);
        assert_eq!(cfg.timing, MacTiming::default());
    }

    #[test]
    fn zero_stations_is_a_range_error() {
        match parse_scenario("stations=0") {
            Err(ConfigError::BadValue { line: 1, key, .. }) => assert_eq!(key, "stations"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn controller_choices() {
        let c = |t: &str| parse_scenario(&format!("stations=5\n{t}")).unwrap().controller;
        assert_eq!(c("controller=edca"), ControllerKind::Edca);
        assert_eq!(c("controller=arf"), ControllerKind::Arf);
        assert_eq!(c("controller=fixed\nrate_mbps=1"), ControllerKind::Fixed(DataRate::Mbps1));
        assert_eq!(c("rate_mbps=5.5\ncontroller=fixed"), ControllerKind::Fixed(DataRate::Mbps5_5));
    }

    #[test]
    fn errors_name_line_and_key() {
        let e = parse_scenario("# comment\nstations=4\nwibble=3").unwrap_err();
        assert_eq!(
            e,
            ConfigError::UnknownKey {
                line: 3,
                key: "wibble".into()
            }
        );
        assert!(e.to_string().contains("line 3") && e.to_string().contains("wibble"));
        let e = parse_scenario("stations=4\nseed=abc").unwrap_err();
        assert!(matches!(e, ConfigError::BadValue { line: 2, .. }));
        let e = parse_scenario("controller=bdm\n").unwrap_err();
        assert!(matches!(e, ConfigError::Missing { key: "stations", .. }));
        let e = parse_scenario("stations=4\nstations=5").unwrap_err();
        assert!(matches!(e, ConfigError::Duplicate { line: 2, .. }));
        assert!(matches!(parse_scenario("stations"), Err(ConfigError::Syntax { line: 1 })));
    }

    #[test]
    fn coverage_is_checked() {
        let e = parse_scenario("stations=2\ndistances=10,60").unwrap_err();
        assert!(matches!(e, ConfigError::BadValue { line: 2, ref key, .. } if key == "distances"));
        assert!(parse_scenario("stations=2\ndistances=10,50\nprofile=full").is_ok());
        assert!(parse_scenario("stations=2\ndistances=10").is_err());
    }

    #[test]
    fn comments_and_lists() {
        let cfg = parse_scenario(
            "stations = 3  # three calls\nber=0,0,0,1e-3\ndistance_range_m=5,45\ndata_load_kbps=saturated",
        )
        .unwrap();
        assert_eq!(cfg.ber, BerTable([0.0, 0.0, 0.0, 1e-3]));
        assert_eq!(cfg.distances(), vec![5.0, 25.0, 45.0]);
        assert_eq!(cfg.data_load, DataLoad::Saturated);
    }

    #[test]
    fn controller_only_differences() {
        let a = parse_scenario("stations=5\ncontroller=bdm").unwrap();
        let b = parse_scenario("stations=5\ncontroller=edca\nname=other").unwrap();
        let c = parse_scenario("stations=6\ncontroller=edca").unwrap();
        assert!(a.differs_only_in_controller(&b));
        assert!(!a.differs_only_in_controller(&c));
    }

    #[test]
    fn per_call_divisor_covers_both_directions() {
        let cfg = ScenarioConfig::new(1);
        assert_eq!(cfg.per_call_rate_bps(), 48_000.0);
    }
}
