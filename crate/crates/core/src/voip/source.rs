//! Voice packet arrivals, with optional silence suppression.

use crate::engine::Micros;
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activity {
    AlwaysOn,
    /// Exponential talkspurts and silences with the given means.
    OnOff {
        mean_talk_ms: f64,
        mean_silence_ms: f64,
    },
}

impl Activity {
    /// A zero silence mean degenerates to an always-on source.
    pub fn on_off(mean_talk_ms: f64, mean_silence_ms: f64) -> Self {
        if mean_silence_ms <= 0.0 {
            Activity::AlwaysOn
        } else {
            Activity::OnOff {
                mean_talk_ms,
                mean_silence_ms,
            }
        }
    }

    pub fn on_fraction(&self) -> f64 {
        match *self {
            Activity::AlwaysOn => 1.0,
            Activity::OnOff {
                mean_talk_ms,
                mean_silence_ms,
            } => mean_talk_ms / (mean_talk_ms + mean_silence_ms),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VoiceSource {
    ptime: Micros,
    activity: Activity,
    talk_end: Micros,
}

fn ms_draw(rng: &mut RngStream, mean_ms: f64) -> Micros {
    ((rng.next_exp(mean_ms) * 1000.0).round() as Micros).max(1)
}

impl VoiceSource {
    pub fn new(ptime_ms: u32, activity: Activity) -> Self {
        Self {
            ptime: ptime_ms as Micros * 1000,
            activity,
            talk_end: Micros::MAX,
        }
    }

    /// Time of the first packet of a source switched on at `at`; a call
    /// opens with a talkspurt.
    pub fn start(&mut self, at: Micros, rng: &mut RngStream) -> Micros {
        if let Activity::OnOff { mean_talk_ms, .. } = self.activity {
            self.talk_end = at + ms_draw(rng, mean_talk_ms);
        }
        at
    }

    /// Arrival time of the packet after the one emitted at `now`, skipping
    /// any silence gap.
    pub fn next_voice_packet(&mut self, now: Micros, rng: &mut RngStream) -> Micros {
        let next = now + self.ptime;
        match self.activity {
            Activity::AlwaysOn => next,
            Activity::OnOff {
                mean_talk_ms,
                mean_silence_ms,
            } => {
                if next < self.talk_end {
                    return next;
                }
                let talk_start = self.talk_end + ms_draw(rng, mean_silence_ms);
                self.talk_end = talk_start + ms_draw(rng, mean_talk_ms);
                talk_start
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn always_on_is_a_fixed_grid() {
        let mut rng = RngStream::new(1, 1);
        let mut src = VoiceSource::new(20, Activity::AlwaysOn);
        let mut t = src.start(5_000, &mut rng);
        let mut times = vec![t];
        for _ in 0..4 {
            t = src.next_voice_packet(t, &mut rng);
            times.push(t);
        }
        assert_eq!(times, vec![5_000, 25_000, 45_000, 65_000, 85_000]);
    }

    #[test]
    fn full_on_fraction_matches_always_on() {
        let act = Activity::on_off(1000.0, 0.0);
        assert_eq!(act, Activity::AlwaysOn);
        assert_eq!(act.on_fraction(), 1.0);
    }

    #[test]
    fn long_run_packet_rate_tracks_on_fraction() {
        let act = Activity::on_off(1000.0, 1500.0);
        assert!((act.on_fraction() - 0.4).abs() < 1e-12);
        let mut rng = RngStream::new(17, 4);
        let mut src = VoiceSource::new(20, act);
        let horizon: Micros = 20_000 * 1_000_000;
        let mut t = src.start(0, &mut rng);
        let mut packets = 0u64;
        while t < horizon {
            packets += 1;
            t = src.next_voice_packet(t, &mut rng);
        }
        let rate = packets as f64 / 20_000.0;
        let expected = 0.4 * 50.0;
        assert!((rate - expected).abs() / expected < 0.05, "rate {rate}");
    }
}
