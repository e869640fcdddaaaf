//! Seeded random streams.
//!
//! Every stream is a ChaCha8 generator keyed by the scenario seed and
//! separated by the ChaCha stream id, so each station (and the channel-error
//! process) draws from its own independent, platform-stable sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("uniform draw over an empty range")]
pub struct EmptyRange;

/// Stream id reserved for channel bit-error draws.
pub const CHANNEL_STREAM: u64 = 0;

/// Stream id of the station with index `station`.
pub fn station_stream(station: usize) -> u64 {
    station as u64 + 1
}

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform integer in `[0, n-1]`.
    pub fn next_uniform(&mut self, n: u64) -> Result<u64, EmptyRange> {
        if n == 0 {
            return Err(EmptyRange);
        }
        Ok(self.rng.random_range(0..n))
    }

    /// Uniform real in `[0, 1)`.
    pub fn next_unit(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Exponentially distributed value with the given mean. A non-positive
    /// mean yields 0.
    pub fn next_exp(&mut self, mean: f64) -> f64 {
        if mean <= 0.0 {
            return 0.0;
        }
        Exp::new(1.0 / mean)
            .expect("positive rate")
            .sample(&mut self.rng)
    }
}
