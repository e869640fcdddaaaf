//! 802.11b DCF medium access: timing, rates, backoff, the shared channel,
//! the bit-error model and the per-station state machine.

pub mod backoff;
pub mod channel;
pub mod error_model;
pub mod rate;
pub mod station;
pub mod timing;

pub use backoff::{advance_cw, draw_backoff, TxResult};
pub use channel::{resolve_transmissions, AttemptOutcome, BusyLog, ChannelState, Resolution, Transmission};
pub use error_model::{frame_error_rate, BerTable};
pub use rate::{rate_for_distance, DataRate, OutOfCoverage, RateProfile};
pub use station::{Frame, FrameClass, MacAction, MacEvent, Phase, Station, StationId};
pub use timing::{frame_airtime, AccessParams, MacTiming};
