//! VoIP source modelling and capacity planning.

pub mod codec;
pub mod planning;
pub mod source;

pub use codec::{
    header_overhead_bps, packet_payload_bytes, per_call_bandwidth, CodecProfile, HeaderMode, HeaderStack,
    VoipError, VoipFlow,
};
pub use planning::{erlang_b, number_of_calls, CapacityInputs, DEFAULT_CORREC_FAC};
pub use source::{Activity, VoiceSource};
