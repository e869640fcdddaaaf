use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::voip::source::Activity;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoipError {
    #[error("{codec} at {ptime_ms} ms does not packetize into whole bytes")]
    FractionalPacket { codec: &'static str, ptime_ms: u32 },
    #[error("codec bandwidth must be positive")]
    ZeroCodecBandwidth,
    #[error("invalid capacity inputs: {0}")]
    InvalidInputs(&'static str),
    #[error("erlang-b inputs must be finite and non-negative")]
    NegativeLoad,
    #[error("unknown codec {0:?}")]
    UnknownCodec(String),
    #[error("unknown header mode {0:?}")]
    UnknownHeaderMode(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CodecProfile {
    pub name: &'static str,
    pub media_bps: u32,
}

impl CodecProfile {
    pub const G711: CodecProfile = CodecProfile {
        name: "g711",
        media_bps: 64_000,
    };
    pub const G729: CodecProfile = CodecProfile {
        name: "g729",
        media_bps: 8_000,
    };

    pub fn bytes_per_second(&self) -> u32 {
        self.media_bps / 8
    }
}

impl FromStr for CodecProfile {
    type Err = VoipError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['.', '-'], "").as_str() {
            "g711" => Ok(Self::G711),
            "g729" => Ok(Self::G729),
            _ => Err(VoipError::UnknownCodec(s.to_string())),
        }
    }
}

impl fmt::Display for CodecProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum HeaderMode {
    #[default]
    Full,
    Compressed,
}

impl FromStr for HeaderMode {
    type Err = VoipError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "full" => Ok(HeaderMode::Full),
            "compressed" => Ok(HeaderMode::Compressed),
            _ => Err(VoipError::UnknownHeaderMode(s.to_string())),
        }
    }
}

impl fmt::Display for HeaderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HeaderMode::Full => "full",
            HeaderMode::Compressed => "compressed",
        })
    }
}

/// RTP/UDP/IP encapsulation of one voice packet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeaderStack {
    pub ip_bytes: u32,
    pub udp_bytes: u32,
    pub rtp_bytes: u32,
    /// Size of the whole stack after header compression.
    pub compressed_bytes: u32,
    pub mode: HeaderMode,
}

impl HeaderStack {
    pub fn new(mode: HeaderMode) -> Self {
        Self {
            ip_bytes: 20,
            udp_bytes: 8,
            rtp_bytes: 12,
            compressed_bytes: 2,
            mode,
        }
    }

    pub fn bytes(&self) -> u32 {
        match self.mode {
            HeaderMode::Full => self.ip_bytes + self.udp_bytes + self.rtp_bytes,
            HeaderMode::Compressed => self.compressed_bytes,
        }
    }

    pub fn bits(&self) -> u32 {
        8 * self.bytes()
    }
}

/// Voice bytes carried by one packet.
pub fn packet_payload_bytes(codec: &CodecProfile, ptime_ms: u32) -> Result<u32, VoipError> {
    let bits = codec.media_bps as u64 * ptime_ms as u64;
    // bits per packet = media_bps * ptime / 1000; bytes need a further /8
    if !bits.is_multiple_of(8_000) {
        return Err(VoipError::FractionalPacket {
            codec: codec.name,
            ptime_ms,
        });
    }
    Ok((bits / 8_000) as u32)
}

/// Header bits per second for one direction of a call.
pub fn header_overhead_bps(ptime_ms: u32, mode: HeaderMode) -> f64 {
    let bits = HeaderStack::new(mode).bits() as f64;
    bits * 1000.0 / ptime_ms as f64
}

/// One unidirectional voice stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoipFlow {
    pub codec: CodecProfile,
    pub ptime_ms: u32,
    pub header: HeaderStack,
    pub activity: Activity,
}

impl VoipFlow {
    pub fn new(codec: CodecProfile, ptime_ms: u32, mode: HeaderMode) -> Self {
        Self {
            codec,
            ptime_ms,
            header: HeaderStack::new(mode),
            activity: Activity::AlwaysOn,
        }
    }

    pub fn packets_per_second(&self) -> f64 {
        1000.0 / self.ptime_ms as f64
    }

    /// Bytes handed to the MAC per packet: voice plus RTP/UDP/IP.
    pub fn wire_payload_bytes(&self) -> Result<u32, VoipError> {
        Ok(packet_payload_bytes(&self.codec, self.ptime_ms)? + self.header.bytes())
    }
}

/// Codec rate plus header overhead, one direction, ignoring silence.
pub fn per_call_bandwidth(flow: &VoipFlow) -> f64 {
    flow.codec.media_bps as f64 + header_overhead_bps(flow.ptime_ms, flow.header.mode)
}
