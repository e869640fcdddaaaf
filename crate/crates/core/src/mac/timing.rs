use crate::engine::Micros;
use crate::mac::rate::DataRate;

/// DCF timing and framing constants for the 802.11b PHY.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MacTiming {
    pub difs: Micros,
    pub sifs: Micros,
    pub slot: Micros,
    /// Contention window bounds, in slots.
    pub cw_min: u32,
    pub cw_max: u32,
    pub phy_header: Micros,
    pub mac_header_bytes: u32,
    /// Full ACK duration, preamble included.
    pub ack_time: Micros,
    pub basic_rate: DataRate,
}

impl Default for MacTiming {
    fn default() -> Self {
        Self {
            difs: 50,
            sifs: 10,
            slot: 20,
            cw_min: 32,
            cw_max: 1023,
            phy_header: 192,
            mac_header_bytes: 34,
            ack_time: 248,
            basic_rate: DataRate::Mbps1,
        }
    }
}

pub const RTS_BYTES: u32 = 20;
pub const CTS_BYTES: u32 = 14;

impl MacTiming {
    pub fn is_valid(&self) -> bool {
        0 < self.sifs && self.sifs < self.difs && 0 < self.cw_min && self.cw_min < self.cw_max
    }

    /// Airtime of a data frame carrying `payload_bytes` above the MAC header.
    pub fn data_airtime(&self, payload_bytes: u32, rate: DataRate) -> Micros {
        frame_airtime(self.phy_header, self.mac_header_bytes, payload_bytes, rate)
    }

    /// How long a sender waits after its frame ends before declaring the ACK
    /// lost: SIFS, the ACK itself, and one slot of guard.
    pub fn ack_timeout(&self) -> Micros {
        self.sifs + self.ack_time + self.slot
    }

    pub fn rts_airtime(&self) -> Micros {
        self.phy_header + bits_to_micros(8 * RTS_BYTES as u64, self.basic_rate)
    }

    pub fn cts_airtime(&self) -> Micros {
        self.phy_header + bits_to_micros(8 * CTS_BYTES as u64, self.basic_rate)
    }

    pub fn cts_timeout(&self) -> Micros {
        self.sifs + self.cts_airtime() + self.slot
    }
}

/// Time to clock `bits` out at `rate`, rounded up to a whole microsecond.
pub fn bits_to_micros(bits: u64, rate: DataRate) -> Micros {
    (bits * 1_000_000).div_ceil(rate.bits_per_second())
}

/// PHY preamble/header plus the MAC header and payload bits at `rate`.
pub fn frame_airtime(
    phy_header: Micros,
    mac_header_bytes: u32,
    payload_bytes: u32,
    rate: DataRate,
) -> Micros {
    let bits = 8 * (mac_header_bytes as u64 + payload_bytes as u64);
    phy_header + bits_to_micros(bits, rate)
}

/// Per-station channel access parameters: plain DCF uses DIFS and the
/// global CW bounds; the EDCA baseline overrides them per access category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AccessParams {
    pub cw_min: u32,
    pub cw_max: u32,
    /// Idle time required before the backoff countdown starts (DIFS or AIFS).
    pub ifs: Micros,
}

impl AccessParams {
    pub fn dcf(timing: &MacTiming) -> Self {
        Self {
            cw_min: timing.cw_min,
            cw_max: timing.cw_max,
            ifs: timing.difs,
        }
    }

    /// AIFS = SIFS + aifsn slots.
    pub fn edca(timing: &MacTiming, aifsn: u32, cw_min: u32, cw_max: u32) -> Self {
        Self {
            cw_min,
            cw_max,
            ifs: timing.sifs + aifsn as Micros * timing.slot,
        }
    }
}
