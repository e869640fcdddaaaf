//! 802.11b data rates and the distance-to-rate coverage tables.

use std::fmt;

use thiserror::Error;

/// One rung of the 802.11b rate ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DataRate {
    Mbps1,
    Mbps2,
    Mbps5_5,
    Mbps11,
}

impl DataRate {
    /// Ladder in level order: level 0 is 1 Mbps, level 3 is 11 Mbps.
    pub const LADDER: [DataRate; 4] = [
        DataRate::Mbps1,
        DataRate::Mbps2,
        DataRate::Mbps5_5,
        DataRate::Mbps11,
    ];

    pub const TOP_LEVEL: u8 = 3;

    pub fn level(self) -> u8 {
        match self {
            DataRate::Mbps1 => 0,
            DataRate::Mbps2 => 1,
            DataRate::Mbps5_5 => 2,
            DataRate::Mbps11 => 3,
        }
    }

    pub fn from_level(level: u8) -> Option<Self> {
        Self::LADDER.get(level as usize).copied()
    }

    pub fn bits_per_second(self) -> u64 {
        match self {
            DataRate::Mbps1 => 1_000_000,
            DataRate::Mbps2 => 2_000_000,
            DataRate::Mbps5_5 => 5_500_000,
            DataRate::Mbps11 => 11_000_000,
        }
    }

    pub fn from_bits_per_second(bps: u64) -> Option<Self> {
        Self::LADDER.into_iter().find(|r| r.bits_per_second() == bps)
    }

    /// Parses "1", "2", "5.5" or "11" (megabits per second).
    pub fn from_mbps_str(s: &str) -> Option<Self> {
        match s.trim() {
            "1" => Some(DataRate::Mbps1),
            "2" => Some(DataRate::Mbps2),
            "5.5" => Some(DataRate::Mbps5_5),
            "11" => Some(DataRate::Mbps11),
            _ => None,
        }
    }

    /// Highest ladder rate not exceeding `cap_bps`, if any.
    pub fn highest_within(cap_bps: u64) -> Option<Self> {
        Self::LADDER
            .into_iter()
            .rev()
            .find(|r| r.bits_per_second() <= cap_bps)
    }
}

impl fmt::Display for DataRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DataRate::Mbps1 => "1",
            DataRate::Mbps2 => "2",
            DataRate::Mbps5_5 => "5.5",
            DataRate::Mbps11 => "11",
        };
        write!(f, "{s} Mbps")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("distance {distance_m} m is outside the coverage of the {profile:?} profile")]
pub struct OutOfCoverage {
    pub distance_m: f64,
    pub profile: RateProfile,
}

/// Which distance/rate table to consult.
///
/// The 802.11b profile is the single 11 Mbps row usable for voice out to
/// 48 m. The full table also carries the 802.11a/g rows; the two are kept
/// apart rather than merged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateProfile {
    Dot11b,
    FullTable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRow {
    pub rate_bps: u64,
    pub min_m: f64,
    pub max_m: f64,
}

const fn row(mbps_x10: u64, min_m: f64, max_m: f64) -> CoverageRow {
    CoverageRow {
        rate_bps: mbps_x10 * 100_000,
        min_m,
        max_m,
    }
}

const DOT11B_ROWS: [CoverageRow; 1] = [row(110, 0.0, 48.0)];

// Sorted by descending rate; the first row covering a distance wins.
const FULL_ROWS: [CoverageRow; 6] = [
    row(540, 0.0, 27.0),
    row(480, 27.0, 29.0),
    row(360, 29.0, 30.0),
    row(240, 30.0, 42.0),
    row(180, 42.0, 54.0),
    row(110, 0.0, 48.0),
];

impl RateProfile {
    pub fn rows(self) -> &'static [CoverageRow] {
        match self {
            RateProfile::Dot11b => &DOT11B_ROWS,
            RateProfile::FullTable => &FULL_ROWS,
        }
    }

    pub fn max_range_m(self) -> f64 {
        self.rows().iter().map(|r| r.max_m).fold(0.0, f64::max)
    }
}

/// Rate in bits/s offered at `distance_m` from the access point.
pub fn rate_for_distance(distance_m: f64, profile: RateProfile) -> Result<u64, OutOfCoverage> {
    let err = OutOfCoverage {
        distance_m,
        profile,
    };
    if !(distance_m >= 0.0) {
        return Err(err);
    }
    profile
        .rows()
        .iter()
        .find(|r| distance_m >= r.min_m && distance_m <= r.max_m)
        .map(|r| r.rate_bps)
        .ok_or(err)
}
