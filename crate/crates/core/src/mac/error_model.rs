//! Frame error model: independent bit errors at a per-rate BER, so the frame
//! error rate grows with both frame length and rate.

use crate::mac::rate::DataRate;

/// Bit error rate for each ladder rate, indexed by level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerTable(pub [f64; 4]);

impl Default for BerTable {
    fn default() -> Self {
        BerTable([0.0, 1e-6, 1e-5, 1e-4])
    }
}

impl BerTable {
    pub const CLEAN: BerTable = BerTable([0.0; 4]);

    pub fn ber(&self, rate: DataRate) -> f64 {
        self.0[rate.level() as usize]
    }

    pub fn is_valid(&self) -> bool {
        self.0.iter().all(|b| (0.0..1.0).contains(b))
    }
}

/// `1 - (1 - ber)^bits` over MAC header plus payload, computed in the log
/// domain so tiny BERs keep full precision.
pub fn frame_error_rate(payload_bytes: u32, mac_header_bytes: u32, rate: DataRate, bers: &BerTable) -> f64 {
    let ber = bers.ber(rate);
    let bits = 8.0 * (payload_bytes as f64 + mac_header_bytes as f64);
    -(bits * (-ber).ln_1p()).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn clean_channel_never_errs() {
        for p in [0, 60, 1500] {
            assert_eq!(frame_error_rate(p, 34, DataRate::Mbps11, &BerTable::CLEAN), 0.0);
        }
    }

    #[test]
    fn ninety_four_byte_frame() {
        let bers = BerTable([1e-5; 4]);
        let fer = frame_error_rate(60, 34, DataRate::Mbps1, &bers);
        // direct power evaluation as the cross-check
        let direct = 1.0 - (1.0 - 1e-5f64).powi(752);
        assert!((fer - direct).abs() < 1e-12);
        assert!((fer - 0.00749).abs() < 5e-5, "{fer}");
    }

    #[test]
    fn default_table_is_monotone_in_rate() {
        let t = BerTable::default();
        assert!(t.is_valid());
        for w in DataRate::LADDER.windows(2) {
            assert!(t.ber(w[0]) < t.ber(w[1]));
        }
    }

    proptest! {
        #[test]
        fn fer_increases_with_size(a in 0u32..3000, d in 1u32..3000, exp in 2i32..8) {
            let bers = BerTable([10f64.powi(-exp); 4]);
            let small = frame_error_rate(a, 34, DataRate::Mbps11, &bers);
            let large = frame_error_rate(a + d, 34, DataRate::Mbps11, &bers);
            // beyond ~37 expected bit errors the FER rounds to 1.0 in f64
            prop_assume!(large < 1.0);
            prop_assert!(small < large);
            prop_assert!((0.0..=1.0).contains(&large));
        }

        #[test]
        fn fer_increases_with_ber(p in 0u32..3000, exp in 2i32..8) {
            let lo = BerTable([10f64.powi(-exp - 1); 4]);
            let hi = BerTable([10f64.powi(-exp); 4]);
            prop_assert!(
                frame_error_rate(p, 34, DataRate::Mbps2, &lo) < frame_error_rate(p, 34, DataRate::Mbps2, &hi)
            );
        }
    }
}
