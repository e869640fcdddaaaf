//! Capacity planning: the spare-bandwidth call count and Erlang-B blocking.

use crate::voip::codec::VoipError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityInputs {
    /// Correction factor for real network performance, in (0, 1].
    pub correc_fac: f64,
    /// Real bandwidth, bits/s.
    pub rb: f64,
    /// Part of `rb` already used for data, bits/s.
    pub rbt: f64,
    /// Bandwidth one call needs, bits/s.
    pub codec_bw: f64,
}

pub const DEFAULT_CORREC_FAC: f64 = 0.7;

impl CapacityInputs {
    pub fn validate(&self) -> Result<(), VoipError> {
        if !(self.codec_bw > 0.0) {
            return Err(VoipError::ZeroCodecBandwidth);
        }
        if !(self.correc_fac > 0.0 && self.correc_fac <= 1.0) {
            return Err(VoipError::InvalidInputs("correction factor must lie in (0, 1]"));
        }
        if !(self.rbt >= 0.0 && self.rb >= self.rbt && self.rb.is_finite()) {
            return Err(VoipError::InvalidInputs("need rb >= rbt >= 0"));
        }
        Ok(())
    }

    /// Un-floored `correc_fac * (rb - rbt) / codec_bw`.
    pub fn call_ratio(&self) -> Result<f64, VoipError> {
        self.validate()?;
        Ok(self.correc_fac * (self.rb - self.rbt) / self.codec_bw)
    }
}

/// Whole calls that fit in the corrected spare bandwidth.
pub fn number_of_calls(inputs: &CapacityInputs) -> Result<u64, VoipError> {
    let ratio = inputs.call_ratio()?;
    // absorb representation error in the correction factor (0.7 is inexact)
    Ok((ratio + 1e-9).floor() as u64)
}

/// Erlang-B blocking probability for `servers` channels offered `offered`
/// erlangs, by the standard recursion.
pub fn erlang_b(servers: u32, offered: f64) -> Result<f64, VoipError> {
    if !(offered >= 0.0 && offered.is_finite()) {
        return Err(VoipError::NegativeLoad);
    }
    let mut b = 1.0;
    for n in 1..=servers {
        b = offered * b / (n as f64 + offered * b);
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn inputs(correc_fac: f64, rb: f64, rbt: f64, codec_bw: f64) -> CapacityInputs {
        CapacityInputs {
            correc_fac,
            rb,
            rbt,
            codec_bw,
        }
    }

    #[test]
    fn calls_examples() {
        assert_eq!(number_of_calls(&inputs(0.7, 6e6, 6e6, 24e3)), Ok(0));
        assert_eq!(number_of_calls(&inputs(0.7, 6e6, 1.2e6, 24e3)), Ok(140));
        assert_eq!(number_of_calls(&inputs(1.0, 48e3, 24e3, 24e3)), Ok(1));
        assert_eq!(
            number_of_calls(&inputs(1.0, 1e6, 0.0, 0.0)),
            Err(VoipError::ZeroCodecBandwidth)
        );
        assert!(number_of_calls(&inputs(1.0, 1e6, 2e6, 1.0)).is_err());
    }

    #[test]
    fn fractional_calls_round_down() {
        let i = inputs(1.0, 100e3, 0.0, 48e3);
        assert_eq!(number_of_calls(&i), Ok(2));
        assert!((i.call_ratio().unwrap() - 2.0833).abs() < 1e-3);
    }

    #[test]
    fn erlang_examples() {
        assert_eq!(erlang_b(0, 5.0), Ok(1.0));
        assert_eq!(erlang_b(2, 2.0), Ok(0.4));
        assert_eq!(erlang_b(1, 1.0), Ok(0.5));
        assert_eq!(erlang_b(3, 0.0), Ok(0.0));
        assert!(erlang_b(3, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn erlang_monotone(n in 0u32..60, a in 0.0f64..60.0, da in 0.0f64..5.0) {
            let b = erlang_b(n, a).unwrap();
            prop_assert!((0.0..=1.0).contains(&b));
            prop_assert!(erlang_b(n + 1, a).unwrap() <= b);
            prop_assert!(erlang_b(n, a + da).unwrap() >= b);
        }

        #[test]
        fn calls_monotone(
            rbt in 0.0f64..1e6,
            spare in 0.0f64..1e7,
            extra in 0.0f64..1e6,
            codec in 1e3f64..1e5,
            fac in 0.1f64..=1.0,
        ) {
            let base = number_of_calls(&inputs(fac, rbt + spare, rbt, codec)).unwrap();
            prop_assert!(number_of_calls(&inputs(fac, rbt + spare + extra, rbt, codec)).unwrap() >= base);
            let more_rbt = (rbt + extra).min(rbt + spare);
            prop_assert!(number_of_calls(&inputs(fac, rbt + spare, more_rbt, codec)).unwrap() <= base);
            prop_assert!(number_of_calls(&inputs(fac, rbt + spare, rbt, codec * 1.5)).unwrap() <= base);
        }
    }
}
