use crate::mac::timing::AccessParams;
use crate::rng::RngStream;

/// Result of one MAC transmission attempt, or of a whole retry chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TxResult {
    Success,
    Failure,
}

/// Uniform backoff in `[0, cw-1]` slots.
pub fn draw_backoff(cw: u32, rng: &mut RngStream) -> u32 {
    rng.next_uniform(cw.max(1) as u64).expect("non-empty range") as u32
}

/// Binary exponential backoff: double on failure up to `cw_max`, reset to
/// `cw_min` on success.
pub fn advance_cw(cw: u32, result: TxResult, params: &AccessParams) -> u32 {
    match result {
        TxResult::Success => params.cw_min,
        TxResult::Failure => cw.saturating_mul(2).min(params.cw_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::timing::MacTiming;

    fn dcf() -> AccessParams {
        AccessParams::dcf(&MacTiming::default())
    }

    #[test]
    fn doubling_and_reset() {
        let p = dcf();
        assert_eq!(advance_cw(32, TxResult::Failure, &p), 64);
        assert_eq!(advance_cw(1023, TxResult::Failure, &p), 1023);
        assert_eq!(advance_cw(512, TxResult::Success, &p), 32);
    }

    #[test]
    fn consecutive_failures_follow_capped_powers() {
        let p = dcf();
        let mut cw = p.cw_min;
        for k in 1..12u32 {
            cw = advance_cw(cw, TxResult::Failure, &p);
            assert_eq!(cw as u64, (32u64 << k).min(1023));
        }
    }

    #[test]
    fn draws_stay_in_window() {
        let mut rng = RngStream::new(3, 1);
        for _ in 0..10_000 {
            assert!(draw_backoff(32, &mut rng) < 32);
        }
        for _ in 0..100 {
            assert_eq!(draw_backoff(1, &mut rng), 0);
        }
    }

    #[test]
    fn mean_draw_at_cw_min() {
        let mut rng = RngStream::new(11, 2);
        let n = 100_000;
        let mean = (0..n).map(|_| draw_backoff(32, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 15.5).abs() / 15.5 < 0.02, "{mean}");
    }
}
