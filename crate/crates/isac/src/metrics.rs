//! Link and sensing metrics: bit error rate with a normal-approximation
//! 95% confidence interval, and root-mean-square error over Monte Carlo
//! trials.

use crate::{Error, Result};

/// Outcome of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrialRecord {
    pub bit_errors: u64,
    pub bits: u64,
    /// Signed range error in meters, if sensing ran this trial.
    pub range_error: Option<f64>,
    /// Signed velocity error in m/s, if sensing ran this trial.
    pub velocity_error: Option<f64>,
}

/// Aggregated statistics for one (scenario, waveform, SNR) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub ber: f64,
    /// 95% confidence half-width on the BER (normal approximation).
    pub ci95: f64,
    /// Fewer than 100 bit errors were observed, so the interval is loose.
    pub low_confidence: bool,
    pub rmse_range: Option<f64>,
    pub rmse_velocity: Option<f64>,
    pub trials: usize,
}

/// Bit error rate from error and bit counts.
pub fn ber(errors: u64, bits: u64) -> Result<f64> {
    if bits == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(errors as f64 / bits as f64)
}

/// 95% half-width for a Bernoulli proportion: 1.96 sqrt(p(1-p)/n).
pub fn ci95_half_width(p: f64, n: u64) -> f64 {
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Root-mean-square of signed errors.
pub fn rmse(errors: &[f64]) -> Result<f64> {
    if errors.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ms = errors.iter().map(|e| e * e).sum::<f64>() / errors.len() as f64;
    Ok(ms.sqrt())
}

/// Collapse trial records into one sweep point.
pub fn aggregate(trials: &[TrialRecord]) -> Result<SweepPoint> {
    if trials.is_empty() {
        return Err(Error::EmptyInput);
    }
    let errors: u64 = trials.iter().map(|t| t.bit_errors).sum();
    let bits: u64 = trials.iter().map(|t| t.bits).sum();
    // sensing-only cells carry no bits; their BER fields are NaN
    let p = if bits == 0 { f64::NAN } else { ber(errors, bits)? };
    let range_errs: Vec<f64> = trials.iter().filter_map(|t| t.range_error).collect();
    let vel_errs: Vec<f64> = trials.iter().filter_map(|t| t.velocity_error).collect();
    Ok(SweepPoint {
        ber: p,
        ci95: ci95_half_width(p, bits),
        low_confidence: errors < 100,
        rmse_range: if range_errs.is_empty() { None } else { Some(rmse(&range_errs)?) },
        rmse_velocity: if vel_errs.is_empty() { None } else { Some(rmse(&vel_errs)?) },
        trials: trials.len(),
    })
}
