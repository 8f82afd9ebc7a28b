//! Sensing chain: matched-filter range compression, noncoherent
//! integration, peak detection, slow-time phase-difference Doppler
//! estimation, range-Doppler maps, and resolution / CRB calculators.

use crate::dsp;
use crate::waveform::{ComplexSignal, FmParams, OfdmConfig};
use crate::{Error, Result, SPEED_OF_LIGHT};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Fast-time matched-filter output over circular lags 0..N-1 for one symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeProfile {
    pub values: Vec<Complex64>,
}

/// Magnitude profile after noncoherent averaging across slow time.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedProfile {
    pub values: Vec<f64>,
}

/// Range compression backend; the two must agree to 1e-9 relative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompressionMethod {
    /// IFFT(FFT(r) conj(FFT(s))).
    Fft,
    /// Direct circular correlation sum.
    Direct,
}

/// Peak selection policy for [`detect_peaks`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeakPolicy {
    /// The `count` largest local maxima, no two closer than `guard` lags.
    Count { count: usize, guard: usize },
    /// All local maxima above `factor` times the profile median.
    Threshold { factor: f64 },
}

/// Range-Doppler magnitude map with physical axes. Rows are range bins,
/// columns are Doppler bins with zero Doppler centered.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeDopplerMap {
    /// grid[range_bin][doppler_bin], magnitudes.
    pub grid: Vec<Vec<f64>>,
    /// Range of each row in meters.
    pub range_axis: Vec<f64>,
    /// Velocity of each column in m/s.
    pub velocity_axis: Vec<f64>,
}

/// Slow-time window for [`build_rdm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DopplerWindow {
    None,
    Hann,
}

/// One detected target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingEstimate {
    /// Integer lag of the detected peak.
    pub peak_lag: usize,
    /// Range from the parabolically refined (sub-bin) peak lag, meters.
    pub range: f64,
    pub doppler: f64,
    pub velocity: f64,
    /// Post-compression SNR estimate (peak power over median off-peak
    /// power), linear.
    pub post_compression_snr: f64,
}

/// Closed-form sensing limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensingLimits {
    /// Range resolution c / (2 B_eff) in meters.
    pub delta_r: f64,
    /// Unambiguous velocity lambda / (4 T_sym_eff) in m/s.
    pub v_max: f64,
    /// Velocity resolution lambda / (2 U T_sym_eff) in m/s.
    pub delta_v: f64,
    /// AWGN variance approximation for the velocity estimate, (m/s)^2.
    pub var_approx: f64,
    /// Cramer-Rao bound on the velocity estimate variance, (m/s)^2.
    pub crb: f64,
}

/// Circular matched filter C_u[p] = sum_n r_u[n] s_tx*[n-p].
pub fn range_compress(
    r_u: &ComplexSignal,
    s_tx: &ComplexSignal,
    method: CompressionMethod,
) -> Result<RangeProfile> {
    let n = s_tx.len();
    if r_u.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: r_u.len() });
    }
    let values = match method {
        CompressionMethod::Fft => {
            let rf = dsp::fft(&r_u.samples);
            let sf = dsp::fft(&s_tx.samples);
            let prod: Vec<Complex64> =
                rf.iter().zip(&sf).map(|(a, b)| a * b.conj()).collect();
            dsp::ifft(&prod)
        }
        CompressionMethod::Direct => (0..n)
            .map(|p| {
                (0..n)
                    .map(|i| r_u.samples[i] * s_tx.samples[(i + n - p) % n].conj())
                    .sum()
            })
            .collect(),
    };
    Ok(RangeProfile { values })
}

/// Noncoherent integration: elementwise mean of magnitudes across symbols.
pub fn noncoherent_average(profiles: &[RangeProfile]) -> Result<AveragedProfile> {
    let first = profiles.first().ok_or(Error::EmptyInput)?;
    let n = first.values.len();
    for p in profiles {
        if p.values.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: p.values.len() });
        }
    }
    let mut values = vec![0.0; n];
    for p in profiles {
        for (acc, v) in values.iter_mut().zip(&p.values) {
            *acc += v.norm();
        }
    }
    let u = profiles.len() as f64;
    for v in &mut values {
        *v /= u;
    }
    Ok(AveragedProfile { values })
}

fn local_maxima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let prev = values[(i + n - 1) % n];
            let next = values[(i + 1) % n];
            values[i] > prev && values[i] >= next
        })
        .collect()
}

/// -3 dB mainlobe width (in lags) around the global maximum: the number of
/// contiguous bins whose magnitude stays above peak / sqrt(2).
pub fn mainlobe_width_3db(profile: &AveragedProfile) -> usize {
    let n = profile.values.len();
    let (peak_idx, &peak) = profile
        .values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty profile");
    let level = peak / std::f64::consts::SQRT_2;
    let mut width = 1;
    let mut i = peak_idx;
    loop {
        let next = (i + 1) % n;
        if next == peak_idx || profile.values[next] < level {
            break;
        }
        width += 1;
        i = next;
    }
    let mut i = peak_idx;
    loop {
        let prev = (i + n - 1) % n;
        if prev == peak_idx || profile.values[prev] < level {
            break;
        }
        width += 1;
        i = prev;
    }
    width
}

/// Detect peak lags in the averaged profile.
pub fn detect_peaks(cbar: &AveragedProfile, policy: PeakPolicy) -> Result<Vec<usize>> {
    if cbar.values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut maxima = local_maxima(&cbar.values);
    maxima.sort_by(|&a, &b| cbar.values[b].total_cmp(&cbar.values[a]));
    match policy {
        PeakPolicy::Count { count, guard } => {
            let n = cbar.values.len();
            let mut picked: Vec<usize> = Vec::with_capacity(count);
            for &m in &maxima {
                let clear = picked.iter().all(|&p| {
                    let d = (m as isize - p as isize).unsigned_abs() % n;
                    d.min(n - d) > guard
                });
                if clear {
                    picked.push(m);
                    if picked.len() == count {
                        break;
                    }
                }
            }
            if picked.len() < count {
                return Err(Error::TooFewPeaks { requested: count, found: picked.len() });
            }
            picked.sort_unstable();
            Ok(picked)
        }
        PeakPolicy::Threshold { factor } => {
            let mut sorted = cbar.values.clone();
            sorted.sort_by(f64::total_cmp);
            let median = sorted[sorted.len() / 2];
            let mut picked: Vec<usize> = maxima
                .into_iter()
                .filter(|&m| cbar.values[m] > factor * median)
                .collect();
            picked.sort_unstable();
            Ok(picked)
        }
    }
}

/// Three-point parabolic refinement of a magnitude-profile peak; returns a
/// fractional lag within half a bin of the integer peak.
pub fn refine_peak_lag(values: &[f64], lag: usize) -> f64 {
    let n = values.len();
    let a = values[(lag + n - 1) % n];
    let b = values[lag];
    let c = values[(lag + 1) % n];
    let denom = a - 2.0 * b + c;
    let offset = if denom == 0.0 { 0.0 } else { (0.5 * (a - c) / denom).clamp(-0.5, 0.5) };
    lag as f64 + offset
}

/// R = c tau / (2 F_s).
pub fn lag_to_range(tau_hat: f64, sample_rate: f64) -> f64 {
    SPEED_OF_LIGHT * tau_hat / (2.0 * sample_rate)
}

/// Mean of unwrapped slow-time phase increments over 2 pi T_sym_eff.
pub fn estimate_doppler(slow_time: &[Complex64], t_sym_eff: f64) -> Result<f64> {
    if slow_time.len() < 2 {
        return Err(Error::TooFewSymbols { needed: 2, got: slow_time.len() });
    }
    let diffs: Vec<f64> = slow_time
        .windows(2)
        .map(|w| (w[1] * w[0].conj()).arg())
        .collect();
    let unwrapped = dsp::unwrap(&diffs);
    let mean = unwrapped.iter().sum::<f64>() / unwrapped.len() as f64;
    Ok(mean / (TAU * t_sym_eff))
}

/// v = (lambda / 2) nu.
pub fn doppler_to_velocity(nu_hat: f64, carrier: f64) -> f64 {
    SPEED_OF_LIGHT / carrier / 2.0 * nu_hat
}

/// Slow-time DFT per range bin, magnitudes, zero Doppler centered.
pub fn build_rdm(
    profiles: &[RangeProfile],
    window: DopplerWindow,
    sample_rate: f64,
    t_sym_eff: f64,
    carrier: f64,
) -> Result<RangeDopplerMap> {
    let u = profiles.len();
    if u < 2 {
        return Err(Error::TooFewSymbols { needed: 2, got: u });
    }
    let n = profiles[0].values.len();
    let win: Vec<f64> = match window {
        DopplerWindow::None => vec![1.0; u],
        DopplerWindow::Hann => (0..u)
            .map(|i| 0.5 * (1.0 - (TAU * i as f64 / u as f64).cos()))
            .collect(),
    };
    let lambda = SPEED_OF_LIGHT / carrier;
    let delta_v = lambda / (2.0 * u as f64 * t_sym_eff);
    let half = u / 2;
    let mut grid = vec![vec![0.0; u]; n];
    for (p, row) in grid.iter_mut().enumerate() {
        let slow: Vec<Complex64> = profiles
            .iter()
            .zip(&win)
            .map(|(prof, &w)| prof.values[p] * w)
            .collect();
        let spec = dsp::fft(&slow);
        // fftshift so column 0 is the most negative Doppler
        for (col, v) in row.iter_mut().enumerate() {
            *v = spec[(col + u - half) % u].norm();
        }
    }
    let range_axis = (0..n).map(|p| lag_to_range(p as f64, sample_rate)).collect();
    let velocity_axis =
        (0..u).map(|c| (c as isize - half as isize) as f64 * delta_v).collect();
    Ok(RangeDopplerMap { grid, range_axis, velocity_axis })
}

/// Evaluate all five closed-form sensing limits.
///
/// `baseband_bandwidth` is the measured 99%-energy one-sided bandwidth of
/// the drive (see [`crate::waveform::baseband_bandwidth_99`]).
pub fn sensing_limits(
    cfg: &OfdmConfig,
    p: &FmParams,
    carrier: f64,
    eta: f64,
    baseband_bandwidth: f64,
    n_symbols: usize,
    snr_linear: f64,
) -> SensingLimits {
    let lambda = SPEED_OF_LIGHT / carrier;
    let t = cfg.symbol_duration_eff();
    let u = n_symbols as f64;
    let b_eff = baseband_bandwidth + eta * p.deviation();
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    SensingLimits {
        delta_r: SPEED_OF_LIGHT / (2.0 * b_eff),
        v_max: lambda / (4.0 * t),
        delta_v: lambda / (2.0 * u * t),
        var_approx: lambda * lambda / (8.0 * pi2 * t * t * (u - 1.0) * snr_linear),
        crb: 3.0 * lambda * lambda / (8.0 * pi2 * u * (u * u - 1.0) * t * t * snr_linear),
    }
}

/// Peak power over median off-peak power of the averaged profile.
pub fn post_compression_snr(cbar: &AveragedProfile, peak_lag: usize) -> f64 {
    let mut off: Vec<f64> = cbar
        .values
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != peak_lag)
        .map(|(_, &v)| v * v)
        .collect();
    off.sort_by(f64::total_cmp);
    let median = off[off.len() / 2];
    if median == 0.0 {
        f64::INFINITY
    } else {
        cbar.values[peak_lag] * cbar.values[peak_lag] / median
    }
}

/// Full processing chain: range compression per symbol, noncoherent
/// averaging, peak detection, then per-peak slow-time Doppler estimation.
///
/// Ranges are read off the integer lag grid by default, so RMSE floors
/// include grid quantization; pass `refine = true` for three-point
/// parabolic sub-bin interpolation.
pub fn process(
    received: &[ComplexSignal],
    references: &[ComplexSignal],
    policy: PeakPolicy,
    sample_rate: f64,
    t_sym_eff: f64,
    carrier: f64,
    refine: bool,
) -> Result<Vec<SensingEstimate>> {
    if received.len() != references.len() {
        return Err(Error::LengthMismatch { expected: references.len(), got: received.len() });
    }
    let profiles: Vec<RangeProfile> = received
        .iter()
        .zip(references)
        .map(|(r, s)| range_compress(r, s, CompressionMethod::Fft))
        .collect::<Result<_>>()?;
    let cbar = noncoherent_average(&profiles)?;
    let lags = detect_peaks(&cbar, policy)?;
    lags.into_iter()
        .map(|lag| {
            let slow: Vec<Complex64> = profiles.iter().map(|p| p.values[lag]).collect();
            let doppler = estimate_doppler(&slow, t_sym_eff)?;
            let lag_est = if refine { refine_peak_lag(&cbar.values, lag) } else { lag as f64 };
            Ok(SensingEstimate {
                peak_lag: lag,
                range: lag_to_range(lag_est, sample_rate),
                doppler,
                velocity: doppler_to_velocity(doppler, carrier),
                post_compression_snr: post_compression_snr(&cbar, lag),
            })
        })
        .collect()
}
