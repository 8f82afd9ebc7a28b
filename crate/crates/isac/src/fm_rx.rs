//! Limiter-discriminator FM-OFDM communication receiver, the effective
//! subcarrier-domain channel (diagonal + ICI), the phasor-sum beta-weight
//! model, and the CE-OFDM / CP-OFDM baseline demodulators.

use crate::channel::ChannelPath;
use crate::dsp;
use crate::waveform::{
    self, ComplexSignal, CpMode, FmParams, OfdmConfig,
};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Instantaneous-frequency estimate sequence out of the discriminator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorOutput {
    /// y[n] in Hz times K_V.
    pub values: Vec<f64>,
    pub sample_interval: f64,
}

/// Amplitude-limited signal plus a diagnostic count of exactly-zero input
/// samples that were replaced by a phase hold.
#[derive(Debug, Clone, PartialEq)]
pub struct LimiterOutput {
    pub signal: ComplexSignal,
    pub zero_samples: usize,
}

/// Effective subcarrier-domain channel, split into its diagonal and ICI
/// parts. full[k][r] = diag[k] delta[k-r] + ici[k][r].
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub diag: Vec<Complex64>,
    pub ici: Vec<Vec<Complex64>>,
    /// Reference delay ell_0 the receiver aligns to.
    pub ref_delay: usize,
}

impl EffectiveChannel {
    /// Frobenius norm of the ICI part.
    pub fn ici_frobenius(&self) -> f64 {
        self.ici
            .iter()
            .flat_map(|row| row.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Convex per-path weights from the phasor-sum instantaneous-frequency
/// identity, with their block means.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaWeights {
    /// per_path[p][n] = beta_p[n].
    pub per_path: Vec<Vec<f64>>,
    /// Block mean of each path's weight sequence.
    pub means: Vec<f64>,
    /// Samples where the phasor sum cancelled (S[n] = 0) and the weights are
    /// undefined.
    pub undefined: Vec<bool>,
}

impl BetaWeights {
    /// Blockwise-constant weights (delta beta = 0).
    pub fn constant(means: Vec<f64>, block_len: usize) -> Self {
        let per_path = means.iter().map(|&b| vec![b; block_len]).collect();
        let undefined = vec![false; block_len];
        Self { per_path, means, undefined }
    }

    /// The constant proxy beta_p proportional to |a_p|.
    pub fn proxy(paths: &[ChannelPath], block_len: usize) -> Self {
        let mags: Vec<f64> = paths.iter().map(|p| p.gain.norm()).collect();
        let total: f64 = mags.iter().sum();
        let means = if total > 0.0 {
            mags.iter().map(|m| m / total).collect()
        } else {
            vec![1.0 / paths.len() as f64; paths.len()]
        };
        Self::constant(means, block_len)
    }
}

/// Hard limiter z[n] = r[n]/|r[n]|. Exactly-zero samples hold the previous
/// unit phasor and are counted.
pub fn limiter(r: &ComplexSignal) -> LimiterOutput {
    let mut zero_samples = 0;
    let mut prev = Complex64::new(1.0, 0.0);
    let samples = r
        .samples
        .iter()
        .map(|&v| {
            let mag = v.norm();
            if mag == 0.0 {
                zero_samples += 1;
                prev
            } else {
                prev = v / mag;
                prev
            }
        })
        .collect();
    LimiterOutput {
        signal: ComplexSignal { samples, sample_interval: r.sample_interval },
        zero_samples,
    }
}

/// One-sample phase-difference discriminator,
/// y[n] = K_V angle(z[n] z*[n-1]) / (2 pi T_s). The undefined boundary
/// sample is replicated: y[0] = y[1].
pub fn discriminate(z: &ComplexSignal, k_v: f64) -> DiscriminatorOutput {
    let ts = z.sample_interval;
    let gain = k_v / (TAU * ts);
    let mut values = vec![0.0; z.len()];
    for n in 1..z.len() {
        values[n] = gain * (z.samples[n] * z.samples[n - 1].conj()).arg();
    }
    if z.len() > 1 {
        values[0] = values[1];
    }
    DiscriminatorOutput { values, sample_interval: ts }
}

/// Extract the N-sample useful block (the last `n_fft` samples, i.e. past
/// the cyclic prefix), circularly align it to the reference delay, and
/// remove the block mean. The output mean is zero to machine precision.
pub fn demean_align(
    y: &DiscriminatorOutput,
    ref_delay: usize,
    n_fft: usize,
) -> Result<Vec<f64>> {
    if y.values.len() < n_fft {
        return Err(Error::LengthMismatch { expected: n_fft, got: y.values.len() });
    }
    let window = &y.values[y.values.len() - n_fft..];
    let shift = ref_delay % n_fft;
    let mut out: Vec<f64> = (0..n_fft).map(|i| window[(i + shift) % n_fft]).collect();
    let mean = out.iter().sum::<f64>() / n_fft as f64;
    for v in &mut out {
        *v -= mean;
    }
    Ok(out)
}

/// N-point DFT of the de-meaned sequence, Y[k] = sum_n ybar[n] e^{-j2pi kn/N}.
pub fn block_dft(ybar: &[f64]) -> Vec<Complex64> {
    dsp::fft(&ybar.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>())
}

/// Build the effective channel from path geometry and beta weights:
///
/// diag[k] = K_V m f_delta sum_p mean(beta_p) e^{-j2pi k (ell_p - ell_0)/N}
/// ici[k][r] = K_V m f_delta sum_p kernel_p[k-r] e^{-j2pi r (ell_p - ell_0)/N},
/// kernel_p[d] = (1/N) sum_n dbeta_p[n] e^{-j2pi d n/N}.
pub fn effective_channel(
    paths: &[ChannelPath],
    betas: &BetaWeights,
    p: &FmParams,
    cfg: &OfdmConfig,
    ref_delay: usize,
) -> Result<EffectiveChannel> {
    let n = cfg.n_fft;
    let residual = (betas.means.iter().sum::<f64>() - 1.0).abs();
    if residual > 1e-6 {
        return Err(Error::WeightNormalization { residual });
    }
    let g = p.discriminator_gain * p.deviation();
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    for (path, &mean) in paths.iter().zip(&betas.means) {
        let dl = path.delay as f64 - ref_delay as f64;
        for (k, d) in diag.iter_mut().enumerate() {
            *d += g * mean * Complex64::from_polar(1.0, -TAU * k as f64 * dl / n as f64);
        }
    }
    // per-path ICI kernel over the difference index d = (k - r) mod N
    let mut kernels: Vec<Vec<Complex64>> = Vec::with_capacity(paths.len());
    for (pi, seq) in betas.per_path.iter().enumerate() {
        let delta: Vec<Complex64> = seq
            .iter()
            .map(|&b| Complex64::new(b - betas.means[pi], 0.0))
            .collect();
        let mut k = dsp::fft(&delta);
        for v in &mut k {
            *v /= n as f64;
        }
        kernels.push(k);
    }
    let mut ici = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (path, kernel) in paths.iter().zip(&kernels) {
        if kernel.iter().all(|v| v.norm_sqr() == 0.0) {
            continue;
        }
        let dl = path.delay as f64 - ref_delay as f64;
        for k in 0..n {
            for r in 0..n {
                if k == r {
                    continue;
                }
                let d = (k + n - r) % n;
                ici[k][r] += g
                    * kernel[d]
                    * Complex64::from_polar(1.0, -TAU * r as f64 * dl / n as f64);
            }
        }
    }
    Ok(EffectiveChannel { diag, ici, ref_delay })
}

/// One-tap equalization and hard detection on the active tones.
///
/// `scale` is the genie variance-normalization gain applied at the
/// transmitter (see [`waveform::RealBaseband::scale`]); the ICI part of the
/// channel is treated as interference, not cancelled.
pub fn equalize_detect(
    y_dft: &[Complex64],
    h: &EffectiveChannel,
    cfg: &OfdmConfig,
    scale: f64,
) -> Result<Vec<bool>> {
    if y_dft.len() != cfg.n_fft {
        return Err(Error::LengthMismatch { expected: cfg.n_fft, got: y_dft.len() });
    }
    let mut equalized = vec![Complex64::new(0.0, 0.0); cfg.n_fft];
    for &q in &cfg.active_band {
        let gain = h.diag[q];
        if gain.norm() < 1e-300 {
            return Err(Error::ZeroGain { tone: q });
        }
        equalized[q] = y_dft[q] / gain / scale;
    }
    waveform::demap_subcarriers(&equalized, cfg)
}

/// Beta weights from per-path phase sequences theta_p[n]:
/// beta_p[n] = S_p[n] / S[n] with S_p = sum_q cos(theta_p - theta_q).
pub fn beta_weights(phasor_phases: &[Vec<f64>]) -> Result<BetaWeights> {
    let n_paths = phasor_phases.len();
    if n_paths == 0 {
        return Err(Error::EmptyInput);
    }
    let len = phasor_phases[0].len();
    for seq in phasor_phases {
        if seq.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: seq.len() });
        }
    }
    let mut per_path = vec![vec![0.0; len]; n_paths];
    let mut undefined = vec![false; len];
    for sample in 0..len {
        let mut s_p = vec![0.0; n_paths];
        for p in 0..n_paths {
            for q in 0..n_paths {
                s_p[p] += (phasor_phases[p][sample] - phasor_phases[q][sample]).cos();
            }
        }
        let s: f64 = s_p.iter().sum();
        if s == 0.0 {
            undefined[sample] = true;
            continue;
        }
        for p in 0..n_paths {
            per_path[p][sample] = s_p[p] / s;
        }
    }
    let means = per_path
        .iter()
        .map(|seq| {
            let valid: Vec<f64> = seq
                .iter()
                .zip(&undefined)
                .filter(|(_, &u)| !u)
                .map(|(&v, _)| v)
                .collect();
            if valid.is_empty() {
                0.0
            } else {
                valid.iter().sum::<f64>() / valid.len() as f64
            }
        })
        .collect();
    Ok(BetaWeights { per_path, means, undefined })
}

/// Per-path post-limiter phases for the analysis ("genie") beta mode:
/// theta_p[n] = arg a_p + 2 pi nu_p n T_s + phi_tx[(n - ell_p) mod N].
pub fn genie_path_phases(
    paths: &[ChannelPath],
    tx_phase: &[f64],
    sample_interval: f64,
) -> Vec<Vec<f64>> {
    let n = tx_phase.len();
    paths
        .iter()
        .map(|p| {
            (0..n)
                .map(|i| {
                    p.gain.arg()
                        + TAU * p.doppler * i as f64 * sample_interval
                        + tx_phase[(i + n - p.delay) % n]
                })
                .collect()
        })
        .collect()
}

/// Strongest-path index, the default reference delay ell_0.
pub fn dominant_delay(paths: &[ChannelPath]) -> usize {
    paths
        .iter()
        .max_by(|a, b| a.gain.norm().total_cmp(&b.gain.norm()))
        .map(|p| p.delay)
        .unwrap_or(0)
}

/// Full FM-OFDM receiver: limiter, discriminator, de-meaning alignment,
/// block DFT, one-tap equalization, hard detection.
pub fn fm_ofdm_demodulate(
    r: &ComplexSignal,
    h: &EffectiveChannel,
    cfg: &OfdmConfig,
    p: &FmParams,
    scale: f64,
) -> Result<Vec<bool>> {
    let limited = limiter(r);
    let y = discriminate(&limited.signal, p.discriminator_gain);
    let ybar = demean_align(&y, h.ref_delay, cfg.n_fft)?;
    equalize_detect(&block_dft(&ybar), h, cfg, scale)
}

/// CE-OFDM baseline receiver: arctangent demodulation with standard phase
/// unwrapping, then FFT detection. The unwrap ambiguity is a constant phase
/// offset, which only lands on the (unused) DC tone after de-meaning.
pub fn ce_ofdm_demodulate(
    r: &ComplexSignal,
    p: &FmParams,
    cfg: &OfdmConfig,
    scale: f64,
) -> Result<Vec<bool>> {
    if r.len() != cfg.n_fft {
        return Err(Error::LengthMismatch { expected: cfg.n_fft, got: r.len() });
    }
    let phases: Vec<f64> = r.samples.iter().map(|v| v.arg()).collect();
    let unwrapped = dsp::unwrap(&phases);
    let mean = unwrapped.iter().sum::<f64>() / unwrapped.len() as f64;
    let x_hat: Vec<f64> = unwrapped.iter().map(|&v| (v - mean) / (TAU * p.mod_index)).collect();
    let spectrum = block_dft(&x_hat);
    let mut equalized = vec![Complex64::new(0.0, 0.0); cfg.n_fft];
    for &q in &cfg.active_band {
        equalized[q] = spectrum[q] / scale;
    }
    waveform::demap_subcarriers(&equalized, cfg)
}

/// CP-OFDM baseline receiver with genie one-tap CSI.
pub fn cp_ofdm_demodulate(
    r: &ComplexSignal,
    channel_freq_response: &[Complex64],
    cfg: &OfdmConfig,
) -> Result<Vec<bool>> {
    if r.len() != cfg.n_fft + cfg.n_cp {
        return Err(Error::LengthMismatch { expected: cfg.n_fft + cfg.n_cp, got: r.len() });
    }
    if channel_freq_response.len() != cfg.n_fft {
        return Err(Error::LengthMismatch {
            expected: cfg.n_fft,
            got: channel_freq_response.len(),
        });
    }
    let body = waveform::cyclic_prefix(r, cfg.n_cp, CpMode::Remove)?;
    let spectrum = dsp::fft(&body.samples);
    let mut equalized = vec![Complex64::new(0.0, 0.0); cfg.n_fft];
    for &q in &cfg.active_band {
        let h = channel_freq_response[q];
        if h.norm() < 1e-300 {
            return Err(Error::ZeroGain { tone: q });
        }
        equalized[q] = spectrum[q] / h;
    }
    waveform::demap_subcarriers(&equalized, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{self, DelayMode};
    use crate::waveform::{fm_modulate, map_subcarriers, ofdm_real_baseband};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_bits(n: usize, rng: &mut impl Rng) -> Vec<bool> {
        (0..n).map(|_| rng.gen()).collect()
    }

    #[test]
    fn limiter_normalizes_and_counts_zeros() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut samples: Vec<Complex64> = (0..64)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        samples[10] = Complex64::new(0.0, 0.0);
        let sig = ComplexSignal::new(samples, 1.0).unwrap();
        let out = limiter(&sig);
        assert_eq!(out.zero_samples, 1);
        for (i, s) in out.signal.samples.iter().enumerate() {
            assert!((s.norm() - 1.0).abs() < 1e-12);
            if i == 10 {
                assert_eq!(*s, out.signal.samples[9]); // phase hold
            }
        }
        // scaling is transparent
        let scaled = ComplexSignal::new(
            sig.samples.iter().map(|v| v * 5.0).collect(),
            1.0,
        )
        .unwrap();
        let a = limiter(&sig);
        let b = limiter(&scaled);
        for (x, y) in a.signal.samples.iter().zip(&b.signal.samples) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn discriminator_reads_pure_tone_frequency() {
        let ts = 1e-6;
        let f0 = 2.0e5;
        let sig = ComplexSignal::new(
            (0..128)
                .map(|n| Complex64::from_polar(1.0, TAU * f0 * n as f64 * ts))
                .collect(),
            ts,
        )
        .unwrap();
        let y = discriminate(&sig, 2.0);
        for &v in &y.values {
            assert!((v - 2.0 * f0).abs() < 1e-6);
        }
        let flat = ComplexSignal::new(vec![Complex64::new(1.0, 0.0); 32], ts).unwrap();
        assert!(discriminate(&flat, 1.0).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn discriminator_round_trip_recovers_drive() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4).unwrap();
        let p = FmParams::new(0.6 / TAU, cfg.sample_rate).unwrap();
        let bits = random_bits(cfg.bits_per_block(), &mut rng);
        let bb = ofdm_real_baseband(&map_subcarriers(&bits, &cfg).unwrap()).unwrap();
        let tx = fm_modulate(&bb.samples, &p, cfg.sample_interval()).unwrap();
        let y = discriminate(&limiter(&tx).signal, p.discriminator_gain);
        for n in 1..tx.len() {
            let expect = p.discriminator_gain * p.deviation() * bb.samples[n];
            assert!((y.values[n] - expect).abs() < 1e-9 * p.deviation().abs().max(1.0));
        }
    }

    #[test]
    fn demean_kills_constants_and_is_zero_mean() {
        let vals: Vec<f64> = (0..64).map(|n| (n as f64 * 0.3).sin()).collect();
        let shifted: Vec<f64> = vals.iter().map(|v| v + 7.5).collect();
        let a = demean_align(
            &DiscriminatorOutput { values: vals, sample_interval: 1.0 },
            0,
            64,
        )
        .unwrap();
        let b = demean_align(
            &DiscriminatorOutput { values: shifted, sample_interval: 1.0 },
            0,
            64,
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(a.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn demean_align_insufficient_samples() {
        let y = DiscriminatorOutput { values: vec![0.0; 10], sample_interval: 1.0 };
        assert!(matches!(demean_align(&y, 0, 16), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn block_dft_matches_direct_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x: Vec<f64> = (0..128).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let spec = block_dft(&x);
        for k in (0..128).step_by(13) {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &v) in x.iter().enumerate() {
                acc += v * Complex64::from_polar(1.0, -TAU * k as f64 * n as f64 / 128.0);
            }
            assert!((spec[k] - acc).norm() < 1e-9);
        }
        // cosine line
        let cosine: Vec<f64> = (0..64).map(|n| (TAU * n as f64 / 64.0).cos()).collect();
        let s = block_dft(&cosine);
        assert!((s[1] - Complex64::new(32.0, 0.0)).norm() < 1e-9);
        assert!((s[63] - Complex64::new(32.0, 0.0)).norm() < 1e-9);
        assert!(s[2].norm() < 1e-9);
    }

    #[test]
    fn flat_gain_reduction_single_path() {
        let cfg = OfdmConfig::with_cutoff(64, 8, 1.0e6, 16, 4).unwrap();
        let p = FmParams::new(0.6 / TAU, cfg.sample_rate).unwrap();
        let paths = [ChannelPath { gain: Complex64::new(0.7, -0.2), doppler: 0.0, delay: 3 }];
        let betas = BetaWeights::constant(vec![1.0], cfg.n_fft);
        let h = effective_channel(&paths, &betas, &p, &cfg, 3).unwrap();
        let flat = p.discriminator_gain * p.deviation();
        for k in 0..cfg.n_fft {
            assert!((h.diag[k] - Complex64::new(flat, 0.0)).norm() < 1e-12);
            for r in 0..cfg.n_fft {
                assert!(h.ici[k][r].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn static_multipath_constant_beta_has_zero_ici() {
        let cfg = OfdmConfig::with_cutoff(64, 8, 1.0e6, 16, 4).unwrap();
        let p = FmParams::new(0.6 / TAU, cfg.sample_rate).unwrap();
        let paths = [
            ChannelPath { gain: Complex64::new(0.8, 0.0), doppler: 0.0, delay: 0 },
            ChannelPath { gain: Complex64::new(0.4, 0.3), doppler: 0.0, delay: 4 },
        ];
        let betas = BetaWeights::constant(vec![0.6, 0.4], cfg.n_fft);
        let h = effective_channel(&paths, &betas, &p, &cfg, 0).unwrap();
        assert!(h.ici_frobenius() < 1e-12);
        // |diag| periodic with period N / gcd(N, dl) = 16
        let g = p.discriminator_gain * p.deviation();
        for k in 0..cfg.n_fft - 16 {
            assert!((h.diag[k].norm() - h.diag[k + 16].norm()).abs() < 1e-12 * g);
        }
    }

    #[test]
    fn cosine_weight_perturbation_matches_closed_form() {
        let n = 64;
        let cfg = OfdmConfig::with_cutoff(n, 8, 1.0e6, 16, 4).unwrap();
        let p = FmParams::new(0.6 / TAU, cfg.sample_rate).unwrap();
        let paths = [
            ChannelPath { gain: Complex64::new(0.8, 0.0), doppler: 0.0, delay: 0 },
            ChannelPath { gain: Complex64::new(0.5, 0.0), doppler: 0.0, delay: 5 },
        ];
        let eps = 0.05;
        let (b0, b1) = (0.65, 0.35);
        let seq0: Vec<f64> =
            (0..n).map(|i| b0 + eps * (TAU * i as f64 / n as f64).cos()).collect();
        let seq1: Vec<f64> =
            (0..n).map(|i| b1 - eps * (TAU * i as f64 / n as f64).cos()).collect();
        let betas = BetaWeights {
            per_path: vec![seq0, seq1],
            means: vec![b0, b1],
            undefined: vec![false; n],
        };
        let h = effective_channel(&paths, &betas, &p, &cfg, 0).unwrap();
        let g = p.discriminator_gain * p.deviation();
        for k in 0..n {
            for r in 0..n {
                if k == r {
                    continue;
                }
                let d = (k + n - r) % n;
                let expect = if d == 1 || d == n - 1 {
                    // kernel eps/2 on path 0, -eps/2 on path 1 (delay 5)
                    g * (eps / 2.0)
                        * (Complex64::new(1.0, 0.0)
                            - Complex64::from_polar(1.0, -TAU * r as f64 * 5.0 / n as f64))
                } else {
                    Complex64::new(0.0, 0.0)
                };
                assert!(
                    (h.ici[k][r] - expect).norm() < 1e-9,
                    "k={k} r={r} got {} expect {}",
                    h.ici[k][r],
                    expect
                );
            }
        }
    }

    #[test]
    fn weight_normalization_violation_rejected() {
        let cfg = OfdmConfig::with_cutoff(16, 4, 1.0e6, 4, 4).unwrap();
        let p = FmParams::new(0.1, 1.0e6).unwrap();
        let paths = [ChannelPath { gain: Complex64::new(1.0, 0.0), doppler: 0.0, delay: 0 }];
        let betas = BetaWeights::constant(vec![0.7], cfg.n_fft);
        assert!(matches!(
            effective_channel(&paths, &betas, &p, &cfg, 0),
            Err(Error::WeightNormalization { .. })
        ));
    }

    #[test]
    fn equalize_detect_inverts_known_gains() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let cfg = OfdmConfig::with_cutoff(64, 8, 1.0e6, 16, 4).unwrap();
        let bits = random_bits(cfg.bits_per_block(), &mut rng);
        let frame = map_subcarriers(&bits, &cfg).unwrap();
        let diag: Vec<Complex64> = (0..cfg.n_fft)
            .map(|k| Complex64::from_polar(1.0 + 0.1 * k as f64, 0.02 * k as f64))
            .collect();
        let y: Vec<Complex64> =
            frame.values.iter().zip(&diag).map(|(x, h)| x * h).collect();
        let h = EffectiveChannel {
            diag,
            ici: vec![vec![Complex64::new(0.0, 0.0); cfg.n_fft]; cfg.n_fft],
            ref_delay: 0,
        };
        assert_eq!(equalize_detect(&y, &h, &cfg, 1.0).unwrap(), bits);
    }

    #[test]
    fn beta_weights_degenerate_cases() {
        let w = beta_weights(&[vec![0.3; 16]]).unwrap();
        assert!(w.per_path[0].iter().all(|&b| (b - 1.0).abs() < 1e-15));
        let w2 = beta_weights(&[vec![0.5; 8], vec![0.5; 8]]).unwrap();
        for p in 0..2 {
            assert!(w2.per_path[p].iter().all(|&b| (b - 0.5).abs() < 1e-12));
        }
        // destructive cancellation: opposite phasors
        let w3 = beta_weights(&[vec![0.0; 4], vec![std::f64::consts::PI; 4]]).unwrap();
        assert!(w3.undefined.iter().all(|&u| u));
    }

    #[test]
    fn beta_weights_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let phases: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..128).map(|_| rng.gen_range(-0.7..0.7)).collect())
            .collect();
        let w = beta_weights(&phases).unwrap();
        for sample in 0..128 {
            let s: f64 = (0..3).map(|p| w.per_path[p][sample]).sum();
            assert!((s - 1.0).abs() < 1e-9);
            // pairwise phase spread within pi/2 -> nonnegative weights
            for p in 0..3 {
                assert!(w.per_path[p][sample] >= 0.0);
            }
        }
    }

    #[test]
    fn noiseless_single_path_chain_has_zero_ber() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let cfg = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4).unwrap();
        let p = FmParams::new(0.6 / TAU, cfg.sample_rate).unwrap();
        for trial in 0..20 {
            let bits = random_bits(cfg.bits_per_block(), &mut rng);
            let bb = ofdm_real_baseband(&map_subcarriers(&bits, &cfg).unwrap()).unwrap();
            let tx = fm_modulate(&bb.samples, &p, cfg.sample_interval()).unwrap();
            let tx_cp = waveform::cyclic_prefix(&tx, cfg.n_cp, CpMode::Add).unwrap();
            let delay = trial % cfg.n_cp;
            let paths = [ChannelPath {
                gain: Complex64::from_polar(0.9, 1.1),
                doppler: 0.0,
                delay,
            }];
            let rx = channel::apply_multipath(&tx_cp, &paths, DelayMode::Linear).unwrap();
            let betas = BetaWeights::constant(vec![1.0], cfg.n_fft);
            let h = effective_channel(&paths, &betas, &p, &cfg, delay).unwrap();
            let detected = fm_ofdm_demodulate(&rx, &h, &cfg, &p, bb.scale).unwrap();
            assert_eq!(detected, bits, "delay {delay}");
        }
    }

    #[test]
    fn ce_noiseless_identity_channel_zero_ber() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let cfg = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4).unwrap();
        let p = FmParams::new(0.6 / TAU, cfg.sample_rate).unwrap();
        let bits = random_bits(cfg.bits_per_block(), &mut rng);
        let bb = ofdm_real_baseband(&map_subcarriers(&bits, &cfg).unwrap()).unwrap();
        let tx = waveform::ce_ofdm_modulate(&bb.samples, &p, cfg.sample_interval()).unwrap();
        assert_eq!(ce_ofdm_demodulate(&tx, &p, &cfg, bb.scale).unwrap(), bits);
    }

    #[test]
    fn ce_pi_phase_jump_causes_symbol_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let cfg = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4).unwrap();
        let p = FmParams::new(0.6 / TAU, cfg.sample_rate).unwrap();
        let bits = random_bits(cfg.bits_per_block(), &mut rng);
        let bb = ofdm_real_baseband(&map_subcarriers(&bits, &cfg).unwrap()).unwrap();
        let tx = waveform::ce_ofdm_modulate(&bb.samples, &p, cfg.sample_interval()).unwrap();
        let mut corrupted = tx.samples.clone();
        for s in corrupted.iter_mut().skip(256) {
            *s = -*s; // exact pi jump mid-block
        }
        let rx = ComplexSignal::new(corrupted, tx.sample_interval).unwrap();
        let detected = ce_ofdm_demodulate(&rx, &p, &cfg, bb.scale).unwrap();
        assert_ne!(detected, bits);
    }

    #[test]
    fn cp_ofdm_noiseless_two_tap_zero_ber() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let cfg = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4).unwrap();
        let bits = random_bits(cfg.bits_per_block(), &mut rng);
        let frame = map_subcarriers(&bits, &cfg).unwrap();
        let tx = waveform::cp_ofdm_modulate(&frame).unwrap();
        // identity channel
        let h0: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); cfg.n_fft];
        assert_eq!(cp_ofdm_demodulate(&tx, &h0, &cfg).unwrap(), bits);
        // static 2-tap channel, genie response
        let paths = [
            ChannelPath { gain: Complex64::new(1.0, 0.0), doppler: 0.0, delay: 0 },
            ChannelPath { gain: Complex64::new(0.4, 0.4), doppler: 0.0, delay: 9 },
        ];
        let rx = channel::apply_multipath(&tx, &paths, DelayMode::Linear).unwrap();
        let h = channel::freq_response(&paths, cfg.n_fft, cfg.sample_interval());
        assert_eq!(cp_ofdm_demodulate(&rx, &h, &cfg).unwrap(), bits);
    }

    #[test]
    fn dominant_delay_picks_strongest_path() {
        let paths = [
            ChannelPath { gain: Complex64::new(0.2, 0.0), doppler: 0.0, delay: 1 },
            ChannelPath { gain: Complex64::new(0.0, -0.9), doppler: 0.0, delay: 6 },
            ChannelPath { gain: Complex64::new(0.5, 0.0), doppler: 0.0, delay: 3 },
        ];
        assert_eq!(dominant_delay(&paths), 6);
    }
}
