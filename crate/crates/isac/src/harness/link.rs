//! One communication Monte Carlo trial: draw a channel realization, push a
//! block of each requested waveform through it with genie CSI, count bit
//! errors.

use super::config::{ExperimentConfig, Scenario, WaveformKind};
use crate::channel::{
    self, ChannelPath, DelayMode, DopplerConvention, FadingProfile, NoiseSpec,
};
use crate::fm_rx::{
    self, BetaWeights, DiscriminatorOutput, EffectiveChannel,
};
use crate::metrics::TrialRecord;
use crate::waveform::{
    self, ComplexSignal, CpMode, FmParams, OfdmConfig, RealBaseband,
};
use crate::{dsp, Error, Result};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

/// Bounded deterministic redraw budget for blocks violating the aliasing
/// margin.
const MAX_REDRAWS: usize = 10_000;

/// Draw a data block whose FM drive respects the aliasing bound; the redraw
/// loop is deterministic under the rng state.
pub(crate) fn draw_fm_block(
    cfg: &OfdmConfig,
    p: &FmParams,
    rng: &mut impl Rng,
) -> Result<(Vec<bool>, RealBaseband, ComplexSignal)> {
    for _ in 0..MAX_REDRAWS {
        let bits: Vec<bool> = (0..cfg.bits_per_block()).map(|_| rng.gen()).collect();
        let bb = waveform::ofdm_real_baseband(&waveform::map_subcarriers(&bits, cfg)?)?;
        match waveform::fm_modulate(&bb.samples, p, cfg.sample_interval()) {
            Ok(tx) => return Ok((bits, bb, tx)),
            Err(Error::Aliasing { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Config(format!(
        "aliasing bound violated by {MAX_REDRAWS} consecutive blocks; lower the modulation index"
    )))
}

/// Channel realization for the given BER scenario.
fn draw_paths(cfg: &ExperimentConfig, rng: &mut impl Rng) -> Vec<ChannelPath> {
    let profile = match cfg.scenario {
        Scenario::BerDoublyDispersive => FadingProfile::FiveTap,
        _ => FadingProfile::Flat,
    };
    let speed = match cfg.scenario {
        Scenario::BerFlat => 0.0,
        _ => cfg.speed,
    };
    channel::sample_rayleigh_paths(profile, speed, cfg.carrier, DopplerConvention::OneWay, rng)
}

/// Diagonal-only effective channel for the genie FM receiver; the ICI part
/// is interference by design and never equalized, so it is left empty.
fn diag_channel(
    paths: &[ChannelPath],
    means: &[f64],
    gain: f64,
    n_fft: usize,
    ref_delay: usize,
) -> EffectiveChannel {
    let diag = (0..n_fft)
        .map(|k| {
            paths
                .iter()
                .zip(means)
                .map(|(path, &b)| {
                    let dl = path.delay as f64 - ref_delay as f64;
                    gain * b * Complex64::from_polar(1.0, -TAU * k as f64 * dl / n_fft as f64)
                })
                .sum()
        })
        .collect();
    EffectiveChannel { diag, ici: Vec::new(), ref_delay }
}

/// Genie beta weights for a realized channel, from the per-path post-limiter
/// phase model evaluated on the actual transmitted block.
fn genie_betas(
    paths: &[ChannelPath],
    tx_block: &ComplexSignal,
) -> Result<BetaWeights> {
    if paths.len() == 1 {
        return Ok(BetaWeights::constant(vec![1.0], tx_block.len()));
    }
    let tx_phase: Vec<f64> = tx_block.samples.iter().map(|v| v.arg()).collect();
    fm_rx::beta_weights(&fm_rx::genie_path_phases(paths, &tx_phase, tx_block.sample_interval))
}

/// CE-OFDM receiver with genie one-tap equalization over the beta-weight
/// delay profile (arctangent demodulation, de-meaning, FFT).
fn ce_demodulate_multipath(
    rx: &ComplexSignal,
    paths: &[ChannelPath],
    means: &[f64],
    ref_delay: usize,
    p: &FmParams,
    cfg: &OfdmConfig,
    scale: f64,
) -> Result<Vec<bool>> {
    let phases: Vec<f64> = rx.samples.iter().map(|v| v.arg()).collect();
    let y = DiscriminatorOutput {
        values: dsp::unwrap(&phases),
        sample_interval: rx.sample_interval,
    };
    let ybar = fm_rx::demean_align(&y, ref_delay, cfg.n_fft)?;
    let x_hat: Vec<f64> = ybar.iter().map(|&v| v / (TAU * p.mod_index)).collect();
    let spectrum = fm_rx::block_dft(&x_hat);
    let h = diag_channel(paths, means, 1.0, cfg.n_fft, ref_delay);
    let mut equalized = vec![Complex64::new(0.0, 0.0); cfg.n_fft];
    for &q in &cfg.active_band {
        equalized[q] = spectrum[q] / h.diag[q] / scale;
    }
    waveform::demap_subcarriers(&equalized, cfg)
}

fn count_errors(sent: &[bool], detected: &[bool]) -> u64 {
    sent.iter().zip(detected).filter(|(a, b)| a != b).count() as u64
}

/// One BER trial for one waveform. The rng draws (channel, bits, noise
/// seed) depend only on the trial seed, so all waveforms see the same
/// channel realization and noise sequence for a fair comparison.
pub(crate) fn link_trial(
    cfg: &ExperimentConfig,
    ofdm: &OfdmConfig,
    waveform: WaveformKind,
    snr_db: f64,
    seed: u64,
) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let paths = draw_paths(cfg, &mut rng);
    let noise_seed: u64 = rng.gen();
    let noise = NoiseSpec { snr_db, rng_seed: noise_seed };
    let p = cfg.fm(cfg.mod_indices[0])?;
    let ref_delay = fm_rx::dominant_delay(&paths);
    let ts = ofdm.sample_interval();

    let (bits, detected) = match waveform {
        WaveformKind::FmOfdm => {
            let (bits, bb, tx) = draw_fm_block(ofdm, &p, &mut rng)?;
            let tx_cp = waveform::cyclic_prefix(&tx, ofdm.n_cp, CpMode::Add)?;
            let ref_power = tx_cp.power();
            let rx = channel::apply_multipath(&tx_cp, &paths, DelayMode::Linear)?;
            let rx = channel::add_awgn_with_reference(&rx, ref_power, &noise)?;
            let betas = genie_betas(&paths, &tx)?;
            let gain = p.discriminator_gain * p.deviation();
            let h = diag_channel(&paths, &betas.means, gain, ofdm.n_fft, ref_delay);
            let detected = fm_rx::fm_ofdm_demodulate(&rx, &h, ofdm, &p, bb.scale)?;
            (bits, detected)
        }
        WaveformKind::CeOfdm => {
            let bits: Vec<bool> = (0..ofdm.bits_per_block()).map(|_| rng.gen()).collect();
            let bb = waveform::ofdm_real_baseband(&waveform::map_subcarriers(&bits, ofdm)?)?;
            let tx = waveform::ce_ofdm_modulate(&bb.samples, &p, ts)?;
            let tx_cp = waveform::cyclic_prefix(&tx, ofdm.n_cp, CpMode::Add)?;
            let ref_power = tx_cp.power();
            let rx = channel::apply_multipath(&tx_cp, &paths, DelayMode::Linear)?;
            let rx = channel::add_awgn_with_reference(&rx, ref_power, &noise)?;
            let betas = genie_betas(&paths, &tx)?;
            let detected = ce_demodulate_multipath(
                &rx,
                &paths,
                &betas.means,
                ref_delay,
                &p,
                ofdm,
                bb.scale,
            )?;
            (bits, detected)
        }
        WaveformKind::CpOfdm => {
            let bits: Vec<bool> = (0..ofdm.bits_per_block()).map(|_| rng.gen()).collect();
            let frame = waveform::map_subcarriers(&bits, ofdm)?;
            let tx = waveform::cp_ofdm_modulate(&frame)?;
            let ref_power = tx.power();
            let rx = channel::apply_multipath(&tx, &paths, DelayMode::Linear)?;
            let rx = channel::add_awgn_with_reference(&rx, ref_power, &noise)?;
            let h = channel::freq_response(&paths, ofdm.n_fft, ts);
            let detected = fm_rx::cp_ofdm_demodulate(&rx, &h, ofdm)?;
            (bits, detected)
        }
    };

    Ok(TrialRecord {
        bit_errors: count_errors(&bits, &detected),
        bits: bits.len() as u64,
        range_error: None,
        velocity_error: None,
    })
}
