//! Sensing Monte Carlo trials: the noncoherent matched-filter chain for the
//! constant-envelope waveforms and a coherent 2D-FFT baseline for CP-OFDM.

use super::config::{ExperimentConfig, WaveformKind};
use super::link::draw_fm_block;
use crate::channel::{self, NoiseSpec, TargetScene};
use crate::metrics::TrialRecord;
use crate::radar::{
    self, CompressionMethod, PeakPolicy, RangeProfile,
};
use crate::waveform::{self, ComplexSignal, FmParams, OfdmConfig};
use crate::{dsp, Error, Result};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

fn make_scene(cfg: &ExperimentConfig) -> TargetScene {
    TargetScene { targets: cfg.targets.clone(), carrier: cfg.carrier }
}

/// Synthesize U slow-time symbols of the given constant-envelope waveform,
/// bounce them off the scene, add noise; returns (received, references).
pub(crate) fn echo_symbol_pairs(
    cfg: &ExperimentConfig,
    ofdm: &OfdmConfig,
    p: &FmParams,
    kind: WaveformKind,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Result<(Vec<ComplexSignal>, Vec<ComplexSignal>)> {
    let scene = make_scene(cfg);
    let t_eff = ofdm.symbol_duration_eff();
    let mut received = Vec::with_capacity(cfg.n_symbols);
    let mut references = Vec::with_capacity(cfg.n_symbols);
    for u in 0..cfg.n_symbols {
        let tx = match kind {
            WaveformKind::FmOfdm => draw_fm_block(ofdm, p, rng)?.2,
            WaveformKind::CeOfdm => {
                let bits: Vec<bool> = (0..ofdm.bits_per_block()).map(|_| rng.gen()).collect();
                let bb = waveform::ofdm_real_baseband(&waveform::map_subcarriers(&bits, ofdm)?)?;
                waveform::ce_ofdm_modulate(&bb.samples, p, ofdm.sample_interval())?
            }
            WaveformKind::CpOfdm => {
                return Err(Error::Config(
                    "cp_ofdm uses the coherent baseline, not the matched-filter chain".into(),
                ))
            }
        };
        let echo = channel::radar_echoes(&tx, &scene, u, t_eff, ofdm.n_cp)?;
        let noisy = channel::add_awgn(&echo, &NoiseSpec { snr_db, rng_seed: rng.gen() })?;
        received.push(noisy);
        references.push(tx);
    }
    Ok((received, references))
}

/// Range profiles for the noncoherent chain, one per slow-time symbol.
pub(crate) fn matched_filter_profiles(
    received: &[ComplexSignal],
    references: &[ComplexSignal],
) -> Result<Vec<RangeProfile>> {
    received
        .iter()
        .zip(references)
        .map(|(r, s)| radar::range_compress(r, s, CompressionMethod::Fft))
        .collect()
}

fn estimate_errors(
    cfg: &ExperimentConfig,
    range_hat: f64,
    velocity_hat: f64,
) -> TrialRecord {
    TrialRecord {
        bit_errors: 0,
        bits: 0,
        range_error: Some(range_hat - cfg.targets[0].range),
        velocity_error: Some(velocity_hat - cfg.targets[0].velocity),
    }
}

/// One sensing trial with the noncoherent matched-filter chain
/// (range compression, magnitude averaging, peak pick, slow-time phase
/// differences). Errors are measured against the first configured target.
pub(crate) fn sensing_trial_noncoherent(
    cfg: &ExperimentConfig,
    ofdm: &OfdmConfig,
    kind: WaveformKind,
    snr_db: f64,
    seed: u64,
) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = cfg.fm(cfg.mod_indices[0])?;
    let (received, references) = echo_symbol_pairs(cfg, ofdm, &p, kind, snr_db, &mut rng)?;
    let estimates = radar::process(
        &received,
        &references,
        PeakPolicy::Count { count: 1, guard: 2 },
        cfg.sample_rate,
        ofdm.symbol_duration_eff(),
        cfg.carrier,
        cfg.refine,
    )?;
    Ok(estimate_errors(cfg, estimates[0].range, estimates[0].velocity))
}

/// CP-OFDM coherent baseline: per-symbol frequency-domain channel estimates
/// on the known active tones, IFFT of the active-tone block to a range
/// profile, slow-time DFT to a range-Doppler map, global-peak readout.
///
/// Only the used subcarriers carry a channel estimate, so the range grid is
/// coarser than the matched-filter chain's by a factor n_fft/active_tones:
/// the baseline's range resolution is set by its occupied bandwidth.
pub(crate) fn cp_profiles(
    cfg: &ExperimentConfig,
    ofdm: &OfdmConfig,
    snr_db: f64,
    rng: &mut impl Rng,
) -> Result<Vec<RangeProfile>> {
    let scene = make_scene(cfg);
    let t_eff = ofdm.symbol_duration_eff();
    let mut profiles = Vec::with_capacity(cfg.n_symbols);
    for u in 0..cfg.n_symbols {
        let bits: Vec<bool> = (0..ofdm.bits_per_block()).map(|_| rng.gen()).collect();
        let frame = waveform::map_subcarriers(&bits, ofdm)?;
        let body = ComplexSignal::new(dsp::ifft(&frame.values), ofdm.sample_interval())?;
        let echo = channel::radar_echoes(&body, &scene, u, t_eff, ofdm.n_cp)?;
        let noisy = channel::add_awgn(&echo, &NoiseSpec { snr_db, rng_seed: rng.gen() })?;
        let spectrum = dsp::fft(&noisy.samples);
        let h_hat: Vec<Complex64> = ofdm
            .active_band
            .iter()
            .map(|&q| {
                let x = frame.values[q];
                spectrum[q] * x.conj() / x.norm_sqr()
            })
            .collect();
        profiles.push(RangeProfile { values: dsp::ifft(&h_hat) });
    }
    Ok(profiles)
}

/// Bandwidth actually occupied by the CP-OFDM active tones; sets the range
/// bin size of the coherent baseline's coarse grid.
pub(crate) fn cp_effective_rate(cfg: &ExperimentConfig, ofdm: &OfdmConfig) -> f64 {
    cfg.sample_rate * ofdm.active_band.len() as f64 / ofdm.n_fft as f64
}

pub(crate) fn sensing_trial_cp(
    cfg: &ExperimentConfig,
    ofdm: &OfdmConfig,
    snr_db: f64,
    seed: u64,
) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles = cp_profiles(cfg, ofdm, snr_db, &mut rng)?;
    let rate_eff = cp_effective_rate(cfg, ofdm);
    let rdm = radar::build_rdm(
        &profiles,
        radar::DopplerWindow::None,
        rate_eff,
        ofdm.symbol_duration_eff(),
        cfg.carrier,
    )?;
    let mut best = (0usize, 0usize, f64::NEG_INFINITY);
    for (ri, row) in rdm.grid.iter().enumerate() {
        for (ci, &v) in row.iter().enumerate() {
            if v > best.2 {
                best = (ri, ci, v);
            }
        }
    }
    let range = if cfg.refine {
        let column: Vec<f64> = rdm.grid.iter().map(|row| row[best.1]).collect();
        radar::lag_to_range(radar::refine_peak_lag(&column, best.0), rate_eff)
    } else {
        rdm.range_axis[best.0]
    };
    Ok(estimate_errors(cfg, range, rdm.velocity_axis[best.1]))
}

/// Average -3 dB mainlobe width (in lags) of the noncoherently averaged
/// profile for one trial at the given modulation index.
pub(crate) fn mainlobe_width_trial(
    cfg: &ExperimentConfig,
    ofdm: &OfdmConfig,
    mod_index: f64,
    snr_db: f64,
    seed: u64,
) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = cfg.fm(mod_index)?;
    let (received, references) =
        echo_symbol_pairs(cfg, ofdm, &p, WaveformKind::FmOfdm, snr_db, &mut rng)?;
    let profiles = matched_filter_profiles(&received, &references)?;
    let cbar = radar::noncoherent_average(&profiles)?;
    Ok(radar::mainlobe_width_3db(&cbar))
}
