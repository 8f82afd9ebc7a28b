//! Waveform synthesis: PAPR and occupied bandwidth of the three waveforms.
//!
//! FM-OFDM and CE-OFDM are constant-envelope (0 dB PAPR) by construction;
//! CP-OFDM pays the usual multicarrier PAPR. Larger modulation indices widen
//! the FM-OFDM occupied band.
//!
//! Run with: cargo run --example constant_envelope

use isac::waveform::{
    ce_ofdm_modulate, cp_ofdm_modulate, fm_modulate, map_subcarriers, occupied_bandwidth,
    ofdm_real_baseband, papr_db, FmParams, OfdmConfig,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn main() -> isac::Result<()> {
    let ofdm = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bits: Vec<bool> = (0..ofdm.bits_per_block()).map(|_| rng.gen()).collect();
    let frame = map_subcarriers(&bits, &ofdm)?;
    let bb = ofdm_real_baseband(&frame)?;

    let p = FmParams::new(0.6 / TAU, ofdm.sample_rate)?;
    let fm = fm_modulate(&bb.samples, &p, ofdm.sample_interval())?;
    let ce = ce_ofdm_modulate(&bb.samples, &p, ofdm.sample_interval())?;
    let cp = cp_ofdm_modulate(&frame)?;

    println!("one random block, N = {}, {} active tones:", ofdm.n_fft, ofdm.active_band.len());
    println!("  FM-OFDM PAPR = {:.2e} dB", papr_db(&fm)?);
    println!("  CE-OFDM PAPR = {:.2e} dB", papr_db(&ce)?);
    println!("  CP-OFDM PAPR = {:.2} dB", papr_db(&cp)?);

    println!("\noccupied bandwidth (Carson-like, eta = 1.5) vs modulation index:");
    for m in [0.3, 0.6, 0.9] {
        let p = FmParams::new(m / TAU, ofdm.sample_rate)?;
        let bw = occupied_bandwidth(&bb.samples, &p, 1.5, ofdm.sample_rate);
        println!("  m = {m}/(2 pi): {:.2} MHz", bw / 1e6);
    }
    Ok(())
}
