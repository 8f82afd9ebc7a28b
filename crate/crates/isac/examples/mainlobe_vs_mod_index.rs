//! Range-autocorrelation mainlobe width versus FM modulation index.
//!
//! Higher modulation indices spread the FM-OFDM spectrum further, which
//! sharpens the matched-filter mainlobe and improves range resolution beyond
//! the active-subcarrier bandwidth.
//!
//! Run with: cargo run --example mainlobe_vs_mod_index

use isac::radar::{mainlobe_width_3db, noncoherent_average, range_compress, CompressionMethod};
use isac::channel::{radar_echoes, Target, TargetScene};
use isac::waveform::{
    aliasing_margin, fm_modulate, map_subcarriers, ofdm_real_baseband, FmParams, OfdmConfig,
};
use isac::SPEED_OF_LIGHT;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn main() -> isac::Result<()> {
    let ofdm = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4)?;
    let t_eff = ofdm.symbol_duration_eff();
    let bin_m = SPEED_OF_LIGHT / (2.0 * ofdm.sample_rate);
    let scene = TargetScene {
        targets: vec![Target { range: 150.0, velocity: 0.0, reflectivity: Complex64::new(1.0, 0.0) }],
        carrier: 77e9,
    };

    println!("-3 dB mainlobe width of the noncoherently averaged profile (8 symbols, noiseless):");
    for m in [0.3, 0.6, 0.9] {
        let p = FmParams::new(m / TAU, ofdm.sample_rate)?;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let profiles: Vec<_> = (0..8)
            .map(|u| {
                let s = loop {
                    let bits: Vec<bool> =
                        (0..ofdm.bits_per_block()).map(|_| rng.gen()).collect();
                    let bb = ofdm_real_baseband(&map_subcarriers(&bits, &ofdm).unwrap()).unwrap();
                    if aliasing_margin(&bb.samples, &p, ofdm.sample_interval()) > 0.0 {
                        break fm_modulate(&bb.samples, &p, ofdm.sample_interval()).unwrap();
                    }
                };
                let echo = radar_echoes(&s, &scene, u, t_eff, ofdm.n_cp).unwrap();
                range_compress(&echo, &s, CompressionMethod::Fft).unwrap()
            })
            .collect();
        let cbar = noncoherent_average(&profiles)?;
        let width = mainlobe_width_3db(&cbar);
        println!("  m = {m}/(2 pi): {width} lags = {:.1} m", width as f64 * bin_m);
    }
    Ok(())
}
