//! Range-Doppler map of a two-target scene, exported as a PGM raster with a
//! text sidecar describing the axes (-60 dB display floor).
//!
//! Run with: cargo run --example range_doppler_map

use isac::channel::{add_awgn, radar_echoes, NoiseSpec, Target, TargetScene};
use isac::harness::{export_rdm, RdmScale};
use isac::radar::{build_rdm, range_compress, CompressionMethod, DopplerWindow};
use isac::waveform::{
    aliasing_margin, fm_modulate, map_subcarriers, ofdm_real_baseband, FmParams, OfdmConfig,
};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

fn main() -> isac::Result<()> {
    let ofdm = OfdmConfig::with_cutoff(512, 64, 15.36e6, 128, 4)?;
    let p = FmParams::new(0.9 / TAU, ofdm.sample_rate)?;
    let carrier = 77e9;
    let t_eff = ofdm.symbol_duration_eff();
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let scene = TargetScene {
        targets: vec![
            Target { range: 120.0, velocity: -8.0, reflectivity: Complex64::new(1.0, 0.0) },
            Target { range: 420.0, velocity: 15.0, reflectivity: Complex64::new(0.6, 0.0) },
        ],
        carrier,
    };

    let profiles: Vec<_> = (0..64)
        .map(|u| {
            let s = loop {
                let bits: Vec<bool> = (0..ofdm.bits_per_block()).map(|_| rng.gen()).collect();
                let bb = ofdm_real_baseband(&map_subcarriers(&bits, &ofdm).unwrap()).unwrap();
                if aliasing_margin(&bb.samples, &p, ofdm.sample_interval()) > 0.0 {
                    break fm_modulate(&bb.samples, &p, ofdm.sample_interval()).unwrap();
                }
            };
            let echo = radar_echoes(&s, &scene, u, t_eff, ofdm.n_cp).unwrap();
            let noisy = add_awgn(&echo, &NoiseSpec { snr_db: 10.0, rng_seed: rng.gen() }).unwrap();
            range_compress(&noisy, &s, CompressionMethod::Fft).unwrap()
        })
        .collect();

    let rdm = build_rdm(&profiles, DopplerWindow::Hann, ofdm.sample_rate, t_eff, carrier)?;
    let out = std::env::temp_dir().join("isac_example_rdm.pgm");
    export_rdm(&rdm, &out, RdmScale::Db)?;
    println!(
        "wrote {} ({} range bins x {} Doppler bins) and sidecar {}.txt",
        out.display(),
        rdm.range_axis.len(),
        rdm.velocity_axis.len(),
        out.display()
    );
    println!(
        "range span 0..{:.0} m, velocity span {:.1}..{:.1} m/s",
        rdm.range_axis.last().unwrap(),
        rdm.velocity_axis.first().unwrap(),
        rdm.velocity_axis.last().unwrap()
    );
    Ok(())
}
