//! Propagation models: time-varying multipath, Rayleigh path sampling with a
//! Jakes angle model, radar point-target echoes, and seeded AWGN.

use crate::waveform::ComplexSignal;
use crate::{Error, Result, SPEED_OF_LIGHT};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::f64::consts::TAU;

/// One discrete multipath component: r gains a_p e^{j2pi nu_p n T_s} at
/// integer delay ell_p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelPath {
    pub gain: Complex64,
    /// Doppler shift in Hz.
    pub doppler: f64,
    /// Integer sample delay.
    pub delay: usize,
}

/// Point target for the monostatic radar geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    /// Range in meters.
    pub range: f64,
    /// Radial velocity in m/s (positive = receding).
    pub velocity: f64,
    pub reflectivity: Complex64,
}

impl Target {
    /// Discrete round-trip delay floor(2 R F_s / c) in samples.
    pub fn delay_samples(&self, sample_rate: f64) -> usize {
        (2.0 * self.range * sample_rate / SPEED_OF_LIGHT).floor() as usize
    }

    /// Two-way Doppler 2 v f_c / c in Hz.
    pub fn doppler(&self, carrier: f64) -> f64 {
        2.0 * self.velocity * carrier / SPEED_OF_LIGHT
    }
}

/// A set of point targets observed at a common carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetScene {
    pub targets: Vec<Target>,
    /// Carrier frequency f_c in Hz.
    pub carrier: f64,
}

/// Per-sample complex SNR for [`add_awgn`]. `snr_db = f64::INFINITY` is the
/// noiseless flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub rng_seed: u64,
}

/// Delay handling in [`apply_multipath`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DelayMode {
    /// Blockwise-circular: s[(n - ell) mod N]. Requires delay < N.
    Circular,
    /// Zero prehistory: s[n - ell] with s[n] = 0 for n < 0.
    Linear,
}

/// Doppler factor for communication links. The monostatic radar path always
/// uses the two-way factor; for one-way links the convention is selectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DopplerConvention {
    #[default]
    OneWay,
    TwoWay,
}

impl DopplerConvention {
    fn factor(self) -> f64 {
        match self {
            DopplerConvention::OneWay => 1.0,
            DopplerConvention::TwoWay => 2.0,
        }
    }
}

/// Delay profile for [`sample_rayleigh_paths`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FadingProfile {
    /// Single path at delay 0.
    Flat,
    /// Five unit-sum-power taps at delays 0..=4 samples, independent
    /// Rayleigh gains, each with its own Doppler draw.
    FiveTap,
}

/// Apply r[n] = sum_p a_p e^{j2pi nu_p n T_s} s[n - ell_p] to a block.
pub fn apply_multipath(
    sig: &ComplexSignal,
    paths: &[ChannelPath],
    mode: DelayMode,
) -> Result<ComplexSignal> {
    let n = sig.len();
    let ts = sig.sample_interval;
    if mode == DelayMode::Circular {
        if let Some(p) = paths.iter().find(|p| p.delay >= n) {
            return Err(Error::DelayOutOfRange { delay: p.delay, block: n });
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for p in paths {
        for (i, o) in out.iter_mut().enumerate() {
            let src = match mode {
                DelayMode::Circular => sig.samples[(i + n - p.delay) % n],
                DelayMode::Linear => {
                    if i < p.delay {
                        continue;
                    } else {
                        sig.samples[i - p.delay]
                    }
                }
            };
            *o += p.gain * Complex64::from_polar(1.0, TAU * p.doppler * i as f64 * ts) * src;
        }
    }
    ComplexSignal::new(out, ts)
}

/// Add complex AWGN at the requested per-sample SNR, deterministically under
/// the seed. The SNR is referenced to the empirical power of `sig` itself.
pub fn add_awgn(sig: &ComplexSignal, noise: &NoiseSpec) -> Result<ComplexSignal> {
    let power = sig.power();
    add_awgn_with_reference(sig, power, noise)
}

/// Add complex AWGN whose variance is referenced to `ref_power` rather than
/// the power of `sig`. Fading realizations then keep their SNR penalty
/// instead of having it normalized away.
pub fn add_awgn_with_reference(
    sig: &ComplexSignal,
    ref_power: f64,
    noise: &NoiseSpec,
) -> Result<ComplexSignal> {
    if noise.snr_db.is_infinite() && noise.snr_db > 0.0 {
        return Ok(sig.clone());
    }
    if ref_power == 0.0 {
        return Err(Error::ZeroPower);
    }
    let sigma2 = ref_power / 10f64.powf(noise.snr_db / 10.0);
    let s = (sigma2 / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(noise.rng_seed);
    let samples = sig
        .samples
        .iter()
        .map(|v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + Complex64::new(s * re, s * im)
        })
        .collect();
    ComplexSignal::new(samples, sig.sample_interval)
}

/// Draw a random Rayleigh channel realization.
///
/// Doppler per path is nu_max cos(theta) with theta uniform (Jakes angle
/// model) and nu_max = speed * f_c / c times the convention factor.
pub fn sample_rayleigh_paths(
    profile: FadingProfile,
    speed: f64,
    carrier: f64,
    convention: DopplerConvention,
    rng: &mut impl Rng,
) -> Vec<ChannelPath> {
    let nu_max = convention.factor() * speed * carrier / SPEED_OF_LIGHT;
    let n_taps = match profile {
        FadingProfile::Flat => 1,
        FadingProfile::FiveTap => 5,
    };
    let tap_sigma = (1.0 / (2.0 * n_taps as f64)).sqrt();
    (0..n_taps)
        .map(|delay| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let theta: f64 = rng.gen_range(0.0..TAU);
            ChannelPath {
                gain: Complex64::new(tap_sigma * re, tap_sigma * im),
                doppler: nu_max * theta.cos(),
                delay,
            }
        })
        .collect()
}

/// Noiseless radar echoes for the u-th slow-time symbol:
/// r_u[n] = sum_l alpha_l s_tx[n - tau_l] e^{j2pi nu_l (n T_s + u T_sym_eff)}.
///
/// `s_tx` is the CP-free reference block; all target delays must fit in the
/// cyclic prefix so circular correlation equals linear correlation.
/// Fractional round-trip delays are applied as band-limited circular shifts
/// (frequency-domain phase ramp over signed bin frequencies), which reduces
/// to the exact circular shift for on-grid targets.
pub fn radar_echoes(
    s_tx: &ComplexSignal,
    scene: &TargetScene,
    symbol_index: usize,
    symbol_duration_eff: f64,
    n_cp: usize,
) -> Result<ComplexSignal> {
    let n = s_tx.len();
    let ts = s_tx.sample_interval;
    let sample_rate = 1.0 / ts;
    let spectrum = crate::dsp::fft(&s_tx.samples);
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for t in &scene.targets {
        let tau = 2.0 * t.range * sample_rate / SPEED_OF_LIGHT;
        if tau.ceil() as usize > n_cp {
            return Err(Error::DelayExceedsCp { delay: tau.ceil() as usize, n_cp });
        }
        let shifted: Vec<Complex64> = spectrum
            .iter()
            .enumerate()
            .map(|(k, v)| {
                let kf = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                v * Complex64::from_polar(1.0, -TAU * kf * tau / n as f64)
            })
            .collect();
        let delayed = crate::dsp::ifft(&shifted);
        let nu = t.doppler(scene.carrier);
        let slow_phase = TAU * nu * symbol_index as f64 * symbol_duration_eff;
        for (i, o) in out.iter_mut().enumerate() {
            *o += t.reflectivity
                * delayed[i]
                * Complex64::from_polar(1.0, TAU * nu * i as f64 * ts + slow_phase);
        }
    }
    ComplexSignal::new(out, ts)
}

/// Genie one-tap frequency response of a multipath channel over one block:
/// H[k] = sum_p a_p e_p e^{-j2pi k ell_p / N}, where e_p is the block
/// average of the Doppler rotation of path p.
pub fn freq_response(paths: &[ChannelPath], n_fft: usize, sample_interval: f64) -> Vec<Complex64> {
    (0..n_fft)
        .map(|k| {
            paths
                .iter()
                .map(|p| {
                    let avg: Complex64 = (0..n_fft)
                        .map(|i| {
                            Complex64::from_polar(1.0, TAU * p.doppler * i as f64 * sample_interval)
                        })
                        .sum::<Complex64>()
                        / n_fft as f64;
                    p.gain
                        * avg
                        * Complex64::from_polar(1.0, -TAU * k as f64 * p.delay as f64 / n_fft as f64)
                })
                .sum()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_signal(n: usize) -> ComplexSignal {
        ComplexSignal::new(
            (0..n)
                .map(|i| Complex64::new((i as f64 * 0.31).sin(), (i as f64 * 0.77).cos()))
                .collect(),
            1e-6,
        )
        .unwrap()
    }

    #[test]
    fn identity_path_is_identity() {
        let sig = test_signal(32);
        let path = ChannelPath { gain: Complex64::new(1.0, 0.0), doppler: 0.0, delay: 0 };
        let out = apply_multipath(&sig, &[path], DelayMode::Circular).unwrap();
        for (a, b) in out.samples.iter().zip(&sig.samples) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn single_path_cfo() {
        let sig = test_signal(32);
        let nu = 1234.0;
        let path = ChannelPath { gain: Complex64::new(1.0, 0.0), doppler: nu, delay: 0 };
        let out = apply_multipath(&sig, &[path], DelayMode::Circular).unwrap();
        for (i, (a, b)) in out.samples.iter().zip(&sig.samples).enumerate() {
            let rot = Complex64::from_polar(1.0, TAU * nu * i as f64 * sig.sample_interval);
            assert!((a - b * rot).norm() < 1e-12);
        }
    }

    #[test]
    fn two_paths_match_direct_sum() {
        let sig = test_signal(64);
        let paths = [
            ChannelPath { gain: Complex64::new(0.8, -0.3), doppler: 900.0, delay: 3 },
            ChannelPath { gain: Complex64::new(-0.2, 0.5), doppler: -4100.0, delay: 11 },
        ];
        let out = apply_multipath(&sig, &paths, DelayMode::Circular).unwrap();
        for n in 0..64 {
            let mut direct = Complex64::new(0.0, 0.0);
            for p in &paths {
                direct += p.gain
                    * Complex64::from_polar(1.0, TAU * p.doppler * n as f64 * sig.sample_interval)
                    * sig.samples[(n + 64 - p.delay) % 64];
            }
            assert!((out.samples[n] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn circular_delay_out_of_range_rejected() {
        let sig = test_signal(16);
        let path = ChannelPath { gain: Complex64::new(1.0, 0.0), doppler: 0.0, delay: 16 };
        assert!(matches!(
            apply_multipath(&sig, &[path], DelayMode::Circular),
            Err(Error::DelayOutOfRange { .. })
        ));
    }

    #[test]
    fn linearity_of_multipath() {
        let s1 = test_signal(32);
        let s2 = ComplexSignal::new(
            s1.samples.iter().map(|v| v * Complex64::new(0.0, 1.0) + 0.3).collect(),
            s1.sample_interval,
        )
        .unwrap();
        let paths = [
            ChannelPath { gain: Complex64::new(0.6, 0.1), doppler: 777.0, delay: 2 },
            ChannelPath { gain: Complex64::new(-0.1, 0.9), doppler: -50.0, delay: 7 },
        ];
        let (a, b) = (Complex64::new(1.3, -0.4), Complex64::new(-0.2, 0.9));
        let combined = ComplexSignal::new(
            s1.samples.iter().zip(&s2.samples).map(|(u, v)| a * u + b * v).collect(),
            s1.sample_interval,
        )
        .unwrap();
        let lhs = apply_multipath(&combined, &paths, DelayMode::Circular).unwrap();
        let r1 = apply_multipath(&s1, &paths, DelayMode::Circular).unwrap();
        let r2 = apply_multipath(&s2, &paths, DelayMode::Circular).unwrap();
        for i in 0..32 {
            let rhs = a * r1.samples[i] + b * r2.samples[i];
            assert!((lhs.samples[i] - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn unit_modulus_path_preserves_power() {
        let sig = test_signal(64);
        let path = ChannelPath {
            gain: Complex64::from_polar(1.0, 0.83),
            doppler: 2500.0,
            delay: 9,
        };
        let out = apply_multipath(&sig, &[path], DelayMode::Circular).unwrap();
        assert!((out.power() - sig.power()).abs() < 1e-12);
    }

    #[test]
    fn doppler_shifts_compose() {
        let sig = test_signal(48);
        let p = |nu| ChannelPath { gain: Complex64::new(1.0, 0.0), doppler: nu, delay: 0 };
        let seq = apply_multipath(
            &apply_multipath(&sig, &[p(1000.0)], DelayMode::Circular).unwrap(),
            &[p(-350.0)],
            DelayMode::Circular,
        )
        .unwrap();
        let single = apply_multipath(&sig, &[p(650.0)], DelayMode::Circular).unwrap();
        for (a, b) in seq.samples.iter().zip(&single.samples) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn awgn_infinite_snr_is_identity_and_seed_deterministic() {
        let sig = test_signal(64);
        let clean =
            add_awgn(&sig, &NoiseSpec { snr_db: f64::INFINITY, rng_seed: 1 }).unwrap();
        assert_eq!(clean.samples, sig.samples);
        let a = add_awgn(&sig, &NoiseSpec { snr_db: 10.0, rng_seed: 42 }).unwrap();
        let b = add_awgn(&sig, &NoiseSpec { snr_db: 10.0, rng_seed: 42 }).unwrap();
        assert_eq!(a.samples, b.samples);
        let c = add_awgn(&sig, &NoiseSpec { snr_db: 10.0, rng_seed: 43 }).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn awgn_power_calibration() {
        let n = 1_000_000;
        let sig = ComplexSignal::new(vec![Complex64::new(1.0, 0.0); n], 1.0).unwrap();
        let noisy = add_awgn(&sig, &NoiseSpec { snr_db: 0.0, rng_seed: 9 }).unwrap();
        let noise_power = noisy
            .samples
            .iter()
            .zip(&sig.samples)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((noise_power - 1.0).abs() < 0.01, "noise power {noise_power}");
    }

    #[test]
    fn zero_power_signal_rejected() {
        let sig = ComplexSignal::new(vec![Complex64::new(0.0, 0.0); 8], 1.0).unwrap();
        assert!(matches!(
            add_awgn(&sig, &NoiseSpec { snr_db: 10.0, rng_seed: 0 }),
            Err(Error::ZeroPower)
        ));
    }

    #[test]
    fn flat_profile_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let paths = sample_rayleigh_paths(
            FadingProfile::Flat,
            0.0,
            2.4e9,
            DopplerConvention::OneWay,
            &mut rng,
        );
        assert_eq!(paths.len(), 1);
        assert_eq!(paths[0].delay, 0);
        assert_eq!(paths[0].doppler, 0.0);
    }

    #[test]
    fn five_tap_unit_average_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut total = 0.0;
        let draws = 10_000;
        for _ in 0..draws {
            let paths = sample_rayleigh_paths(
                FadingProfile::FiveTap,
                30.0,
                2.4e9,
                DopplerConvention::OneWay,
                &mut rng,
            );
            assert_eq!(paths.iter().map(|p| p.delay).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
            total += paths.iter().map(|p| p.gain.norm_sqr()).sum::<f64>();
        }
        let mean = total / draws as f64;
        assert!((mean - 1.0).abs() < 0.02, "mean tap power {mean}");
    }

    #[test]
    fn doppler_convention_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let speed = 30.0;
        let carrier = 77e9;
        let bound1 = speed * carrier / SPEED_OF_LIGHT;
        for _ in 0..100 {
            let p = sample_rayleigh_paths(
                FadingProfile::Flat,
                speed,
                carrier,
                DopplerConvention::TwoWay,
                &mut rng,
            );
            assert!(p[0].doppler.abs() <= 2.0 * bound1 + 1e-9);
        }
    }

    #[test]
    fn static_target_at_origin_is_identity() {
        let sig = test_signal(64);
        let scene = TargetScene {
            targets: vec![Target {
                range: 0.0,
                velocity: 0.0,
                reflectivity: Complex64::new(1.0, 0.0),
            }],
            carrier: 77e9,
        };
        for u in [0, 3, 9] {
            let out = radar_echoes(&sig, &scene, u, 1e-4, 8).unwrap();
            for (a, b) in out.samples.iter().zip(&sig.samples) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn static_target_is_circular_shift() {
        let sig = test_signal(64);
        let fs = 1.0 / sig.sample_interval;
        let range = 5.0 * SPEED_OF_LIGHT / (2.0 * fs); // exactly 5 samples
        let scene = TargetScene {
            targets: vec![Target {
                range,
                velocity: 0.0,
                reflectivity: Complex64::new(1.0, 0.0),
            }],
            carrier: 77e9,
        };
        let out0 = radar_echoes(&sig, &scene, 0, 1e-4, 8).unwrap();
        let out5 = radar_echoes(&sig, &scene, 5, 1e-4, 8).unwrap();
        assert_eq!(out0.samples, out5.samples);
        for i in 0..64 {
            assert!((out0.samples[i] - sig.samples[(i + 64 - 5) % 64]).norm() < 1e-12);
        }
    }

    #[test]
    fn fractional_delay_straddles_adjacent_bins() {
        // a half-sample delay of a pure tone gains exactly half a sample of
        // phase; check against the analytic band-limited shift
        let n = 64;
        let ts = 1e-6;
        let fs = 1.0 / ts;
        let sig = ComplexSignal::new(
            (0..n)
                .map(|i| Complex64::from_polar(1.0, TAU * 3.0 * i as f64 / n as f64))
                .collect(),
            ts,
        )
        .unwrap();
        let tau = 5.5;
        let scene = TargetScene {
            targets: vec![Target {
                range: tau * SPEED_OF_LIGHT / (2.0 * fs),
                velocity: 0.0,
                reflectivity: Complex64::new(1.0, 0.0),
            }],
            carrier: 77e9,
        };
        let out = radar_echoes(&sig, &scene, 0, 1e-4, 8).unwrap();
        for (i, o) in out.samples.iter().enumerate() {
            let expect =
                Complex64::from_polar(1.0, TAU * 3.0 * (i as f64 - tau) / n as f64);
            assert!((o - expect).norm() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn three_targets_match_direct_evaluation() {
        let sig = test_signal(512);
        let fs = 1.0 / sig.sample_interval;
        let bin = SPEED_OF_LIGHT / (2.0 * fs);
        let scene = TargetScene {
            targets: vec![
                Target { range: 3.0 * bin, velocity: 12.0, reflectivity: Complex64::new(0.9, 0.1) },
                Target { range: 17.0 * bin, velocity: -40.0, reflectivity: Complex64::new(0.4, -0.6) },
                Target { range: 41.0 * bin, velocity: 3.5, reflectivity: Complex64::new(-0.2, 0.2) },
            ],
            carrier: 77e9,
        };
        let u = 7;
        let t_sym = 2.88e-6;
        let out = radar_echoes(&sig, &scene, u, t_sym, 64).unwrap();
        for n in (0..512).step_by(29) {
            let mut direct = Complex64::new(0.0, 0.0);
            for (t, tau) in scene.targets.iter().zip([3usize, 17, 41]) {
                let nu = 2.0 * t.velocity * scene.carrier / SPEED_OF_LIGHT;
                direct += t.reflectivity
                    * sig.samples[(n + 512 - tau) % 512]
                    * Complex64::from_polar(
                        1.0,
                        TAU * nu * (n as f64 * sig.sample_interval + u as f64 * t_sym),
                    );
            }
            assert!((out.samples[n] - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn target_delay_beyond_cp_rejected() {
        let sig = test_signal(64);
        let fs = 1.0 / sig.sample_interval;
        let scene = TargetScene {
            targets: vec![Target {
                range: 20.0 * SPEED_OF_LIGHT / (2.0 * fs),
                velocity: 0.0,
                reflectivity: Complex64::new(1.0, 0.0),
            }],
            carrier: 77e9,
        };
        assert!(matches!(
            radar_echoes(&sig, &scene, 0, 1e-4, 8),
            Err(Error::DelayExceedsCp { delay: 20, n_cp: 8 })
        ));
    }
}
