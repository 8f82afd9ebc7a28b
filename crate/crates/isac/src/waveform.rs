//! Transmit-side signal synthesis: Hermitian QAM subcarrier mapping, real
//! OFDM baseband generation, FM-OFDM / CE-OFDM / CP-OFDM modulators, and
//! envelope/bandwidth diagnostics.

use crate::dsp;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

/// Relative imaginary residue above which a frame is rejected as
/// non-Hermitian.
const HERMITIAN_TOL: f64 = 1e-9;

/// How the real baseband block is scaled to unit variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Divide by the empirical standard deviation of the block. Guards the
    /// aliasing bound deterministically per block.
    #[default]
    PerBlock,
    /// Fixed scale derived from the constellation energy, so the ensemble
    /// variance is one but individual blocks fluctuate.
    Ensemble,
}

/// Static OFDM numerology shared by all three waveforms.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmConfig {
    /// FFT size N (samples per block), even.
    pub n_fft: usize,
    /// Cyclic prefix length, < N.
    pub n_cp: usize,
    /// Sampling rate F_s = 1/T_s in Hz.
    pub sample_rate: f64,
    /// Data-bearing subcarrier indices, all in 1..N/2. The mirror N-q of
    /// every active tone carries the conjugate and is not independently
    /// data-bearing.
    pub active_band: Vec<usize>,
    /// QAM constellation size, a power of 4.
    pub qam_order: usize,
    /// Variance normalization applied to the real baseband.
    pub normalization: Normalization,
}

impl OfdmConfig {
    pub fn new(
        n_fft: usize,
        n_cp: usize,
        sample_rate: f64,
        active_band: Vec<usize>,
        qam_order: usize,
    ) -> Result<Self> {
        if n_fft == 0 || n_fft % 2 != 0 {
            return Err(Error::Config(format!("n_fft must be even and nonzero, got {n_fft}")));
        }
        if n_cp >= n_fft {
            return Err(Error::Config(format!("n_cp {n_cp} must be < n_fft {n_fft}")));
        }
        if !(sample_rate > 0.0) {
            return Err(Error::Config("sample_rate must be positive".into()));
        }
        for &q in &active_band {
            if q == 0 || q >= n_fft / 2 {
                return Err(Error::Config(format!(
                    "active tone {q} outside 1..{} (DC, Nyquist and mirrors are reserved)",
                    n_fft / 2
                )));
            }
        }
        if !qam_order.is_power_of_two() || qam_order.trailing_zeros() % 2 != 0 || qam_order < 4 {
            return Err(Error::Config(format!("qam_order {qam_order} is not a power of 4")));
        }
        Ok(Self { n_fft, n_cp, sample_rate, active_band, qam_order, normalization: Normalization::default() })
    }

    /// Convenience constructor: active tones are 1..=cutoff (plus mirrors).
    pub fn with_cutoff(
        n_fft: usize,
        n_cp: usize,
        sample_rate: f64,
        cutoff: usize,
        qam_order: usize,
    ) -> Result<Self> {
        Self::new(n_fft, n_cp, sample_rate, (1..=cutoff).collect(), qam_order)
    }

    /// Sampling interval T_s in seconds.
    pub fn sample_interval(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Symbol duration including CP, (N + N_CP) T_s.
    pub fn symbol_duration_eff(&self) -> f64 {
        (self.n_fft + self.n_cp) as f64 * self.sample_interval()
    }

    /// Bits per QAM symbol.
    pub fn bits_per_symbol(&self) -> usize {
        self.qam_order.trailing_zeros() as usize
    }

    /// Bits carried by one OFDM block.
    pub fn bits_per_block(&self) -> usize {
        self.active_band.len() * self.bits_per_symbol()
    }
}

/// FM modulation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FmParams {
    /// Modulation index m (dimensionless). The physical degree of freedom is
    /// the product m * deviation_scale; figures quoting bare values like 0.6
    /// use the m = 0.6/(2 pi) convention with deviation_scale = F_s.
    pub mod_index: f64,
    /// Deviation scale f_delta in Hz.
    pub deviation_scale: f64,
    /// Envelope amplitude A.
    pub amplitude: f64,
    /// Initial phase phi_0 in radians.
    pub initial_phase: f64,
    /// Discriminator gain K_V, consumed by the receiver.
    pub discriminator_gain: f64,
}

impl FmParams {
    pub fn new(mod_index: f64, deviation_scale: f64) -> Result<Self> {
        if !(mod_index > 0.0) || !(deviation_scale > 0.0) {
            return Err(Error::Config(format!(
                "mod_index {mod_index} and deviation_scale {deviation_scale} must be positive"
            )));
        }
        Ok(Self {
            mod_index,
            deviation_scale,
            amplitude: 1.0,
            initial_phase: 0.0,
            discriminator_gain: 1.0,
        })
    }

    /// Peak frequency deviation per unit drive, m * f_delta.
    pub fn deviation(&self) -> f64 {
        self.mod_index * self.deviation_scale
    }
}

/// Length-N frequency-domain frame with Hermitian symmetry on active tones.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierFrame {
    pub values: Vec<Complex64>,
    pub config: OfdmConfig,
}

/// Complex baseband sample sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    pub samples: Vec<Complex64>,
    /// T_s in seconds.
    pub sample_interval: f64,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>, sample_interval: f64) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !(sample_interval > 0.0) {
            return Err(Error::Config("sample_interval must be positive".into()));
        }
        Ok(Self { samples, sample_interval })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean per-sample power.
    pub fn power(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.len() as f64
    }
}

/// Real baseband block together with the scale factor that was applied to
/// the raw inverse DFT. A genie receiver divides equalized symbols by
/// `scale` to get back to constellation coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBaseband {
    pub samples: Vec<f64>,
    pub scale: f64,
}

// --- Gray-mapped square QAM -------------------------------------------------

fn gray_decode(mut g: usize) -> usize {
    let mut b = 0;
    while g != 0 {
        b ^= g;
        g >>= 1;
    }
    b
}

fn gray_encode(b: usize) -> usize {
    b ^ (b >> 1)
}

/// Per-axis PAM amplitude for `half_bits` Gray-coded bits, unnormalized
/// (levels +/-1, +/-3, ...). All-zero bits map to the most positive level.
fn pam_level(bits: &[bool]) -> f64 {
    let m = 1usize << bits.len();
    let g = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let i = gray_decode(g);
    (m - 1) as f64 - 2.0 * i as f64
}

fn pam_detect(level: f64, half_bits: usize, out: &mut Vec<bool>) {
    let m = 1usize << half_bits;
    // nearest level index
    let i = (((m - 1) as f64 - level) / 2.0).round().clamp(0.0, (m - 1) as f64) as usize;
    let g = gray_encode(i);
    for k in (0..half_bits).rev() {
        out.push((g >> k) & 1 == 1);
    }
}

fn qam_norm(order: usize) -> f64 {
    let m_axis = 1usize << (order.trailing_zeros() as usize / 2);
    (2.0 * ((m_axis * m_axis - 1) as f64) / 3.0).sqrt()
}

/// Map `bits` onto the active tones of a Hermitian-symmetric frame.
///
/// Gray-mapped, unit-average-energy square QAM on the lower-half active
/// tones; conjugate mirrors on the upper half; zeros elsewhere.
pub fn map_subcarriers(bits: &[bool], cfg: &OfdmConfig) -> Result<SubcarrierFrame> {
    let expected = cfg.bits_per_block();
    if bits.len() != expected {
        return Err(Error::BitCount { expected, got: bits.len() });
    }
    let half = cfg.bits_per_symbol() / 2;
    let norm = qam_norm(cfg.qam_order);
    let mut values = vec![Complex64::new(0.0, 0.0); cfg.n_fft];
    for (i, &q) in cfg.active_band.iter().enumerate() {
        let chunk = &bits[i * 2 * half..(i + 1) * 2 * half];
        let re = pam_level(&chunk[..half]) / norm;
        let im = pam_level(&chunk[half..]) / norm;
        let x = Complex64::new(re, im);
        values[q] = x;
        values[cfg.n_fft - q] = x.conj();
    }
    Ok(SubcarrierFrame { values, config: cfg.clone() })
}

/// Inverse of [`map_subcarriers`]: hard decision on the active tones of a
/// (possibly noisy) frequency-domain vector.
pub fn demap_subcarriers(values: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<bool>> {
    if values.len() != cfg.n_fft {
        return Err(Error::LengthMismatch { expected: cfg.n_fft, got: values.len() });
    }
    let half = cfg.bits_per_symbol() / 2;
    let norm = qam_norm(cfg.qam_order);
    let mut bits = Vec::with_capacity(cfg.bits_per_block());
    for &q in &cfg.active_band {
        let x = values[q] * norm;
        pam_detect(x.re, half, &mut bits);
        pam_detect(x.im, half, &mut bits);
    }
    Ok(bits)
}

/// Nearest constellation point for an equalized symbol (in constellation
/// coordinates, i.e. after undoing any variance-normalization scale).
pub fn qam_slice(x: Complex64, order: usize) -> Complex64 {
    let half = (order.trailing_zeros() as usize) / 2;
    let norm = qam_norm(order);
    let mut bits = Vec::with_capacity(2 * half);
    pam_detect((x * norm).re, half, &mut bits);
    pam_detect((x * norm).im, half, &mut bits);
    let re = pam_level(&bits[..half]) / norm;
    let im = pam_level(&bits[half..]) / norm;
    Complex64::new(re, im)
}

// --- OFDM baseband ----------------------------------------------------------

/// Real OFDM baseband x[n] = (1/N) sum_q X[q] e^{j2pi qn/N}, rescaled to
/// unit variance per the configured [`Normalization`].
///
/// Returns the block and the scale factor that was applied to the raw
/// inverse DFT. Rejects frames whose inverse DFT has relative imaginary
/// residue above 1e-9.
pub fn ofdm_real_baseband(frame: &SubcarrierFrame) -> Result<RealBaseband> {
    let cfg = &frame.config;
    let raw = dsp::ifft(&frame.values);
    let peak = raw.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    if peak == 0.0 {
        return Ok(RealBaseband { samples: vec![0.0; cfg.n_fft], scale: 1.0 });
    }
    let residue = raw.iter().map(|v| v.im.abs()).fold(0.0f64, f64::max) / peak;
    if residue > HERMITIAN_TOL {
        return Err(Error::HermitianViolation { residue });
    }
    let scale = match cfg.normalization {
        Normalization::PerBlock => {
            let var = raw.iter().map(|v| v.re * v.re).sum::<f64>() / cfg.n_fft as f64;
            1.0 / var.sqrt()
        }
        Normalization::Ensemble => {
            // E|x[n]|^2 = 2 * n_active / N^2 for unit-energy constellations
            cfg.n_fft as f64 / (2.0 * cfg.active_band.len() as f64).sqrt()
        }
    };
    Ok(RealBaseband { samples: raw.iter().map(|v| v.re * scale).collect(), scale })
}

// --- Modulators -------------------------------------------------------------

/// Margin to the per-sample phase-increment aliasing bound, in radians:
/// pi - max_n |2 pi T_s m f_delta x[n]|. Positive means safe.
pub fn aliasing_margin(x: &[f64], p: &FmParams, sample_interval: f64) -> f64 {
    let peak = x.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    PI - TAU * sample_interval * p.deviation() * peak
}

/// FM-OFDM modulator: phase is the running (inclusive) cumulative sum of the
/// instantaneous frequency drive f[n] = m f_delta x[n].
///
/// The inclusive sum together with sum_n x[n] = 0 (X[0] = 0) makes the block
/// exactly phase-circular, so cyclic extension introduces no phase jump.
/// Blocks violating the aliasing bound are rejected.
pub fn fm_modulate(x: &[f64], p: &FmParams, sample_interval: f64) -> Result<ComplexSignal> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let margin = aliasing_margin(x, p, sample_interval);
    if margin <= 0.0 {
        return Err(Error::Aliasing { excess: -margin });
    }
    let step = TAU * sample_interval * p.deviation();
    let mut phase = p.initial_phase;
    let samples = x
        .iter()
        .map(|&v| {
            phase += step * v;
            Complex64::from_polar(p.amplitude, phase)
        })
        .collect();
    ComplexSignal::new(samples, sample_interval)
}

/// CE-OFDM modulator: direct phase modulation A e^{j 2 pi m x[n]}, no
/// integration.
pub fn ce_ofdm_modulate(x: &[f64], p: &FmParams, sample_interval: f64) -> Result<ComplexSignal> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let samples = x
        .iter()
        .map(|&v| Complex64::from_polar(p.amplitude, p.initial_phase + TAU * p.mod_index * v))
        .collect();
    ComplexSignal::new(samples, sample_interval)
}

/// CP-OFDM modulator: inverse DFT of the frame with cyclic prefix attached.
pub fn cp_ofdm_modulate(frame: &SubcarrierFrame) -> Result<ComplexSignal> {
    let cfg = &frame.config;
    let body = ComplexSignal::new(dsp::ifft(&frame.values), cfg.sample_interval())?;
    cyclic_prefix(&body, cfg.n_cp, CpMode::Add)
}

/// Cyclic-prefix direction for [`cyclic_prefix`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpMode {
    Add,
    Remove,
}

/// Prepend (Add) or strip (Remove) an `n_cp`-sample cyclic prefix.
pub fn cyclic_prefix(sig: &ComplexSignal, n_cp: usize, mode: CpMode) -> Result<ComplexSignal> {
    match mode {
        CpMode::Add => {
            if n_cp > sig.len() {
                return Err(Error::LengthMismatch { expected: n_cp, got: sig.len() });
            }
            let mut samples = Vec::with_capacity(sig.len() + n_cp);
            samples.extend_from_slice(&sig.samples[sig.len() - n_cp..]);
            samples.extend_from_slice(&sig.samples);
            ComplexSignal::new(samples, sig.sample_interval)
        }
        CpMode::Remove => {
            if sig.len() <= n_cp {
                return Err(Error::LengthMismatch { expected: n_cp + 1, got: sig.len() });
            }
            ComplexSignal::new(sig.samples[n_cp..].to_vec(), sig.sample_interval)
        }
    }
}

// --- Diagnostics ------------------------------------------------------------

/// Peak-to-average power ratio in dB.
pub fn papr_db(sig: &ComplexSignal) -> Result<f64> {
    let mean = sig.power();
    if mean == 0.0 {
        return Err(Error::ZeroPower);
    }
    let peak = sig.samples.iter().map(|s| s.norm_sqr()).fold(0.0f64, f64::max);
    Ok(10.0 * (peak / mean).log10())
}

/// 99%-energy one-sided bandwidth of a real sequence, from its periodogram.
pub fn baseband_bandwidth_99(x: &[f64], sample_rate: f64) -> f64 {
    let n = x.len();
    let spec = dsp::fft(&x.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>());
    // one-sided: bins 0..=N/2, doubling interior bins (real input)
    let half = n / 2;
    let mut energy = vec![0.0; half + 1];
    energy[0] = spec[0].norm_sqr();
    for k in 1..half {
        energy[k] = spec[k].norm_sqr() + spec[n - k].norm_sqr();
    }
    energy[half] = spec[half].norm_sqr();
    let total: f64 = energy.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (k, e) in energy.iter().enumerate() {
        acc += e;
        if acc >= 0.99 * total {
            return k as f64 * sample_rate / n as f64;
        }
    }
    half as f64 * sample_rate / n as f64
}

/// Carson-like occupied-bandwidth estimate B_99 = 2 (B_x + eta m f_delta),
/// with B_x measured as the 99%-energy one-sided bandwidth of the drive.
pub fn occupied_bandwidth(x: &[f64], p: &FmParams, eta: f64, sample_rate: f64) -> f64 {
    let b_x = baseband_bandwidth_99(x, sample_rate);
    2.0 * (b_x + eta * p.deviation())
}
