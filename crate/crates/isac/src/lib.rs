//! FM-OFDM integrated sensing and communication (ISAC) simulator.
//!
//! This crate implements a constant-envelope FM-OFDM transceiver chain
//! end-to-end, together with CP-OFDM and CE-OFDM baselines:
//!
//! - [`waveform`]: QAM subcarrier mapping with Hermitian symmetry, real OFDM
//!   baseband synthesis, FM / CE / CP modulators, PAPR and occupied-bandwidth
//!   diagnostics.
//! - [`channel`]: blockwise-circular time-varying multipath, Rayleigh path
//!   sampling with Jakes Doppler, radar point-target echoes, seeded AWGN.
//! - [`fm_rx`]: limiter-discriminator receiver with block de-meaning CFO
//!   suppression, effective-channel construction (diagonal + ICI), one-tap
//!   equalization, and the phasor-sum beta-weight model.
//! - [`radar`]: matched-filter range compression, noncoherent integration,
//!   slow-time phase-difference Doppler estimation, range-Doppler maps, and
//!   resolution / CRB calculators.
//! - [`metrics`]: BER and RMSE scoring with confidence intervals.
//! - [`harness`]: seeded Monte Carlo scenarios, CSV and PGM export, and the
//!   configuration surface behind the `isac` binary.
//!
//! Every operation is a pure function of its inputs; stochastic operations
//! take explicit seeds, so results are reproducible regardless of worker
//! count. See the crate examples for runnable walkthroughs of each
//! capability.

pub mod channel;
mod dsp;
mod error;
pub mod fm_rx;
pub mod harness;
pub mod metrics;
pub mod radar;
pub mod waveform;

pub use error::Error;

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub type Result<T> = std::result::Result<T, Error>;
