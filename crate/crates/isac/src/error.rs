use thiserror::Error;

/// Errors raised by the simulation chain.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("expected {expected} bits, got {got}")]
    BitCount { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("frame violates Hermitian symmetry (imaginary residue {residue:.3e})")]
    HermitianViolation { residue: f64 },

    #[error("per-sample phase increment exceeds the aliasing bound by {excess:.3} rad")]
    Aliasing { excess: f64 },

    #[error("signal has zero power")]
    ZeroPower,

    #[error("empty input")]
    EmptyInput,

    #[error("path delay {delay} invalid for block length {block}")]
    DelayOutOfRange { delay: usize, block: usize },

    #[error("target delay {delay} samples exceeds cyclic prefix {n_cp}")]
    DelayExceedsCp { delay: usize, n_cp: usize },

    #[error("beta weights do not sum to one (residual {residual:.3e})")]
    WeightNormalization { residual: f64 },

    #[error("zero channel gain on active tone {tone}")]
    ZeroGain { tone: usize },

    #[error("requested {requested} peaks, found only {found} local maxima")]
    TooFewPeaks { requested: usize, found: usize },

    #[error("need at least {needed} slow-time symbols, got {got}")]
    TooFewSymbols { needed: usize, got: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
