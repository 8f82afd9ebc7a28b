//! Shared FFT and phase helpers.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Unscaled forward DFT, X[k] = sum_n x[n] e^{-j2pi kn/N}.
pub(crate) fn fft(x: &[Complex64]) -> Vec<Complex64> {
    let mut buf = x.to_vec();
    FftPlanner::new().plan_fft_forward(x.len()).process(&mut buf);
    buf
}

/// Inverse DFT with 1/N scaling, x[n] = (1/N) sum_k X[k] e^{+j2pi kn/N}.
pub(crate) fn ifft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    let mut buf = x.to_vec();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Standard phase unwrapping: adds multiples of 2pi so successive
/// differences stay within (-pi, pi].
pub(crate) fn unwrap(phases: &[f64]) -> Vec<f64> {
    use std::f64::consts::{PI, TAU};
    let mut out: Vec<f64> = Vec::with_capacity(phases.len());
    for (i, &p) in phases.iter().enumerate() {
        if i == 0 {
            out.push(p);
            continue;
        }
        let mut d = (p - phases[i - 1]) % TAU;
        if d > PI {
            d -= TAU;
        } else if d <= -PI {
            d += TAU;
        }
        let next = out[i - 1] + d;
        out.push(next);
    }
    out
}
