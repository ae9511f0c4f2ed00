//! Conventional causal second-order IIR notch, used as the comparison
//! baseline, and a transient-energy metric.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::types::SignalVector;

/// Second-order notch section, `a0` normalized to 1:
///
/// ```text
/// y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiquadNotch {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
    pub f0_hz: f64,
    pub fs_hz: f64,
    pub q_factor: f64,
}

/// Bilinear-transform notch with -3 dB bandwidth `f0 / q` (the recipe of
/// the common `iirnotch` design routines).
pub fn design_iir_notch(f0_hz: f64, fs_hz: f64, q_factor: f64) -> Result<BiquadNotch> {
    if !(fs_hz.is_finite() && fs_hz > 0.0 && f0_hz.is_finite() && f0_hz > 0.0 && f0_hz < fs_hz / 2.0) {
        return Err(Error::Parameter(format!(
            "notch frequency {f0_hz} Hz must lie in (0, fs/2) for fs = {fs_hz} Hz"
        )));
    }
    // Normalized to Nyquist; the notch width must stay below Nyquist too.
    let w0 = 2.0 * f0_hz / fs_hz;
    if !(q_factor.is_finite() && q_factor > w0) {
        return Err(Error::Parameter(format!(
            "Q = {q_factor} is too small for a {f0_hz} Hz notch at fs = {fs_hz} Hz (needs Q > {w0})"
        )));
    }
    let bw = PI * w0 / q_factor;
    let w0 = PI * w0;
    // gain 1/sqrt(2) at the band edges makes sqrt(1 - gb^2) / gb == 1
    let beta = (bw / 2.0).tan();
    let gain = 1.0 / (1.0 + beta);
    let c = w0.cos();
    Ok(BiquadNotch {
        b0: gain,
        b1: -2.0 * gain * c,
        b2: gain,
        a1: -2.0 * gain * c,
        a2: 2.0 * gain - 1.0,
        f0_hz,
        fs_hz,
        q_factor,
    })
}

impl BiquadNotch {
    /// `|H(e^{jw})|` at `omega` radians/sample.
    pub fn magnitude(&self, omega: f64) -> f64 {
        let (c1, s1) = (omega.cos(), omega.sin());
        let (c2, s2) = ((2.0 * omega).cos(), (2.0 * omega).sin());
        let num_re = self.b0 + self.b1 * c1 + self.b2 * c2;
        let num_im = -(self.b1 * s1 + self.b2 * s2);
        let den_re = 1.0 + self.a1 * c1 + self.a2 * c2;
        let den_im = -(self.a1 * s1 + self.a2 * s2);
        num_re.hypot(num_im) / den_re.hypot(den_im)
    }

    /// Largest pole magnitude of `1 + a1 z^-1 + a2 z^-2`.
    pub fn pole_radius(&self) -> f64 {
        let disc = self.a1 * self.a1 - 4.0 * self.a2;
        if disc < 0.0 {
            self.a2.sqrt()
        } else {
            let r = disc.sqrt();
            ((-self.a1 + r) / 2.0).abs().max(((-self.a1 - r) / 2.0).abs())
        }
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.f0_hz / self.fs_hz
    }

    /// Runs the recursion over a slice with zero initial state.
    pub fn filter_slice(&self, x: &[f64]) -> Vec<f64> {
        // transposed direct form II
        let (mut z1, mut z2) = (0.0, 0.0);
        x.iter()
            .map(|&xn| {
                let yn = self.b0 * xn + z1;
                z1 = self.b1 * xn - self.a1 * yn + z2;
                z2 = self.b2 * xn - self.a2 * yn;
                yn
            })
            .collect()
    }
}

/// Causal filtering from a zero state, so the start-up ringing is visible.
pub fn filter_iir(x: &SignalVector, biquad: &BiquadNotch) -> Result<SignalVector> {
    if (x.fs_hz() - biquad.fs_hz).abs() > 1e-9 * biquad.fs_hz {
        return Err(Error::Parameter(format!(
            "signal sampled at {} Hz but biquad designed for {} Hz",
            x.fs_hz(),
            biquad.fs_hz
        )));
    }
    Ok(x.with_samples(biquad.filter_slice(x.samples())))
}

/// Squared error against `y_ref` over the first `window_s` seconds divided
/// by the same sum over the last `window_s` seconds.
///
/// Around 1 means no start-up transient; much larger means ringing. When
/// both sums are below `1e-20` the ratio is 1.
pub fn transient_energy(y: &SignalVector, y_ref: &SignalVector, window_s: f64) -> Result<f64> {
    if y.len() != y_ref.len() {
        return Err(Error::Dimension {
            expected: y_ref.len(),
            found: y.len(),
        });
    }
    let n = (window_s * y.fs_hz()).round();
    if !(window_s > 0.0 && n >= 1.0 && n as usize <= y.len()) {
        return Err(Error::Parameter(format!(
            "window of {window_s} s does not fit a {:.3} s record",
            y.duration_s()
        )));
    }
    let n = n as usize;
    let sq = |range: std::ops::Range<usize>| -> f64 {
        y.samples()[range.clone()]
            .iter()
            .zip(&y_ref.samples()[range])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    };
    let head = sq(0..n);
    let tail = sq(y.len() - n..y.len());
    if head < 1e-20 && tail < 1e-20 {
        return Ok(1.0);
    }
    Ok(head / tail)
}
