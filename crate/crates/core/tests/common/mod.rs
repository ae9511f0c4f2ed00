#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

pub fn diff_rms(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
    rms(&d)
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `max |a - b| / max |x|`
pub fn rel_dev(a: &[f64], b: &[f64], x: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(u, v)| u - v).collect();
    max_abs(&d) / max_abs(x).max(f64::MIN_POSITIVE)
}

/// `amp * sin(omega * k + theta)`, k from 0.
pub fn sinusoid(n: usize, amp: f64, omega: f64, theta: f64) -> Vec<f64> {
    (0..n).map(|k| amp * (omega * k as f64 + theta).sin()).collect()
}

pub fn uniform(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Amplitude of the `omega` component of `v[range]`, by least-squares fit
/// of `a sin + b cos` over the range.
pub fn fitted_amplitude(v: &[f64], omega: f64, range: std::ops::Range<usize>) -> f64 {
    let (mut ss, mut sc, mut cc, mut vs, mut vc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for k in range {
        let (s, c) = (omega * k as f64).sin_cos();
        ss += s * s;
        sc += s * c;
        cc += c * c;
        vs += v[k] * s;
        vc += v[k] * c;
    }
    let det = ss * cc - sc * sc;
    let a = (vs * cc - vc * sc) / det;
    let b = (vc * ss - vs * sc) / det;
    a.hypot(b)
}

/// One-sided periodogram by direct DFT: `(frequency_hz, power)` per bin.
pub fn periodogram(v: &[f64], fs: f64) -> Vec<(f64, f64)> {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    (0..=n / 2)
        .map(|m| {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, x) in v.iter().enumerate() {
                let arg = -2.0 * std::f64::consts::PI * ((m * k) % n) as f64 / n as f64;
                re += (x - mean) * arg.cos();
                im += (x - mean) * arg.sin();
            }
            (m as f64 * fs / n as f64, re * re + im * im)
        })
        .collect()
}
