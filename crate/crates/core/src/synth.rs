//! Deterministic test-signal generators.
//!
//! Generators index samples from `k = 1`, so sample `k` of a generated
//! record (0-based position `k - 1`) sits at time `k / fs`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::types::SignalVector;

/// `A sin(omega0 k + theta)` for `k = 1..=len`.
pub fn powerline(len: usize, amplitude: f64, theta: f64, f0_hz: f64, fs_hz: f64) -> Result<SignalVector> {
    if !(amplitude.is_finite() && theta.is_finite()) {
        return Err(Error::Parameter("amplitude and phase must be finite".into()));
    }
    if !(fs_hz > 0.0 && f0_hz > 0.0 && f0_hz < fs_hz / 2.0) {
        return Err(Error::InvalidFrequency(format!("f0 = {f0_hz} Hz is outside (0, fs/2) for fs = {fs_hz}")));
    }
    let omega0 = 2.0 * PI * f0_hz / fs_hz;
    let samples = (1..=len).map(|k| amplitude * (omega0 * k as f64 + theta).sin()).collect();
    SignalVector::new(samples, fs_hz)
}

/// Zero-mean Gaussian noise with standard deviation `sigma`.
pub fn white_noise(len: usize, sigma: f64, fs_hz: f64, seed: u64) -> Result<SignalVector> {
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::Parameter(format!("noise level {sigma}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SignalVector::new((0..len).map(|_| normal.sample(&mut rng)).collect(), fs_hz)
}

/// Settings for [`synthetic_ecg`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EcgConfig {
    pub duration_s: f64,
    pub fs_hz: f64,
    pub hr_bpm: f64,
    pub seed: u64,
}

impl Default for EcgConfig {
    fn default() -> Self {
        Self {
            duration_s: 10.0,
            fs_hz: 250.0,
            hr_bpm: 60.0,
            seed: 0,
        }
    }
}

/// One Gaussian wave of a beat: centre offset from the R peak (s), width (s),
/// amplitude (mV).
struct Wave {
    offset: f64,
    width: f64,
    amplitude: f64,
    /// Whether the offset stretches with `sqrt(RR)` (P and T waves).
    rate_scaled: bool,
}

const WAVES: [Wave; 5] = [
    Wave { offset: -0.20, width: 0.025, amplitude: 0.12, rate_scaled: true },
    Wave { offset: -0.035, width: 0.010, amplitude: -0.12, rate_scaled: false },
    Wave { offset: 0.0, width: 0.011, amplitude: 1.0, rate_scaled: false },
    Wave { offset: 0.035, width: 0.010, amplitude: -0.25, rate_scaled: false },
    Wave { offset: 0.28, width: 0.050, amplitude: 0.30, rate_scaled: true },
];

/// Quasi-periodic sum-of-Gaussians pulse train with P-QRS-T-like beats,
/// slight beat-to-beat variability and slow baseline wander.
///
/// The narrowest wave (width 10 ms) keeps nearly all power below 40 Hz.
pub fn synthetic_ecg(cfg: &EcgConfig) -> Result<SignalVector> {
    if !(30.0..=220.0).contains(&cfg.hr_bpm) {
        return Err(Error::Parameter(format!("heart rate {} bpm is outside 30..220", cfg.hr_bpm)));
    }
    if !(cfg.duration_s.is_finite() && cfg.duration_s > 0.0 && cfg.fs_hz.is_finite() && cfg.fs_hz > 0.0) {
        return Err(Error::Parameter("duration and sampling rate must be positive".into()));
    }
    let len = (cfg.duration_s * cfg.fs_hz).round() as usize;
    if len == 0 {
        return Err(Error::Parameter("record would be empty".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let jitter = Normal::new(0.0, 1.0).expect("unit normal");
    let rr_mean = 60.0 / cfg.hr_bpm;

    let mut samples = vec![0.0; len];
    let t_end = (len + 1) as f64 / cfg.fs_hz;
    let mut beat = 0.5 * rr_mean;
    while beat < t_end + 1.0 {
        let rr = rr_mean * (1.0f64 + 0.03 * jitter.sample(&mut rng)).clamp(0.85, 1.15);
        let gain = 1.0 + 0.05 * jitter.sample(&mut rng);
        for w in &WAVES {
            let centre = beat + if w.rate_scaled { w.offset * rr.sqrt() } else { w.offset };
            let reach = 6.0 * w.width;
            let first = (((centre - reach) * cfg.fs_hz).floor().max(1.0)) as usize;
            let last = (((centre + reach) * cfg.fs_hz).ceil() as usize).min(len);
            for k in first..=last {
                let t = k as f64 / cfg.fs_hz;
                let z = (t - centre) / w.width;
                samples[k - 1] += gain * w.amplitude * (-0.5 * z * z).exp();
            }
        }
        beat += rr;
    }

    let wander_phase = rng.random_range(0.0..2.0 * PI);
    for (i, s) in samples.iter_mut().enumerate() {
        let t = (i + 1) as f64 / cfg.fs_hz;
        *s += 0.05 * (2.0 * PI * 0.25 * t + wander_phase).sin();
    }
    SignalVector::new(samples, cfg.fs_hz)
}
