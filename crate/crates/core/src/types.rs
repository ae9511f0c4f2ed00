//! Signal and notch-design value types.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A finite, real-valued sample sequence together with its sampling rate.
///
/// Samples are stored 0-based; sample `k` here corresponds to the 1-based
/// index `k + 1` of the measurement model `x_k = s_k + p_k, k = 1..K`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalVector {
    samples: Vec<f64>,
    fs_hz: f64,
}

impl SignalVector {
    pub fn new(samples: Vec<f64>, fs_hz: f64) -> Result<Self> {
        if !(fs_hz.is_finite() && fs_hz > 0.0) {
            return Err(Error::Parameter(format!("sampling rate must be positive and finite, got {fs_hz}")));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!("sample {i} is not finite ({})", samples[i])));
        }
        Ok(Self { samples, fs_hz })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.fs_hz
    }

    /// Builds a sibling vector with the same sampling rate. The caller
    /// guarantees finiteness (results of finite arithmetic on finite input).
    pub(crate) fn with_samples(&self, samples: Vec<f64>) -> Self {
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        Self {
            samples,
            fs_hz: self.fs_hz,
        }
    }
}

/// Notch design parameters: notch frequency, sampling rate and the
/// regularization weight `gamma` (the inverse of the Lagrange multiplier).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchSpec {
    f0_hz: f64,
    fs_hz: f64,
    gamma: f64,
    omega0: f64,
}

impl NotchSpec {
    pub fn new(f0_hz: f64, fs_hz: f64, gamma: f64) -> Result<Self> {
        if !(fs_hz.is_finite() && fs_hz > 0.0) {
            return Err(Error::InvalidFrequency(format!("sampling rate must be positive, got {fs_hz}")));
        }
        if !(f0_hz.is_finite() && f0_hz > 0.0 && f0_hz < fs_hz / 2.0) {
            return Err(Error::InvalidFrequency(format!(
                "notch frequency {f0_hz} Hz must lie strictly between 0 and fs/2 = {} Hz",
                fs_hz / 2.0
            )));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Parameter(format!("gamma must be finite and non-negative, got {gamma}")));
        }
        Ok(Self {
            f0_hz,
            fs_hz,
            gamma,
            omega0: 2.0 * PI * f0_hz / fs_hz,
        })
    }

    pub fn f0_hz(&self) -> f64 {
        self.f0_hz
    }

    pub fn fs_hz(&self) -> f64 {
        self.fs_hz
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Notch frequency in radians per sample, `2π f0 / fs`.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Same notch, different regularization weight.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        Self::new(self.f0_hz, self.fs_hz, gamma)
    }

    /// Converts radians/sample to Hz at this sampling rate.
    pub fn omega_to_hz(&self, omega: f64) -> f64 {
        omega * self.fs_hz / (2.0 * PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega0_from_frequency_pair() {
        let spec = NotchSpec::new(50.0, 250.0, 1.0).unwrap();
        assert!((spec.omega0() - 0.4 * PI).abs() < 1e-15);
        assert!((spec.omega_to_hz(spec.omega0()) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_band_notch() {
        assert!(matches!(NotchSpec::new(125.0, 250.0, 1.0), Err(Error::InvalidFrequency(_))));
        assert!(matches!(NotchSpec::new(0.0, 250.0, 1.0), Err(Error::InvalidFrequency(_))));
        assert!(matches!(NotchSpec::new(50.0, 250.0, -1.0), Err(Error::Parameter(_))));
        assert!(matches!(NotchSpec::new(50.0, 250.0, f64::INFINITY), Err(Error::Parameter(_))));
    }

    #[test]
    fn rejects_non_finite_samples() {
        let err = SignalVector::new(vec![1.0, f64::NAN, 2.0], 100.0).unwrap_err();
        assert!(matches!(err, Error::InvalidData(_)));
        assert!(SignalVector::new(vec![1.0], 0.0).is_err());
    }
}
