//! Regularized least-squares powerline estimation.
//!
//! The powerline estimate solves `(I + gamma H^T H) p = x` and the denoised
//! output is `y = x - p`. Three interchangeable backends compute it:
//!
//! * [`Backend::Banded`] (default): banded Cholesky of the pentadiagonal
//!   system, `O(K)` time and memory.
//! * [`Backend::Dense`]: dense Cholesky, capped at [`DENSE_LIMIT`] samples.
//!   Kept as an oracle and for small jobs.
//! * [`Backend::Spectral`]: eigendecomposition `H^T H = V diag(sigma^2) V^T`
//!   with per-mode gains `1 / (1 + gamma sigma^2)`, capped at
//!   [`SPECTRAL_LIMIT`] samples.
//!
//! The two null-space modes of `H` (`sigma = 0`) carry gain exactly 1 in the
//! spectral form. Assigning them gain 0 instead does not reproduce the
//! inverse; see [`crate::spectral::NullModeGain`].

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::banded::{BandedCholesky, Pentadiagonal};
use crate::error::{Error, Result};
use crate::operator::DifferenceOperator;
use crate::spectral::{NullModeGain, SpectralDecomposition};
use crate::types::{NotchSpec, SignalVector};

/// Largest record the dense backend accepts.
pub const DENSE_LIMIT: usize = 4096;
/// Largest record the spectral backend accepts.
pub const SPECTRAL_LIMIT: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    Dense,
    #[default]
    Banded,
    Spectral,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Dense, Backend::Banded, Backend::Spectral];

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Dense => "dense",
            Backend::Banded => "banded",
            Backend::Spectral => "spectral",
        }
    }

    /// Maximum supported record length, if any.
    pub fn size_limit(&self) -> Option<usize> {
        match self {
            Backend::Dense => Some(DENSE_LIMIT),
            Backend::Banded => None,
            Backend::Spectral => Some(SPECTRAL_LIMIT),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(Backend::Dense),
            "banded" => Ok(Backend::Banded),
            "spectral" => Ok(Backend::Spectral),
            other => Err(Error::Usage(format!(
                "unknown backend '{other}' (expected dense, banded or spectral)"
            ))),
        }
    }
}

/// Powerline estimate `p*` and denoised output `y = x - p*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClsResult {
    pub p_star: SignalVector,
    pub y: SignalVector,
    pub backend: Backend,
}

/// Precomputed banded solver for a fixed record length and notch design.
///
/// The filter coefficients do not depend on the data, so one factorization
/// serves any number of equal-length records.
#[derive(Debug, Clone)]
pub struct BandedClsFilter {
    op: DifferenceOperator,
    gamma: f64,
    factor: BandedCholesky,
}

impl BandedClsFilter {
    pub fn new(len: usize, spec: &NotchSpec) -> Result<Self> {
        let op = DifferenceOperator::new(len, spec.omega0())?;
        let factor = BandedCholesky::factor(&Pentadiagonal::regularized(&op, spec.gamma()))?;
        Ok(Self {
            op,
            gamma: spec.gamma(),
            factor,
        })
    }

    pub fn len(&self) -> usize {
        self.op.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Returns `(p*, y)`.
    ///
    /// Solves for `y = (I + gamma H^T H)^{-1} gamma H^T H x` and sets
    /// `p* = x - y`. This is algebraically the same system; it keeps the
    /// output of a notch-frequency sinusoid at rounding level of `H x`
    /// rather than of `x`.
    pub fn apply(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let hx = self.op.apply(x)?;
        let mut y = self.op.apply_transpose(&hx)?;
        y.iter_mut().for_each(|v| *v *= self.gamma);
        self.factor.solve_in_place(&mut y)?;
        let p = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        Ok((p, y))
    }
}

fn check_len(x: &SignalVector) -> Result<()> {
    if x.len() < 3 {
        return Err(Error::InvalidLength(format!(
            "least-squares notch needs at least 3 samples, got {}",
            x.len()
        )));
    }
    Ok(())
}

fn check_rate(x: &SignalVector, spec: &NotchSpec) -> Result<()> {
    if (x.fs_hz() - spec.fs_hz()).abs() > 1e-9 * spec.fs_hz() {
        return Err(Error::Parameter(format!(
            "signal sampled at {} Hz but notch designed for {} Hz",
            x.fs_hz(),
            spec.fs_hz()
        )));
    }
    Ok(())
}

fn finish(x: &SignalVector, p: Vec<f64>, y: Vec<f64>, backend: Backend) -> Result<ClsResult> {
    if p.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(Error::Internal(format!("{backend} backend produced non-finite values")));
    }
    Ok(ClsResult {
        p_star: x.with_samples(p),
        y: x.with_samples(y),
        backend,
    })
}

/// Dense Cholesky factor of `I + gamma H^T H`, reusable across inputs.
#[derive(Debug, Clone)]
pub struct DenseClsFilter {
    chol: Cholesky<f64, Dyn>,
}

impl DenseClsFilter {
    pub fn new(len: usize, spec: &NotchSpec) -> Result<Self> {
        if len > DENSE_LIMIT {
            return Err(Error::Size {
                what: "dense backend",
                size: len,
                limit: DENSE_LIMIT,
            });
        }
        let op = DifferenceOperator::new(len, spec.omega0())?;
        let chol = Pentadiagonal::regularized(&op, spec.gamma())
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::Internal("dense system is not positive definite".into()))?;
        Ok(Self { chol })
    }

    pub fn len(&self) -> usize {
        self.chol.l_dirty().nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Returns `(p*, y)` with `p*` solved directly and `y = x - p*`.
    pub fn apply(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: x.len(),
            });
        }
        let p: Vec<f64> = self.chol.solve(&DVector::from_column_slice(x)).iter().copied().collect();
        let y = x.iter().zip(&p).map(|(a, b)| a - b).collect();
        Ok((p, y))
    }
}

/// Dense symmetric solve of `(I + gamma H^T H) p = x`.
pub fn solve_cls_dense(x: &SignalVector, spec: &NotchSpec) -> Result<ClsResult> {
    check_len(x)?;
    check_rate(x, spec)?;
    let (p, y) = DenseClsFilter::new(x.len(), spec)?.apply(x.samples())?;
    finish(x, p, y, Backend::Dense)
}

/// Banded Cholesky solve, `O(K)`.
pub fn solve_cls_banded(x: &SignalVector, spec: &NotchSpec) -> Result<ClsResult> {
    check_len(x)?;
    check_rate(x, spec)?;
    let (p, y) = BandedClsFilter::new(x.len(), spec)?.apply(x.samples())?;
    finish(x, p, y, Backend::Banded)
}

/// Eigenbasis reconstruction `p* = V diag(1 / (1 + gamma sigma^2)) V^T x`.
pub fn solve_cls_spectral(x: &SignalVector, spec: &NotchSpec) -> Result<ClsResult> {
    check_len(x)?;
    check_rate(x, spec)?;
    let decomposition = SpectralDecomposition::new(x.len(), spec.omega0())?;
    let y = decomposition.notch_output(x.samples(), spec.gamma(), NullModeGain::Unity)?;
    let p = x.samples().iter().zip(&y).map(|(a, b)| a - b).collect();
    finish(x, p, y, Backend::Spectral)
}

/// Filters `x` with the chosen backend, returning both `p*` and `y`.
pub fn notch_filter_cls(x: &SignalVector, spec: &NotchSpec, backend: Backend) -> Result<ClsResult> {
    match backend {
        Backend::Dense => solve_cls_dense(x, spec),
        Backend::Banded => solve_cls_banded(x, spec),
        Backend::Spectral => solve_cls_spectral(x, spec),
    }
}

/// Regularization weight whose notch is `bw_hz` wide at -3 dB.
///
/// The band edge `omega_e = 2 pi (f0 + bw/2) / fs` is placed where the
/// notch gain `G = 4 gamma d^2 / (1 + 4 gamma d^2)`, `d = cos(omega_e) -
/// cos(omega0)`, equals `1/sqrt(2)`, which gives
/// `gamma = (1 + sqrt(2)) / (4 d^2)`.
pub fn gamma_from_bandwidth(f0_hz: f64, fs_hz: f64, bw_hz: f64) -> Result<f64> {
    if !(bw_hz.is_finite() && bw_hz > 0.0) {
        return Err(Error::InvalidFrequency(format!("bandwidth must be positive, got {bw_hz}")));
    }
    let lo = f0_hz - bw_hz / 2.0;
    let hi = f0_hz + bw_hz / 2.0;
    if !(fs_hz > 0.0 && lo > 0.0 && hi < fs_hz / 2.0) {
        return Err(Error::InvalidFrequency(format!(
            "band [{lo}, {hi}] Hz is not inside (0, {}) Hz",
            fs_hz / 2.0
        )));
    }
    let omega0 = 2.0 * std::f64::consts::PI * f0_hz / fs_hz;
    let omega_edge = 2.0 * std::f64::consts::PI * hi / fs_hz;
    let d = omega_edge.cos() - omega0.cos();
    Ok((1.0 + std::f64::consts::SQRT_2) / (4.0 * d * d))
}

/// Gamma giving a 1 Hz wide notch, used when no weight is specified.
pub fn default_gamma(f0_hz: f64, fs_hz: f64) -> Result<f64> {
    gamma_from_bandwidth(f0_hz, fs_hz, 1.0)
}

/// Explicit `(I + gamma H^T H)^{-1}` by dense inversion. Test oracle, `K <= 64`.
pub fn explicit_inverse(len: usize, spec: &NotchSpec) -> Result<DMatrix<f64>> {
    if len > crate::operator::DENSE_OPERATOR_LIMIT {
        return Err(Error::Size {
            what: "explicit inverse",
            size: len,
            limit: crate::operator::DENSE_OPERATOR_LIMIT,
        });
    }
    let op = DifferenceOperator::new(len, spec.omega0())?;
    Pentadiagonal::regularized(&op, spec.gamma())
        .to_dense()
        .try_inverse()
        .ok_or_else(|| Error::Internal("regularized matrix is singular".into()))
}
