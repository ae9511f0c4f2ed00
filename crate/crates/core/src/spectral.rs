//! Frequency response of the least-squares smoother and its eigenbasis.
//!
//! Away from the record edges the smoother acts as the zero-phase filter
//!
//! ```text
//! F(w) = 1 / (1 + 4 gamma (cos w - cos w0)^2)      powerline estimate
//! G(w) = 1 - F(w)                                   notch output
//! ```
//!
//! Both are real, so the smoother has no phase or group delay.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::banded::Pentadiagonal;
use crate::cls::SPECTRAL_LIMIT;
use crate::error::{Error, Result};
use crate::operator::DifferenceOperator;
use crate::types::NotchSpec;

fn check_omega(omega: f64) -> Result<()> {
    if !(0.0..=PI).contains(&omega) {
        return Err(Error::InvalidFrequency(format!("omega = {omega} is outside [0, pi]")));
    }
    Ok(())
}

/// Gain of the powerline estimator at `omega` (radians/sample).
pub fn response_f(omega: f64, spec: &NotchSpec) -> Result<f64> {
    check_omega(omega)?;
    let d = omega.cos() - spec.omega0().cos();
    Ok(1.0 / (1.0 + 4.0 * spec.gamma() * d * d))
}

/// Gain of the notch filter at `omega`, `1 - F`.
pub fn response_g(omega: f64, spec: &NotchSpec) -> Result<f64> {
    check_omega(omega)?;
    let d = omega.cos() - spec.omega0().cos();
    let t = 4.0 * spec.gamma() * d * d;
    Ok(t / (1.0 + t))
}

/// Coefficients of `1 + gamma D(z) D(1/z)` for powers `z^-2 .. z^2`, with
/// `D(z) = 1 - 2c z^-1 + z^-2`.
pub fn smoother_polynomial(c: f64, gamma: f64) -> [f64; 5] {
    [
        gamma,
        -4.0 * c * gamma,
        1.0 + (4.0 * c * c + 2.0) * gamma,
        -4.0 * c * gamma,
        gamma,
    ]
}

/// Sampled `F` and `G` over a uniform grid on `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub omegas: Vec<f64>,
    pub f_gain: Vec<f64>,
    pub g_gain: Vec<f64>,
}

pub fn response_grid(spec: &NotchSpec, n_points: usize) -> Result<FrequencyResponse> {
    if n_points < 2 {
        return Err(Error::Parameter(format!("need at least 2 grid points, got {n_points}")));
    }
    let step = PI / (n_points - 1) as f64;
    let omegas: Vec<f64> = (0..n_points)
        .map(|i| if i + 1 == n_points { PI } else { i as f64 * step })
        .collect();
    let f_gain = omegas
        .iter()
        .map(|&w| response_f(w, spec))
        .collect::<Result<Vec<_>>>()?;
    let g_gain = f_gain.iter().map(|f| 1.0 - f).collect();
    Ok(FrequencyResponse { omegas, f_gain, g_gain })
}

/// Lower and upper -3 dB edges of the notch, radians/sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotchBandwidth {
    pub lower: f64,
    pub upper: f64,
}

impl NotchBandwidth {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn width_hz(&self, fs_hz: f64) -> f64 {
        self.width() * fs_hz / (2.0 * PI)
    }
}

/// Locates `G = 1/sqrt(2)` on each side of the notch by bisection on the
/// analytic response. An edge that is never reached is clamped to 0 or pi.
pub fn notch_bandwidth(spec: &NotchSpec) -> Result<NotchBandwidth> {
    let w0 = spec.omega0();
    let g = |w: f64| response_g(w, spec).expect("omega within [0, pi]");
    let bisect = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if g(mid) < FRAC_1_SQRT_2 {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    let upper = if g(PI) < FRAC_1_SQRT_2 { PI } else { bisect(w0, PI) };
    let lower = if g(0.0) < FRAC_1_SQRT_2 { 0.0 } else { bisect(w0, 0.0) };
    Ok(NotchBandwidth { lower, upper })
}

/// How the two null-space modes of `H` (`sigma = 0`) are weighted in the
/// eigenbasis reconstruction of `(I + gamma H^T H)^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullModeGain {
    /// `1 / (1 + gamma * 0) = 1`: reproduces the matrix inverse.
    Unity,
    /// Gain 0 on the null modes. Does not reproduce the inverse; the
    /// notch-frequency component then leaks straight into the output.
    /// Kept only for comparison.
    Zero,
}

/// Symmetric eigendecomposition `H^T H = V diag(sigma^2) V^T`, eigenvalues
/// ascending, each eigenvector signed so its first non-negligible entry is
/// positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    sigma_sq: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralDecomposition {
    pub fn new(len: usize, omega0: f64) -> Result<Self> {
        if len > SPECTRAL_LIMIT {
            return Err(Error::Size {
                what: "eigendecomposition",
                size: len,
                limit: SPECTRAL_LIMIT,
            });
        }
        let op = DifferenceOperator::new(len, omega0)?;
        let eig = SymmetricEigen::new(Pentadiagonal::gram(&op).to_dense());
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let mut vectors = DMatrix::zeros(len, len);
        let mut sigma_sq = Vec::with_capacity(len);
        for (dst, &src) in order.iter().enumerate() {
            let mut col = eig.eigenvectors.column(src).into_owned();
            let peak = col.amax();
            if let Some(first) = col.iter().find(|v| v.abs() > 1e-12 * peak) {
                if *first < 0.0 {
                    col.neg_mut();
                }
            }
            vectors.set_column(dst, &col);
            sigma_sq.push(eig.eigenvalues[src]);
        }
        Ok(Self { sigma_sq, vectors })
    }

    pub fn len(&self) -> usize {
        self.sigma_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_sq.is_empty()
    }

    /// Eigenvalues of `H^T H`, ascending. The first two are the null space.
    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    /// Eigenvectors as columns, in the order of [`Self::sigma_sq`].
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Per-mode gains of the powerline estimator.
    pub fn gains(&self, gamma: f64, null: NullModeGain) -> Vec<f64> {
        self.sigma_sq
            .iter()
            .enumerate()
            // H has full row rank, so the null space is exactly two modes;
            // their computed eigenvalues are rounding noise and are not used.
            .map(|(i, &s)| match null {
                NullModeGain::Zero if i < 2 => 0.0,
                NullModeGain::Unity if i < 2 => 1.0,
                _ => 1.0 / (1.0 + gamma * s.max(0.0)),
            })
            .collect()
    }

    /// `V diag(gains) V^T`.
    pub fn estimator_matrix(&self, gamma: f64, null: NullModeGain) -> DMatrix<f64> {
        let g = DVector::from_vec(self.gains(gamma, null));
        let scaled = DMatrix::from_fn(self.len(), self.len(), |i, j| self.vectors[(i, j)] * g[j]);
        scaled * self.vectors.transpose()
    }

    fn apply_mode_weights(&self, x: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: x.len(),
            });
        }
        let mut coeffs = self.vectors.tr_mul(&DVector::from_column_slice(x));
        coeffs.iter_mut().zip(weights).for_each(|(c, w)| *c *= w);
        Ok((&self.vectors * coeffs).iter().copied().collect())
    }

    /// Powerline estimate `V diag(gains) V^T x`.
    pub fn estimate(&self, x: &[f64], gamma: f64, null: NullModeGain) -> Result<Vec<f64>> {
        self.apply_mode_weights(x, &self.gains(gamma, null))
    }

    /// Notch output `V diag(1 - gains) V^T x`.
    pub fn notch_output(&self, x: &[f64], gamma: f64, null: NullModeGain) -> Result<Vec<f64>> {
        let weights: Vec<f64> = self.gains(gamma, null).iter().map(|g| 1.0 - g).collect();
        self.apply_mode_weights(x, &weights)
    }
}

/// One eigenmode of `H^T H` with the estimator gain it receives.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMode {
    pub vector: Vec<f64>,
    pub sigma_sq: f64,
    pub gain: f64,
}

/// The `count` lowest eigenmodes of `H^T H` for a record of `len` samples.
pub fn basis_modes(len: usize, spec: &NotchSpec, count: usize) -> Result<Vec<BasisMode>> {
    if count > len {
        return Err(Error::Parameter(format!("requested {count} modes from a {len}-sample basis")));
    }
    let dec = SpectralDecomposition::new(len, spec.omega0())?;
    let gains = dec.gains(spec.gamma(), NullModeGain::Unity);
    Ok((0..count)
        .map(|i| BasisMode {
            vector: dec.vectors().column(i).iter().copied().collect(),
            sigma_sq: dec.sigma_sq()[i],
            gain: gains[i],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(gamma: f64) -> NotchSpec {
        NotchSpec::new(50.0, 250.0, gamma).unwrap()
    }

    #[test]
    fn unit_estimate_and_zero_notch_at_omega0() {
        for gamma in [0.0, 1.0, 1e2, 1e6] {
            let s = spec(gamma);
            assert_eq!(response_f(s.omega0(), &s).unwrap(), 1.0);
            assert_eq!(response_g(s.omega0(), &s).unwrap(), 0.0);
        }
        let s = spec(0.0);
        for w in [0.0, 0.3, 2.0, PI] {
            assert_eq!(response_f(w, &s).unwrap(), 1.0);
        }
    }

    #[test]
    fn gains_at_half_cosine_offset() {
        let s = spec(100.0);
        // cos w - cos w0 = 0.5
        let w = (s.omega0().cos() + 0.5).acos();
        assert!((response_f(w, &s).unwrap() - 1.0 / 101.0).abs() < 1e-12);
        assert!((response_g(w, &s).unwrap() - 100.0 / 101.0).abs() < 1e-12);
    }

    #[test]
    fn large_gamma_passes_distant_frequencies() {
        let s = spec(1e6);
        let c0 = s.omega0().cos();
        for w in (0..=200).map(|i| i as f64 * PI / 200.0) {
            if (w.cos() - c0).abs() >= 0.1 {
                assert!(response_g(w, &s).unwrap() >= 0.99997);
            }
        }
    }

    #[test]
    fn domain_is_checked() {
        assert!(response_f(-0.1, &spec(1.0)).is_err());
        assert!(response_g(3.2, &spec(1.0)).is_err());
        assert!(response_grid(&spec(1.0), 1).is_err());
    }

    #[test]
    fn grid_sums_to_one_and_bottoms_out_near_notch() {
        let s = spec(1e3);
        let r = response_grid(&s, 257).unwrap();
        assert_eq!(r.omegas[0], 0.0);
        assert_eq!(*r.omegas.last().unwrap(), PI);
        for (f, g) in r.f_gain.iter().zip(&r.g_gain) {
            assert!((f + g - 1.0).abs() < 1e-15);
            assert!((0.0..=1.0).contains(g));
        }
        let argmin = (0..r.g_gain.len())
            .min_by(|&a, &b| r.g_gain[a].total_cmp(&r.g_gain[b]))
            .unwrap();
        let nearest = (0..r.omegas.len())
            .min_by(|&a, &b| (r.omegas[a] - s.omega0()).abs().total_cmp(&(r.omegas[b] - s.omega0()).abs()))
            .unwrap();
        assert_eq!(argmin, nearest);
    }

    #[test]
    fn bandwidth_shrinks_with_gamma() {
        let widths: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&g| notch_bandwidth(&spec(g)).unwrap().width())
            .collect();
        assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");
    }

    #[test]
    fn bandwidth_edges_sit_at_minus_three_db() {
        let s = spec(1e4);
        let bw = notch_bandwidth(&s).unwrap();
        assert!(bw.lower < s.omega0() && s.omega0() < bw.upper);
        for edge in [bw.lower, bw.upper] {
            assert!((response_g(edge, &s).unwrap() - FRAC_1_SQRT_2).abs() < 1e-9);
        }
        // tiny gamma never reaches -3 dB on either side
        let wide = notch_bandwidth(&spec(1e-3)).unwrap();
        assert_eq!((wide.lower, wide.upper), (0.0, PI));
    }

    #[test]
    fn polynomial_matches_closed_form_on_unit_circle() {
        for &c in &[-0.9, -0.3, 0.0, 0.309, 0.8] {
            let gamma = 7.5;
            let a = smoother_polynomial(c, gamma);
            for w in [0.0, 0.4, 1.3, 2.2, PI] {
                // sum_n a_n z^n with z = e^{jw}; imaginary parts cancel by symmetry
                let re: f64 = a
                    .iter()
                    .enumerate()
                    .map(|(i, an)| an * ((i as f64 - 2.0) * w).cos())
                    .sum();
                let im: f64 = a
                    .iter()
                    .enumerate()
                    .map(|(i, an)| an * ((i as f64 - 2.0) * w).sin())
                    .sum();
                let want = 1.0 + 4.0 * gamma * (w.cos() - c).powi(2);
                assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn two_null_modes_spanning_the_notch_sinusoids() {
        let s = spec(1.0);
        let modes = basis_modes(50, &s, 50).unwrap();
        let max = modes.last().unwrap().sigma_sq;
        let null = modes.iter().filter(|m| m.sigma_sq < 1e-10 * max).count();
        assert_eq!(null, 2);
        assert!(modes.windows(2).all(|w| w[0].sigma_sq <= w[1].sigma_sq));
        assert!((modes[0].gain - 1.0).abs() < 1e-9 && (modes[1].gain - 1.0).abs() < 1e-9);

        // each null eigenvector is reproduced by its projection onto sin/cos
        let basis = DMatrix::from_fn(50, 2, |i, j| {
            let arg = s.omega0() * i as f64;
            if j == 0 { arg.sin() } else { arg.cos() }
        });
        let q = basis.clone().qr().q();
        for m in &modes[..2] {
            let v = DVector::from_vec(m.vector.clone());
            let proj = &q * (q.transpose() * &v);
            let cos_angle = proj.norm() / v.norm();
            let angle = cos_angle.min(1.0).acos();
            assert!(angle < 1e-5, "angle {angle}");
        }

        for m in &modes {
            let first = m.vector.iter().find(|v| v.abs() > 1e-12).unwrap();
            assert!(*first > 0.0);
        }
    }

    #[test]
    fn basis_size_limits() {
        assert!(matches!(basis_modes(SPECTRAL_LIMIT + 1, &spec(1.0), 2), Err(Error::Size { .. })));
        assert!(basis_modes(10, &spec(1.0), 11).is_err());
    }
}
