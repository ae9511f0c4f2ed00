//! The banded second-order difference operator that annihilates sampled
//! sinusoids at the notch frequency.
//!
//! Row `i` of the `(K-2) x K` operator holds the stencil `[1, -2c, 1]` at
//! columns `i, i+1, i+2` with `c = cos(omega0)`. Only the stencil and `K`
//! are stored.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest `K` for which [`DifferenceOperator::to_dense`] will materialize.
pub const DENSE_OPERATOR_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferenceOperator {
    len: usize,
    c: f64,
}

impl DifferenceOperator {
    pub fn new(len: usize, omega0: f64) -> Result<Self> {
        if len < 3 {
            return Err(Error::InvalidLength(format!(
                "the difference operator needs K >= 3 samples, got {len}"
            )));
        }
        if !(omega0.is_finite() && omega0 > 0.0 && omega0 < PI) {
            return Err(Error::InvalidFrequency(format!("omega0 = {omega0} is outside (0, pi)")));
        }
        Ok(Self { len, c: omega0.cos() })
    }

    /// Number of columns, `K`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of rows, `K - 2`.
    pub fn rows(&self) -> usize {
        self.len - 2
    }

    /// `cos(omega0)`.
    pub fn cos_omega0(&self) -> f64 {
        self.c
    }

    pub fn stencil(&self) -> [f64; 3] {
        [1.0, -2.0 * self.c, 1.0]
    }

    /// `r_i = p_{i+2} - 2c p_{i+1} + p_i` for `i = 0..K-2`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        if p.len() != self.len {
            return Err(Error::Dimension {
                expected: self.len,
                found: p.len(),
            });
        }
        let two_c = 2.0 * self.c;
        Ok(p.windows(3).map(|w| w[2] - two_c * w[1] + w[0]).collect())
    }

    /// Transposed product `H^T r`, `r` of length `K - 2`.
    pub fn apply_transpose(&self, r: &[f64]) -> Result<Vec<f64>> {
        if r.len() != self.rows() {
            return Err(Error::Dimension {
                expected: self.rows(),
                found: r.len(),
            });
        }
        let [h0, h1, h2] = self.stencil();
        let mut out = vec![0.0; self.len];
        for (i, &ri) in r.iter().enumerate() {
            out[i] += h0 * ri;
            out[i + 1] += h1 * ri;
            out[i + 2] += h2 * ri;
        }
        Ok(out)
    }

    /// Row-major dense copy, for small test oracles only.
    pub fn to_dense(&self) -> Result<Vec<Vec<f64>>> {
        if self.len > DENSE_OPERATOR_LIMIT {
            return Err(Error::Size {
                what: "dense difference operator",
                size: self.len,
                limit: DENSE_OPERATOR_LIMIT,
            });
        }
        let stencil = self.stencil();
        Ok((0..self.rows())
            .map(|i| {
                let mut row = vec![0.0; self.len];
                row[i..i + 3].copy_from_slice(&stencil);
                row
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_at_seventy_two_degrees() {
        let h = DifferenceOperator::new(5, 2.0 * PI / 5.0).unwrap();
        assert_eq!(h.rows(), 3);
        assert_eq!(h.len(), 5);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let [a, b, c] = h.stencil();
        assert_eq!((a, c), (1.0, 1.0));
        assert!((b + golden).abs() < 1e-15);
        assert!((b + 0.618034).abs() < 1e-6);
    }

    #[test]
    fn minimal_and_too_short() {
        assert_eq!(DifferenceOperator::new(3, 1.0).unwrap().rows(), 1);
        assert!(matches!(DifferenceOperator::new(2, 1.0), Err(Error::InvalidLength(_))));
        assert!(matches!(DifferenceOperator::new(10, 0.0), Err(Error::InvalidFrequency(_))));
        assert!(matches!(DifferenceOperator::new(10, PI), Err(Error::InvalidFrequency(_))));
    }

    #[test]
    fn residual_examples() {
        let h = DifferenceOperator::new(6, PI / 2.0).unwrap();
        let r = h.apply(&[1.0; 6]).unwrap();
        assert!(r.iter().all(|&v| (v - 2.0).abs() < 1e-15));

        let h = DifferenceOperator::new(4, PI / 3.0).unwrap();
        let r = h.apply(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(r.len(), 2);
        // stencil [1, -1, 1]
        assert!((r[0] - 1.0).abs() < 1e-12 && (r[1] - 2.0).abs() < 1e-12, "{r:?}");

        assert!(matches!(h.apply(&[1.0; 5]), Err(Error::Dimension { expected: 4, found: 5 })));
    }

    #[test]
    fn sinusoid_is_annihilated() {
        let omega0 = 2.0 * PI * 50.0 / 250.0;
        let h = DifferenceOperator::new(100, omega0).unwrap();
        for &(amp, theta) in &[(1.0, 0.0), (3.5, 0.3), (1e-3, 2.9)] {
            let p: Vec<f64> = (0..100).map(|k| amp * (omega0 * k as f64 + theta).sin()).collect();
            let r = h.apply(&p).unwrap();
            let peak = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(r.iter().all(|v| v.abs() < 1e-10 * peak));
        }
    }

    #[test]
    fn transpose_matches_dense() {
        let h = DifferenceOperator::new(7, 0.9).unwrap();
        let dense = h.to_dense().unwrap();
        let r = [0.5, -1.0, 2.0, 0.25, 3.0];
        let got = h.apply_transpose(&r).unwrap();
        for j in 0..7 {
            let want: f64 = (0..5).map(|i| dense[i][j] * r[i]).sum();
            assert!((got[j] - want).abs() < 1e-14);
        }
        assert!(DifferenceOperator::new(65, 0.9).unwrap().to_dense().is_err());
    }
}
