//! Symmetric pentadiagonal matrices and their banded Cholesky factorization.
//!
//! `I + gamma H^T H` has bandwidth 2 whatever `K` is, so factoring and
//! solving cost `O(K)` time and memory.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::DifferenceOperator;

/// Symmetric matrix with non-zeros on the main diagonal and the first two
/// super/sub-diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Pentadiagonal {
    /// `A[i][i]`, length `n`.
    pub diag: Vec<f64>,
    /// `A[i][i+1]`, length `n - 1`.
    pub off1: Vec<f64>,
    /// `A[i][i+2]`, length `n - 2` (saturating).
    pub off2: Vec<f64>,
}

impl Pentadiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off1: vec![0.0; n.saturating_sub(1)],
            off2: vec![0.0; n.saturating_sub(2)],
        }
    }

    /// `H^T H` for the given operator.
    pub fn gram(op: &DifferenceOperator) -> Self {
        let h = op.stencil();
        let mut m = Self::zeros(op.len());
        for r in 0..op.rows() {
            for a in 0..3 {
                m.diag[r + a] += h[a] * h[a];
                if a < 2 {
                    m.off1[r + a] += h[a] * h[a + 1];
                }
            }
            m.off2[r] += h[0] * h[2];
        }
        m
    }

    /// `I + gamma H^T H`.
    pub fn regularized(op: &DifferenceOperator, gamma: f64) -> Self {
        let mut m = Self::gram(op);
        m.diag.iter_mut().for_each(|d| *d = 1.0 + gamma * *d);
        m.off1.iter_mut().for_each(|v| *v *= gamma);
        m.off2.iter_mut().for_each(|v| *v *= gamma);
        m
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: x.len(),
            });
        }
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..self.off1.len() {
            y[i] += self.off1[i] * x[i + 1];
            y[i + 1] += self.off1[i] * x[i];
        }
        for i in 0..self.off2.len() {
            y[i] += self.off2[i] * x[i + 2];
            y[i + 2] += self.off2[i] * x[i];
        }
        Ok(y)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &v) in self.off1.iter().enumerate() {
            m[(i, i + 1)] = v;
            m[(i + 1, i)] = v;
        }
        for (i, &v) in self.off2.iter().enumerate() {
            m[(i, i + 2)] = v;
            m[(i + 2, i)] = v;
        }
        m
    }
}

/// Lower-triangular banded factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    /// `L[i][i]`
    l0: Vec<f64>,
    /// `L[i][i-1]`, index 0 unused.
    l1: Vec<f64>,
    /// `L[i][i-2]`, indices 0 and 1 unused.
    l2: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(a: &Pentadiagonal) -> Result<Self> {
        let n = a.dim();
        let mut l0 = vec![0.0; n];
        let mut l1 = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        for i in 0..n {
            if i >= 2 {
                l2[i] = a.off2[i - 2] / l0[i - 2];
            }
            if i >= 1 {
                l1[i] = (a.off1[i - 1] - l2[i] * l1[i - 1]) / l0[i - 1];
            }
            let pivot = a.diag[i] - l1[i] * l1[i] - l2[i] * l2[i];
            if pivot.is_nan() || pivot <= 0.0 {
                return Err(Error::Internal(format!(
                    "matrix is not positive definite (pivot {pivot} at row {i})"
                )));
            }
            l0[i] = pivot.sqrt();
        }
        Ok(Self { l0, l1, l2 })
    }

    pub fn dim(&self) -> usize {
        self.l0.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        let n = self.dim();
        if b.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: b.len(),
            });
        }
        // L z = b
        for i in 0..n {
            let mut v = b[i];
            if i >= 1 {
                v -= self.l1[i] * b[i - 1];
            }
            if i >= 2 {
                v -= self.l2[i] * b[i - 2];
            }
            b[i] = v / self.l0[i];
        }
        // L^T x = z
        for i in (0..n).rev() {
            let mut v = b[i];
            if i + 1 < n {
                v -= self.l1[i + 1] * b[i + 1];
            }
            if i + 2 < n {
                v -= self.l2[i + 2] * b[i + 2];
            }
            b[i] = v / self.l0[i];
        }
        Ok(())
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }
}
