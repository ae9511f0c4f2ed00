//! Kalman tracker for powerline interference whose amplitude or phase drifts.
//!
//! State `[p_k, p_{k-1}]` evolves as a marginally stable oscillator driven
//! by a scalar process noise `w_k` entering the first component:
//!
//! ```text
//! [p_k    ]   [2c  -1] [p_{k-1}]   [1]
//! [p_{k-1}] = [1    0] [p_{k-2}] + [0] w_k,      x_k = p_k + s_k
//! ```
//!
//! The signal of interest `s_k` plays the role of measurement noise with
//! variance `r`. Real signals such as ECG are coloured, so the whiteness
//! assumption behind the filter only holds approximately.

use nalgebra::{Matrix2, RowVector2, Vector2};

use crate::cls::{notch_filter_cls, Backend};
use crate::error::{Error, Result};
use crate::types::{NotchSpec, SignalVector};

const ASYMMETRY_LIMIT: f64 = 1e-8;

/// Two-state sinusoid model with process variance `q` and measurement
/// variance `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanModel {
    c: f64,
    q: f64,
    r: f64,
}

impl KalmanModel {
    pub fn new(spec: &NotchSpec, q: f64, r: f64) -> Result<Self> {
        if !(q.is_finite() && q > 0.0) {
            return Err(Error::Parameter(format!(
                "process variance q must be positive and finite, got {q}"
            )));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::Parameter(format!(
                "measurement variance r must be positive and finite, got {r}"
            )));
        }
        Ok(Self {
            c: spec.omega0().cos(),
            q,
            r,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn transition(&self) -> Matrix2<f64> {
        Matrix2::new(2.0 * self.c, -1.0, 1.0, 0.0)
    }

    /// `G q G^T` with `G = [1, 0]^T`.
    pub fn process_cov(&self) -> Matrix2<f64> {
        Matrix2::new(self.q, 0.0, 0.0, 0.0)
    }

    pub fn observation(&self) -> RowVector2<f64> {
        RowVector2::new(1.0, 0.0)
    }

    /// Data-driven prior for the state at the first sample: the oscillator
    /// trajectory through `x_0, x_1`, i.e. `[x_0, 2c x_0 - x_1]`, with
    /// covariance `diag(r, r)`.
    pub fn default_init(&self, x: &[f64]) -> (Vector2<f64>, Matrix2<f64>) {
        let state = match x {
            [] => Vector2::zeros(),
            [x0] => Vector2::new(*x0, 0.0),
            [x0, x1, ..] => Vector2::new(*x0, 2.0 * self.c * x0 - x1),
        };
        (state, Matrix2::from_diagonal_element(self.r))
    }
}

/// Predicted and filtered moments at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepState {
    pub predicted_mean: Vector2<f64>,
    pub predicted_cov: Matrix2<f64>,
    pub filtered_mean: Vector2<f64>,
    pub filtered_cov: Matrix2<f64>,
}

/// Smoothed moments at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedState {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

/// Outcome of a forward pass, optionally refined by [`rts_smoother`].
#[derive(Debug, Clone, PartialEq)]
pub struct KalmanRun {
    pub x: SignalVector,
    /// Causal powerline estimate (first state component).
    pub p_hat: Vec<f64>,
    /// `x - p_hat`.
    pub y_filt: Vec<f64>,
    /// `x_k - H m_{k|k-1}`.
    pub innovations: Vec<f64>,
    pub steps: Vec<StepState>,
    pub p_smooth: Option<Vec<f64>>,
    pub y_smooth: Option<Vec<f64>>,
    pub smoothed: Option<Vec<SmoothedState>>,
}

impl KalmanRun {
    /// Kalman gain used at step `k`.
    pub fn gain(&self, k: usize, model: &KalmanModel) -> Vector2<f64> {
        let p = self.steps[k].predicted_cov;
        p.column(0) / (p[(0, 0)] + model.r)
    }
}

fn is_positive_definite(m: &Matrix2<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
        && (m[(0, 1)] - m[(1, 0)]).abs() <= ASYMMETRY_LIMIT * (1.0 + m.amax())
        && m.cholesky().is_some()
}

fn symmetrized(p: Matrix2<f64>, what: &str, k: usize) -> Result<Matrix2<f64>> {
    let asym = (p[(0, 1)] - p[(1, 0)]).abs();
    if asym.is_nan() || asym > ASYMMETRY_LIMIT * (1.0 + p.amax()) {
        return Err(Error::Internal(format!(
            "{what} covariance lost symmetry at step {k} (|P - P^T| = {asym:e})"
        )));
    }
    Ok((p + p.transpose()) * 0.5)
}

/// Causal Kalman pass over `x`.
///
/// `init` is the prior mean and covariance of the state at the first
/// sample; `None` selects [`KalmanModel::default_init`].
pub fn kalman_notch_filter(
    x: &SignalVector,
    spec: &NotchSpec,
    q: f64,
    r: f64,
    init: Option<(Vector2<f64>, Matrix2<f64>)>,
) -> Result<KalmanRun> {
    let model = KalmanModel::new(spec, q, r)?;
    let (mut mean, mut cov) = init.unwrap_or_else(|| model.default_init(x.samples()));
    if !is_positive_definite(&cov) {
        return Err(Error::Parameter("initial covariance must be symmetric positive definite".into()));
    }
    if mean.iter().any(|v| !v.is_finite()) {
        return Err(Error::Parameter("initial state must be finite".into()));
    }

    let f = model.transition();
    let qm = model.process_cov();
    let h = model.observation();
    let n = x.len();
    let mut steps = Vec::with_capacity(n);
    let mut p_hat = Vec::with_capacity(n);
    let mut innovations = Vec::with_capacity(n);

    for (k, &xk) in x.samples().iter().enumerate() {
        let (pred_mean, pred_cov) = if k == 0 {
            (mean, cov)
        } else {
            let m = f * mean;
            let p = symmetrized(f * cov * f.transpose() + qm, "predicted", k)?;
            (m, p)
        };
        let innovation = xk - (h * pred_mean)[0];
        let s = pred_cov[(0, 0)] + model.r;
        let gain: Vector2<f64> = pred_cov.column(0) / s;
        mean = pred_mean + gain * innovation;
        // Joseph form
        let a = Matrix2::identity() - gain * h;
        cov = symmetrized(
            a * pred_cov * a.transpose() + gain * gain.transpose() * model.r,
            "filtered",
            k,
        )?;
        steps.push(StepState {
            predicted_mean: pred_mean,
            predicted_cov: pred_cov,
            filtered_mean: mean,
            filtered_cov: cov,
        });
        p_hat.push(mean[0]);
        innovations.push(innovation);
    }

    if p_hat.iter().any(|v| !v.is_finite()) {
        return Err(Error::Internal("Kalman recursion diverged".into()));
    }
    let y_filt = x.samples().iter().zip(&p_hat).map(|(a, b)| a - b).collect();
    Ok(KalmanRun {
        x: x.clone(),
        p_hat,
        y_filt,
        innovations,
        steps,
        p_smooth: None,
        y_smooth: None,
        smoothed: None,
    })
}

/// Rauch-Tung-Striebel fixed-interval pass over a completed forward run.
pub fn rts_smoother(run: &KalmanRun, model: &KalmanModel) -> Result<KalmanRun> {
    let n = run.x.len();
    if run.steps.len() != n || run.p_hat.len() != n {
        return Err(Error::Usage(format!(
            "forward pass is incomplete: {} stored steps for {n} samples",
            run.steps.len()
        )));
    }
    let f = model.transition();
    let mut smoothed = vec![
        SmoothedState {
            mean: Vector2::zeros(),
            cov: Matrix2::zeros(),
        };
        n
    ];
    if let Some(last) = run.steps.last() {
        smoothed[n - 1] = SmoothedState {
            mean: last.filtered_mean,
            cov: last.filtered_cov,
        };
    }
    for k in (0..n.saturating_sub(1)).rev() {
        let cur = &run.steps[k];
        let next = &run.steps[k + 1];
        let pred_inv = next
            .predicted_cov
            .try_inverse()
            .ok_or_else(|| Error::Internal(format!("singular predicted covariance at step {}", k + 1)))?;
        let c = cur.filtered_cov * f.transpose() * pred_inv;
        let later = smoothed[k + 1];
        let mean = cur.filtered_mean + c * (later.mean - next.predicted_mean);
        let cov = symmetrized(
            cur.filtered_cov + c * (later.cov - next.predicted_cov) * c.transpose(),
            "smoothed",
            k,
        )?;
        smoothed[k] = SmoothedState { mean, cov };
    }
    let p_smooth: Vec<f64> = smoothed.iter().map(|s| s.mean[0]).collect();
    let y_smooth = run.x.samples().iter().zip(&p_smooth).map(|(a, b)| a - b).collect();
    Ok(KalmanRun {
        p_smooth: Some(p_smooth),
        y_smooth: Some(y_smooth),
        smoothed: Some(smoothed),
        ..run.clone()
    })
}

/// Measurement-variance estimate for `r = "auto"`: the variance of the
/// least-squares notch output.
pub fn estimate_measurement_variance(x: &SignalVector, spec: &NotchSpec) -> Result<f64> {
    let y = notch_filter_cls(x, spec, Backend::Banded)?.y;
    let n = y.len() as f64;
    let mean = y.samples().iter().sum::<f64>() / n;
    let var = y.samples().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var > 0.0 {
        Ok(var)
    } else {
        Err(Error::InvalidData("cannot estimate r: notch output has zero variance".into()))
    }
}
