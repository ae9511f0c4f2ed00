//! Error and alignment measures used by the experiment harness and tests.

pub fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

/// RMS of `a - b` over the common prefix.
pub fn rms_error(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    rms(&d)
}

/// `10 log10(P_reference / P_error)`.
pub fn snr_db(reference: &[f64], estimate: &[f64]) -> f64 {
    10.0 * (rms(reference).powi(2) / rms_error(estimate, reference).powi(2)).log10()
}

/// Lag in `-max_lag..=max_lag` at which `sum_k a[k + lag] b[k]` is largest.
/// Positive lag means `a` trails `b`.
pub fn xcorr_peak_lag(a: &[f64], b: &[f64], max_lag: usize) -> isize {
    let n = a.len().min(b.len()) as isize;
    let max_lag = max_lag as isize;
    let mut best = (0isize, f64::NEG_INFINITY);
    for lag in -max_lag..=max_lag {
        let mut acc = 0.0;
        for k in 0.max(-lag)..n.min(n - lag) {
            acc += a[(k + lag) as usize] * b[k as usize];
        }
        if acc > best.1 {
            best = (lag, acc);
        }
    }
    best.0
}

/// Index range covering the middle `fraction` of `len` samples.
pub fn interior(len: usize, fraction: f64) -> std::ops::Range<usize> {
    let margin = ((1.0 - fraction) / 2.0 * len as f64).round() as usize;
    margin..len - margin
}
