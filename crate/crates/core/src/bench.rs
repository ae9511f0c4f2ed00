//! Timing harness comparing the solver backends.

use std::time::Instant;

use crate::cls::{notch_filter_cls, Backend, DENSE_LIMIT};
use crate::error::{Error, Result};
use crate::synth::{powerline, white_noise};
use crate::types::{NotchSpec, SignalVector};

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub backends: Vec<Backend>,
    pub gamma: f64,
    pub f0_hz: f64,
    pub fs_hz: f64,
    pub repeats: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![256, 1024, 4096],
            backends: vec![Backend::Banded, Backend::Dense],
            gamma: 1e4,
            f0_hz: 50.0,
            fs_hz: 250.0,
            repeats: 5,
            seed: 0,
        }
    }
}

/// One (size, backend) measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub k: usize,
    pub backend: Backend,
    pub median_s: f64,
    /// `max |y - y_dense| / max |x|`; `None` above the dense size limit.
    pub max_rel_dev: Option<f64>,
}

/// White noise plus a unit sinusoid at the notch, seeded per size.
pub fn bench_input(k: usize, cfg: &BenchConfig) -> Result<SignalVector> {
    let noise = white_noise(k, 1.0, cfg.fs_hz, cfg.seed ^ (k as u64).wrapping_mul(0x9E37_79B9))?;
    let hum = powerline(k, 1.0, 0.3, cfg.f0_hz, cfg.fs_hz)?;
    let sum = noise.samples().iter().zip(hum.samples()).map(|(a, b)| a + b).collect();
    SignalVector::new(sum, cfg.fs_hz)
}

pub fn max_rel_deviation(a: &[f64], b: &[f64], x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max) / scale
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Times every backend at every size. Rows come out in configuration order.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.repeats == 0 {
        return Err(Error::Parameter("repeats must be at least 1".into()));
    }
    if let Some(&k) = cfg.sizes.iter().find(|&&k| k < 3) {
        return Err(Error::Parameter(format!("benchmark sizes must be >= 3, got {k}")));
    }
    for &k in &cfg.sizes {
        for b in &cfg.backends {
            if let Some(limit) = b.size_limit() {
                if k > limit {
                    return Err(Error::Size {
                        what: if *b == Backend::Dense { "dense backend" } else { "spectral backend" },
                        size: k,
                        limit,
                    });
                }
            }
        }
    }
    let spec = NotchSpec::new(cfg.f0_hz, cfg.fs_hz, cfg.gamma)?;
    let mut rows = Vec::new();
    for &k in &cfg.sizes {
        let x = bench_input(k, cfg)?;
        let reference = if k <= DENSE_LIMIT {
            Some(notch_filter_cls(&x, &spec, Backend::Dense)?.y)
        } else {
            None
        };
        for &backend in &cfg.backends {
            let mut times = Vec::with_capacity(cfg.repeats);
            let mut last = None;
            for _ in 0..cfg.repeats {
                let t0 = Instant::now();
                let r = notch_filter_cls(&x, &spec, backend)?;
                times.push(t0.elapsed().as_secs_f64());
                last = Some(r);
            }
            let y = last.expect("repeats >= 1").y;
            let max_rel_dev = reference
                .as_ref()
                .map(|r| max_rel_deviation(y.samples(), r.samples(), x.samples()));
            rows.push(BenchRow {
                k,
                backend,
                median_s: median(times),
                max_rel_dev,
            });
        }
    }
    Ok(rows)
}

/// Least-squares slope of `log t` against `log k`.
pub fn loglog_slope(points: &[(usize, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, t)| t.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn format_rows(rows: &[BenchRow]) -> String {
    let mut out = String::from("K,backend,median_seconds,max_rel_deviation_vs_dense\n");
    for r in rows {
        let dev = r.max_rel_dev.map(|d| format!("{d:.6e}")).unwrap_or_default();
        out.push_str(&format!("{},{},{:.6e},{}\n", r.k, r.backend, r.median_s, dev));
    }
    out
}
