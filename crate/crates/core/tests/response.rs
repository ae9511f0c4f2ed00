mod common;

use std::f64::consts::PI;

use cls_notch::{gamma_from_bandwidth, notch_filter_cls, response_g, Backend, NotchSpec, SignalVector};
use common::{fitted_amplitude, sinusoid};

fn measured_gain(spec: &NotchSpec, omega: f64, n: usize) -> f64 {
    let x = SignalVector::new(sinusoid(n, 1.0, omega, 0.25), spec.fs_hz()).unwrap();
    let y = notch_filter_cls(&x, spec, Backend::Banded).unwrap().y;
    let range = n / 4..n - n / 4;
    fitted_amplitude(y.samples(), omega, range.clone()) / fitted_amplitude(x.samples(), omega, range)
}

#[test]
fn two_hz_band_edge_is_minus_three_db() {
    let gamma = gamma_from_bandwidth(50.0, 250.0, 2.0).unwrap();
    let spec = NotchSpec::new(50.0, 250.0, gamma).unwrap();
    let edge = 2.0 * PI * 51.0 / 250.0;
    let db = 20.0 * measured_gain(&spec, edge, 20_000).log10();
    assert!((db + 3.0103).abs() < 0.3, "{db} dB");
}

#[test]
fn filtered_sinusoids_follow_analytic_response() {
    for gamma in [1e1, 1e3, 1e5] {
        let spec = NotchSpec::new(60.0, 500.0, gamma).unwrap();
        for f in [3.0, 40.0, 58.0, 61.0, 75.0, 180.0, 240.0] {
            let omega = 2.0 * PI * f / 500.0;
            let got = measured_gain(&spec, omega, 20_000);
            let want = response_g(omega, &spec).unwrap();
            assert!((got - want).abs() < 0.02 * want + 1e-9, "gamma {gamma} f {f}: {got} vs {want}");
        }
    }
}
