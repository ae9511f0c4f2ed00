mod common;

use cls_notch::spectral::notch_bandwidth;
use cls_notch::{gamma_from_bandwidth, kalman_notch_filter, notch_filter_cls, rts_smoother, Backend, KalmanModel, NotchSpec, SignalVector};
use common::{diff_rms, rms, sinusoid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn spec(gamma: f64) -> NotchSpec {
    NotchSpec::new(50.0, 250.0, gamma).unwrap()
}

#[test]
fn amplitude_step_tracked_by_kalman_not_by_cls() {
    let s = spec(1.0);
    let n = 2500;
    let mut x = sinusoid(n, 1.0, s.omega0(), 0.2);
    for v in &mut x[n / 2..] {
        *v *= 2.0;
    }
    let xs = SignalVector::new(x, 250.0).unwrap();
    let r = 1e-2;
    let run = kalman_notch_filter(&xs, &s, 1e-3 * r, r, None).unwrap();
    // amplitudes are measured in units of the pre-step amplitude
    let tail = rms(&run.y_filt[n - 250..]);
    assert!(tail < 0.1, "kalman tail residual {tail}");

    let cls = notch_filter_cls(&xs, &s.with_gamma(1e4).unwrap(), Backend::Banded).unwrap();
    let near = rms(&cls.y.samples()[n / 2 - 125..n / 2 + 125]);
    assert!(near > 0.2, "cls residual near step {near}");

    let smooth = rts_smoother(&run, &KalmanModel::new(&s, 1e-3 * r, r).unwrap()).unwrap();
    assert!(rms(smooth.y_smooth.as_ref().unwrap()) <= rms(&run.y_filt));
}

#[test]
fn stationary_smoother_matches_bandwidth_matched_cls() {
    let (q, r): (f64, f64) = (1e-4, 1.0);
    let s = spec(1.0);
    let c = s.omega0().cos();
    let n = 5000;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let w = Normal::new(0.0, q.sqrt()).unwrap();
    let v = Normal::new(0.0, r.sqrt()).unwrap();
    let (mut p1, mut p0) = ((s.omega0()).sin(), 0.0);
    let mut x = Vec::with_capacity(n);
    for _ in 0..n {
        let p2 = 2.0 * c * p1 - p0 + w.sample(&mut rng);
        p0 = p1;
        p1 = p2;
        x.push(p2 + v.sample(&mut rng));
    }
    let xs = SignalVector::new(x, 250.0).unwrap();
    let model = KalmanModel::new(&s, q, r).unwrap();
    let smooth = rts_smoother(&kalman_notch_filter(&xs, &s, q, r, None).unwrap(), &model).unwrap();

    // equalize -3 dB widths: width of the smoother's response, then back to a weight
    let width = notch_bandwidth(&spec(r / q)).unwrap().width_hz(250.0);
    let gamma = gamma_from_bandwidth(50.0, 250.0, width).unwrap();
    let cls = notch_filter_cls(&xs, &spec(gamma), Backend::Banded).unwrap().y;

    let (lo, hi) = (n / 10, n - n / 10);
    let ys = &smooth.y_smooth.unwrap()[lo..hi];
    let rel = diff_rms(ys, &cls.samples()[lo..hi]) / rms(&cls.samples()[lo..hi]);
    assert!(rel < 0.05, "relative difference {rel}");
}
