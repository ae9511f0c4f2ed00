mod common;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cls_notch::io::{format_signal, read_signal};
use cls_notch::SignalVector;
use common::{max_abs, rms, sinusoid};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cls-notch")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn samples(p: &Path) -> Vec<f64> {
    read_signal(p, None).unwrap().into_samples()
}

#[test]
fn powerline_generator_values() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "p.csv");
    ok(&["synth", "generate-powerline", "--K", "5", "--A", "1", "--theta", "0", "--f0", "50", "--fs", "250", "-o", s(&out)]);
    let got = samples(&out);
    let want = [0.951057, 0.587785, -0.587785, -0.951057, 0.0];
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() < 5e-7, "{got:?}");
    }
    ok(&["synth", "generate-powerline", "--K", "50", "--A", "0", "-o", s(&out)]);
    assert!(samples(&out).iter().all(|&v| v == 0.0));
}

#[test]
fn ecg_generator_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b, c) = (path(&dir, "a.csv"), path(&dir, "b.csv"), path(&dir, "c.csv"));
    ok(&["synth", "generate-ecg", "--duration", "5", "--seed", "9", "-o", s(&a)]);
    ok(&["synth", "generate-ecg", "--duration", "5", "--seed", "9", "-o", s(&b)]);
    ok(&["synth", "generate-ecg", "--duration", "5", "--seed", "10", "-o", s(&c)]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_ne!(fs::read(&a).unwrap(), fs::read(&c).unwrap());
    assert_eq!(samples(&a).len(), 1250);
}

/// Noisy and clean files for the standard setup: 10 s ECG plus a unit
/// 50 Hz sinusoid at 250 Hz.
fn setup(dir: &TempDir) -> (PathBuf, PathBuf) {
    let (noisy, clean) = (path(dir, "noisy.csv"), path(dir, "clean.csv"));
    ok(&[
        "synth", "generate-ecg", "--duration", "10", "--fs", "250", "--seed", "1",
        "--add-powerline", "--f0", "50", "--A", "1", "--clean-output", s(&clean), "-o", s(&noisy),
    ]);
    (noisy, clean)
}

fn head_error(y: &[f64], clean: &[f64], n: usize) -> f64 {
    let d: Vec<f64> = y[..n].iter().zip(&clean[..n]).map(|(a, b)| a - b).collect();
    rms(&d)
}

#[test]
fn filter_removes_hum_without_transient() {
    let dir = TempDir::new().unwrap();
    let (noisy, clean) = setup(&dir);
    let clean = samples(&clean);
    let (y_cls, y_iir) = (path(&dir, "cls.csv"), path(&dir, "iir.csv"));
    ok(&["filter", "-i", s(&noisy), "-o", s(&y_cls), "--f0", "50", "--gamma", "1e4"]);
    ok(&["filter", "-i", s(&noisy), "-o", s(&y_iir), "--method", "iir", "--q", "30"]);
    let y = samples(&y_cls);
    assert!(head_error(&y, &clean, y.len()) < 0.1 * rms(&clean));
    assert!(head_error(&y, &clean, 25) < 0.1 * rms(&clean));
    let cls_head = head_error(&y, &clean, 375);
    let iir_head = head_error(&samples(&y_iir), &clean, 375);
    assert!(iir_head > 3.0 * cls_head, "iir {iir_head}, cls {cls_head}");
}

#[test]
fn gamma_zero_gives_zeros_and_emits_powerline() {
    let dir = TempDir::new().unwrap();
    let (noisy, _) = setup(&dir);
    let (y, p) = (path(&dir, "y.csv"), path(&dir, "p.csv"));
    ok(&["filter", "-i", s(&noisy), "-o", s(&y), "--gamma", "0", "--emit-powerline", s(&p)]);
    assert!(samples(&y).iter().all(|&v| v == 0.0));
    assert_eq!(samples(&p), samples(&noisy));
}

#[test]
fn full_length_segment_is_bit_identical() {
    let dir = TempDir::new().unwrap();
    let (noisy, _) = setup(&dir);
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    ok(&["filter", "-i", s(&noisy), "-o", s(&a), "--gamma", "1e4"]);
    ok(&["filter", "-i", s(&noisy), "-o", s(&b), "--gamma", "1e4", "--segment-len", "2500"]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    ok(&["filter", "-i", s(&noisy), "-o", s(&b), "--gamma", "1e4", "--segment-len", "1000", "--overlap", "200"]);
    assert_eq!(samples(&b).len(), 2500);
}

#[test]
fn kalman_and_bandwidth_options_run() {
    let dir = TempDir::new().unwrap();
    let (noisy, clean) = setup(&dir);
    let clean = samples(&clean);
    let y = path(&dir, "y.csv");
    ok(&["filter", "-i", s(&noisy), "-o", s(&y), "--bandwidth", "1"]);
    assert!(head_error(&samples(&y), &clean, 2500) < 0.2 * rms(&clean));
    ok(&["filter", "-i", s(&noisy), "-o", s(&y), "--method", "kalman", "--gamma", "1e4"]);
    assert!(rms(&samples(&y)[1250..]) < 2.0 * rms(&clean));
    ok(&["filter", "-i", s(&noisy), "-o", s(&y), "--method", "kalman", "--causal", "--process-var", "1e-6", "--measurement-var", "1e-2"]);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let (noisy, _) = setup(&dir);
    let y = path(&dir, "y.csv");
    // usage
    assert_eq!(run(&["filter", "-i", s(&noisy), "-o", s(&y), "--gamma", "1", "--bandwidth", "1"]).status.code(), Some(2));
    assert_eq!(run(&["filter", "-i", s(&noisy), "-o", s(&y), "--backend", "qr"]).status.code(), Some(2));
    assert_eq!(run(&["bench", "--sizes", "5000", "--backends", "dense", "-o", s(&y)]).status.code(), Some(2));
    let headerless = path(&dir, "h.csv");
    fs::write(&headerless, "1\n2\n3\n4\n").unwrap();
    let out = run(&["filter", "-i", s(&headerless), "-o", s(&y)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    ok(&["filter", "-i", s(&headerless), "-o", s(&y), "--fs", "250"]);
    // data
    let bad = path(&dir, "bad.csv");
    fs::write(&bad, "fs=250\n1\nNaN\n3\n").unwrap();
    assert_eq!(run(&["filter", "-i", s(&bad), "-o", s(&y)]).status.code(), Some(3));
    fs::write(&bad, "fs=250\n1\n2\n").unwrap();
    assert_eq!(run(&["filter", "-i", s(&bad), "-o", s(&y)]).status.code(), Some(3));
    fs::write(&bad, "fs=250\n1\nabc\n").unwrap();
    assert_eq!(run(&["filter", "-i", s(&bad), "-o", s(&y)]).status.code(), Some(3));
}

fn read_table(p: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn freqresp_table() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "fr.csv");
    ok(&["freqresp", "--f0", "50", "--fs", "250", "--gamma-list", "1e2,1e3,1e4,1e5,1e6", "--points", "20001", "-o", s(&out)]);
    let (header, rows) = read_table(&out);
    assert_eq!(header.len(), 7);
    assert_eq!(rows.len(), 20001);
    // omega0 = 0.4 pi sits on the grid at index 8000
    assert!((rows[8000][1] - 50.0).abs() < 1e-9);
    for g in &rows[8000][2..] {
        assert!(g.abs() < 1e-12);
    }
    assert!(rows.iter().all(|r| r[2..].iter().all(|g| (0.0..=1.0).contains(g))));
    let widths: Vec<usize> = (2..7)
        .map(|c| rows.iter().filter(|r| r[c] < std::f64::consts::FRAC_1_SQRT_2).count())
        .collect();
    assert!(widths.windows(2).all(|w| w[1] < w[0]), "{widths:?}");

    ok(&["freqresp", "--gamma-list", "1e4", "--points", "11", "--db", "-o", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn bench_reports_deviation() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "b.csv");
    ok(&["bench", "--sizes", "100,1000", "--backends", "banded,dense,spectral", "--repeats", "1", "--seed", "3", "-o", s(&out)]);
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for r in &rows {
        let dev: f64 = r[3].parse().unwrap();
        assert!(dev <= 1e-7, "{r:?}");
    }
}

#[test]
fn signal_file_round_trip_through_filter_input() {
    let dir = TempDir::new().unwrap();
    let x = SignalVector::new(sinusoid(100, 1.0 / 3.0, 0.3, 0.1), 1000.0).unwrap();
    let p = path(&dir, "x.csv");
    fs::write(&p, format_signal(&x)).unwrap();
    assert_eq!(read_signal(&p, None).unwrap(), x);
    // --fs overrides the header
    assert_eq!(read_signal(&p, Some(500.0)).unwrap().fs_hz(), 500.0);
    assert!(max_abs(x.samples()) > 0.0);
}
