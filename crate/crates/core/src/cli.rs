//! Command-line front end.
//!
//! Data goes to files named by flags; stdout carries log lines only and
//! errors go to stderr. Exit codes: 0 success, 2 usage, 3 bad data.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{format_rows, run_benchmark, BenchConfig};
use crate::cls::{default_gamma, gamma_from_bandwidth, notch_filter_cls, Backend};
use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ExperimentConfig};
use crate::iir::{design_iir_notch, filter_iir};
use crate::io::{read_signal, write_signal, write_text};
use crate::kalman::{estimate_measurement_variance, kalman_notch_filter, rts_smoother, KalmanModel};
use crate::metrics::{rms, snr_db};
use crate::spectral::{notch_bandwidth, response_grid};
use crate::streaming::{default_overlap, segmented_filter, Crossfade, SegmentPlan};
use crate::synth::{powerline, synthetic_ecg, EcgConfig};
use crate::types::{NotchSpec, SignalVector};

#[derive(Debug, Parser)]
#[command(name = "cls-notch", version, about = "Transient-free powerline notch filtering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate synthetic signals.
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Remove powerline interference from a signal file.
    Filter(FilterArgs),
    /// Tabulate the notch frequency response for a list of weights.
    Freqresp(FreqrespArgs),
    /// Time the solver backends.
    Bench(BenchArgs),
    /// Synthetic ECG experiment: least-squares notch against IIR notches.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// A * sin(w0 k + theta) for k = 1..K.
    GeneratePowerline(PowerlineArgs),
    /// Quasi-periodic ECG-like pulse train.
    GenerateEcg(EcgArgs),
}

#[derive(Debug, Args)]
pub struct PowerlineArgs {
    #[arg(long = "K")]
    pub k: usize,
    #[arg(long = "A", default_value_t = 1.0, allow_negative_numbers = true)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 50.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 250.0)]
    pub fs: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct EcgArgs {
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 250.0)]
    pub fs: f64,
    #[arg(long, default_value_t = 60.0)]
    pub hr_bpm: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Add a powerline sinusoid to the generated ECG.
    #[arg(long)]
    pub add_powerline: bool,
    #[arg(long, default_value_t = 50.0, requires = "add_powerline")]
    pub f0: f64,
    /// Powerline amplitude (default: half the clean RMS).
    #[arg(long = "A", requires = "add_powerline", allow_negative_numbers = true)]
    pub amplitude: Option<f64>,
    #[arg(long, default_value_t = 0.0, requires = "add_powerline", allow_negative_numbers = true)]
    pub theta: f64,
    /// Also write the clean ECG here.
    #[arg(long, requires = "add_powerline")]
    pub clean_output: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Cls,
    Iir,
    Kalman,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Sampling rate; overrides the file header.
    #[arg(long)]
    pub fs: Option<f64>,
    #[arg(long, default_value_t = 50.0)]
    pub f0: f64,
    #[arg(long, conflicts_with = "bandwidth")]
    pub gamma: Option<f64>,
    /// Notch -3 dB width in Hz, converted to a weight.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long, value_enum, default_value_t = Method::Cls)]
    pub method: Method,
    #[arg(long, default_value = "banded")]
    pub backend: String,
    /// Filter in segments of this many samples.
    #[arg(long)]
    pub segment_len: Option<usize>,
    /// Segment overlap in samples (default 20% of the segment, even).
    #[arg(long, requires = "segment_len")]
    pub overlap: Option<usize>,
    #[arg(long, default_value = "raised-cosine", requires = "segment_len")]
    pub crossfade: String,
    /// Quality factor of the IIR notch.
    #[arg(long, default_value_t = 30.0)]
    pub q: f64,
    /// Kalman process noise variance (default: r / gamma).
    #[arg(long)]
    pub process_var: Option<f64>,
    /// Kalman measurement noise variance, or "auto".
    #[arg(long, default_value = "auto")]
    pub measurement_var: String,
    /// Kalman: emit the causal estimate instead of the smoothed one.
    #[arg(long)]
    pub causal: bool,
    /// Also write the interference estimate here.
    #[arg(long)]
    pub emit_powerline: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FreqrespArgs {
    #[arg(long, default_value_t = 50.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 250.0)]
    pub fs: f64,
    #[arg(long, value_delimiter = ',', default_value = "1e2,1e3,1e4,1e5,1e6")]
    pub gamma_list: Vec<f64>,
    #[arg(long, default_value_t = 1001)]
    pub points: usize,
    /// Report 20 log10 |G| instead of |G|.
    #[arg(long)]
    pub db: bool,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1e4)]
    pub gamma: f64,
    #[arg(long, value_delimiter = ',', default_value = "banded,dense")]
    pub backends: Vec<String>,
    #[arg(long, default_value_t = 5)]
    pub repeats: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 250.0)]
    pub fs: f64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long, default_value_t = 50.0)]
    pub f0: f64,
    #[arg(long, default_value_t = 250.0)]
    pub fs: f64,
    #[arg(long, default_value_t = 10.0)]
    pub duration: f64,
    /// Powerline amplitude (default: half the clean RMS).
    #[arg(long = "A")]
    pub amplitude: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub theta: f64,
    #[arg(long, value_delimiter = ',', default_value = "1e4")]
    pub gamma_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "30,60")]
    pub q_list: Vec<f64>,
    #[arg(long, default_value_t = 60.0)]
    pub hr_bpm: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Synth(SynthCommand::GeneratePowerline(a)) => generate_powerline(&a),
        Command::Synth(SynthCommand::GenerateEcg(a)) => generate_ecg(&a),
        Command::Filter(a) => filter(&a),
        Command::Freqresp(a) => freqresp(&a),
        Command::Bench(a) => bench(&a),
        Command::Experiment(a) => experiment(&a),
    }
}

fn save(path: &Path, x: &SignalVector) -> Result<()> {
    write_signal(path, x)?;
    println!("wrote {} samples to {}", x.len(), path.display());
    Ok(())
}

fn add(a: &SignalVector, b: &SignalVector) -> Result<SignalVector> {
    SignalVector::new(a.samples().iter().zip(b.samples()).map(|(u, v)| u + v).collect(), a.fs_hz())
}

fn generate_powerline(a: &PowerlineArgs) -> Result<()> {
    if a.k == 0 {
        return Err(Error::Usage("--K must be at least 1".into()));
    }
    // validates f0 against fs
    NotchSpec::new(a.f0, a.fs, 0.0)?;
    let x = powerline(a.k, a.amplitude, a.theta, a.f0, a.fs)?;
    save(&a.output, &x)
}

fn generate_ecg(a: &EcgArgs) -> Result<()> {
    let clean = synthetic_ecg(&EcgConfig {
        duration_s: a.duration,
        fs_hz: a.fs,
        hr_bpm: a.hr_bpm,
        seed: a.seed,
    })?;
    if !a.add_powerline {
        return save(&a.output, &clean);
    }
    NotchSpec::new(a.f0, a.fs, 0.0)?;
    let amplitude = a.amplitude.unwrap_or(0.5 * rms(clean.samples()));
    let hum = powerline(clean.len(), amplitude, a.theta, a.f0, a.fs)?;
    let noisy = add(&clean, &hum)?;
    println!(
        "powerline amplitude {amplitude:.6e}, input SNR {:.2} dB",
        snr_db(clean.samples(), noisy.samples())
    );
    if let Some(path) = &a.clean_output {
        save(path, &clean)?;
    }
    save(&a.output, &noisy)
}

fn resolve_gamma(gamma: Option<f64>, bandwidth: Option<f64>, f0: f64, fs: f64) -> Result<f64> {
    match (gamma, bandwidth) {
        (Some(_), Some(_)) => Err(Error::Usage("--gamma and --bandwidth are mutually exclusive".into())),
        (Some(g), None) => Ok(g),
        (None, Some(bw)) => gamma_from_bandwidth(f0, fs, bw),
        (None, None) => default_gamma(f0, fs),
    }
}

fn filter(a: &FilterArgs) -> Result<()> {
    let x = read_signal(&a.input, a.fs)?;
    let fs = x.fs_hz();
    let gamma = resolve_gamma(a.gamma, a.bandwidth, a.f0, fs)?;
    let spec = NotchSpec::new(a.f0, fs, gamma)?;
    println!("f0 {} Hz, fs {} Hz, gamma {:e}, method {:?}", a.f0, fs, gamma, a.method);

    let (y, p) = match a.method {
        Method::Cls => filter_cls(a, &x, &spec)?,
        Method::Iir => {
            let biquad = design_iir_notch(a.f0, fs, a.q)?;
            let y = filter_iir(&x, &biquad)?;
            let p = SignalVector::new(x.samples().iter().zip(y.samples()).map(|(u, v)| u - v).collect(), fs)?;
            (y, p)
        }
        Method::Kalman => filter_kalman(a, &x, &spec)?,
    };
    save(&a.output, &y)?;
    if let Some(path) = &a.emit_powerline {
        save(path, &p)?;
    }
    Ok(())
}

fn filter_cls(a: &FilterArgs, x: &SignalVector, spec: &NotchSpec) -> Result<(SignalVector, SignalVector)> {
    let backend: Backend = a.backend.parse()?;
    let Some(seg) = a.segment_len else {
        let r = notch_filter_cls(x, spec, backend)?;
        return Ok((r.y, r.p_star));
    };
    if backend != Backend::Banded {
        return Err(Error::Usage("segmented filtering uses the banded backend only".into()));
    }
    let crossfade: Crossfade = a.crossfade.parse()?;
    let overlap = a.overlap.unwrap_or_else(|| default_overlap(seg));
    let plan = SegmentPlan::new(seg, overlap, crossfade)?;
    println!("segments of {seg} samples, overlap {overlap}, crossfade {crossfade}");
    let y = segmented_filter(x, spec, &plan)?;
    let p = SignalVector::new(x.samples().iter().zip(y.samples()).map(|(u, v)| u - v).collect(), x.fs_hz())?;
    Ok((y, p))
}

fn filter_kalman(a: &FilterArgs, x: &SignalVector, spec: &NotchSpec) -> Result<(SignalVector, SignalVector)> {
    let r = if a.measurement_var.eq_ignore_ascii_case("auto") {
        estimate_measurement_variance(x, spec)?
    } else {
        a.measurement_var
            .parse::<f64>()
            .map_err(|_| Error::Usage(format!("--measurement-var '{}' is not a number or auto", a.measurement_var)))?
    };
    let q = match a.process_var {
        Some(q) => q,
        None if spec.gamma() > 0.0 => r / spec.gamma(),
        None => return Err(Error::Parameter("gamma 0 gives no default process variance; pass --process-var".into())),
    };
    println!("kalman q {q:e}, r {r:e}");
    let model = KalmanModel::new(spec, q, r)?;
    let run = kalman_notch_filter(x, spec, q, r, None)?;
    let (y, p) = if a.causal {
        (run.y_filt, run.p_hat)
    } else {
        let s = rts_smoother(&run, &model)?;
        (
            s.y_smooth.expect("smoother fills y_smooth"),
            s.p_smooth.expect("smoother fills p_smooth"),
        )
    };
    Ok((SignalVector::new(y, x.fs_hz())?, SignalVector::new(p, x.fs_hz())?))
}

fn freqresp(a: &FreqrespArgs) -> Result<()> {
    if a.gamma_list.is_empty() {
        return Err(Error::Usage("--gamma-list is empty".into()));
    }
    let mut columns = Vec::with_capacity(a.gamma_list.len());
    for &gamma in &a.gamma_list {
        let spec = NotchSpec::new(a.f0, a.fs, gamma)?;
        let grid = response_grid(&spec, a.points)?;
        let bw = notch_bandwidth(&spec)?;
        println!("gamma {gamma:e}: -3 dB width {:.6} Hz", bw.width_hz(a.fs));
        columns.push(grid);
    }
    let mut out = String::from("omega,freq_hz");
    for g in &a.gamma_list {
        out.push_str(&format!(",gamma_{g:e}"));
    }
    out.push('\n');
    for i in 0..a.points {
        let omega = columns[0].omegas[i];
        out.push_str(&format!("{omega:.16e},{:.16e}", omega * a.fs / (2.0 * std::f64::consts::PI)));
        for c in &columns {
            let g = c.g_gain[i];
            let v = if a.db { 20.0 * g.log10() } else { g };
            out.push_str(&format!(",{v:.16e}"));
        }
        out.push('\n');
    }
    write_text(&a.output, &out)?;
    println!("wrote {} rows to {}", a.points, a.output.display());
    Ok(())
}

fn bench(a: &BenchArgs) -> Result<()> {
    let backends = a
        .backends
        .iter()
        .map(|s| s.parse::<Backend>())
        .collect::<Result<Vec<_>>>()?;
    let cfg = BenchConfig {
        sizes: a.sizes.clone(),
        backends,
        gamma: a.gamma,
        f0_hz: a.f0,
        fs_hz: a.fs,
        repeats: a.repeats,
        seed: a.seed,
    };
    let rows = run_benchmark(&cfg)?;
    for r in &rows {
        println!("K={} {}: {:.3e} s", r.k, r.backend, r.median_s);
    }
    write_text(&a.output, &format_rows(&rows))?;
    println!("wrote {} rows to {}", rows.len(), a.output.display());
    Ok(())
}

fn experiment(a: &ExperimentArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        f0_hz: a.f0,
        fs_hz: a.fs,
        duration_s: a.duration,
        amplitude: a.amplitude,
        theta: a.theta,
        gammas: a.gamma_list.clone(),
        q_factors: a.q_list.clone(),
        hr_bpm: a.hr_bpm,
        seed: a.seed,
        ..Default::default()
    };
    let out = run_experiment(&cfg)?;
    println!("powerline amplitude {:.6e}, input SNR {:.2} dB", out.amplitude, out.input_snr_db);
    for m in &out.methods {
        println!(
            "{}: rms error {:.4e}, first {} s {:.4e}, transient ratio {:.3}, lag {}",
            m.method.label(),
            m.rms_error,
            cfg.window_s,
            m.head_rms_error,
            m.transient_ratio,
            m.lag
        );
    }
    write_text(&a.output, &out.to_csv())?;
    println!("wrote {} rows to {}", out.clean.len(), a.output.display());
    Ok(())
}
