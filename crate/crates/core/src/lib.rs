//! Powerline interference removal by regularized least squares.
//!
//! The interference estimate `p` minimizes `|x - p|^2 + gamma |H p|^2`,
//! where each row of `H` applies the three-term recursion
//! `p[k+1] - 2 cos(w0) p[k] + p[k-1]` that a sinusoid at `w0` satisfies
//! exactly. The filtered signal is `y = x - p`. Sinusoids at `w0` lie in the
//! null space of `H`, so they are removed completely from the first sample
//! onwards: there is no start-up transient.
//!
//! Alongside the solver backends the crate carries the analytic frequency
//! response, a biquad IIR notch and a Kalman notch for comparison, and a
//! segment-wise driver for long records.

pub mod banded;
pub mod bench;
pub mod cli;
pub mod cls;
pub mod error;
pub mod experiment;
pub mod iir;
pub mod io;
pub mod kalman;
pub mod metrics;
pub mod operator;
pub mod spectral;
pub mod streaming;
pub mod synth;
pub mod types;

pub use cls::{gamma_from_bandwidth, notch_filter_cls, Backend, BandedClsFilter, ClsResult, DenseClsFilter};
pub use error::{Error, Result};
pub use iir::{design_iir_notch, filter_iir, BiquadNotch};
pub use kalman::{kalman_notch_filter, rts_smoother, KalmanModel, KalmanRun};
pub use spectral::{notch_bandwidth, response_f, response_g, NullModeGain, SpectralDecomposition};
pub use streaming::{segmented_filter, Crossfade, SegmentPlan, StreamingNotch};
pub use types::{NotchSpec, SignalVector};
