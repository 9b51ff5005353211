//! Norm time series, bootstrap monitors, decay fits and echo detection.

mod echo;
mod fit;
mod record;

pub use echo::{echo_scan, onset_time, EchoBurst, EchoOptions, ModeHistory, ModeSample};
pub use fit::{fit_decay, linear_regression, DecayFit, DecayKind, DecayModel, FitError, MIN_FIT_SAMPLES};
pub use record::{
    bootstrap_report, record, BootstrapEntry, BootstrapReport, DiagnosticsRecord, RecordOptions,
};
