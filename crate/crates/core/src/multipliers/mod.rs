//! Critical times and the `w`, `J`, `A`, `A^R`, `A^ν`, `D`, `λ(t)` weights.

mod context;
mod critical;
mod eval;
mod growth;
pub mod lemmas;

pub use context::{decay_integral, WeightContext, WeightParams, ETA_FLOOR};
pub use critical::{critical_time, critical_times, interval_count, CriticalInterval, CriticalTimeTable};
pub use eval::{d_value, log_add, MultiplierSpec};
pub use growth::{growth_fit, log_spaced, GrowthFit};
pub use lemmas::{run_lemma_suite, LemmaCheck, LemmaReport, LemmaSuiteConfig};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultiplierError {
    #[error("invalid weight configuration: {0}")]
    Config(String),
    #[error("multiplier overflows at frequency (k, eta) = ({k}, {eta})")]
    Overflow { k: i64, eta: f64 },
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("poor fit quality: r^2 = {r_squared:.4} < 0.9")]
    PoorFit { r_squared: f64 },
}
