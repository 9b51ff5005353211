//! Integrating-factor RK4 for the vorticity in the shearing frame `z = x − ty`.

mod config;
pub mod frame;
mod run;
mod step;

pub use config::{DtController, InitialData, Integrator, ModeSpec, SimConfig};
pub use frame::{biot_savart, kinetic_energy, nonlinear_rhs, shear_production, velocity};
pub use run::{run, RunOptions, Trajectory};
pub use step::{remap_shear, RemapReport, SimState, Stepper, Warnings};

use thiserror::Error;

use crate::coordinates::CoordError;
use crate::multipliers::MultiplierError;
use crate::spectral::SpectralError;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid simulation config: {0}")]
    Config(String),
    #[error("time step {dt} exceeds the CFL limit {limit}")]
    Cfl { dt: f64, limit: f64 },
    #[error("non-finite vorticity at t = {t}")]
    NonFinite { t: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Multiplier(#[from] MultiplierError),
    #[error(transparent)]
    Coordinates(#[from] CoordError),
}
