//! Grids, transforms, Littlewood–Paley projections, paraproducts and Gevrey norms.

mod fft;
mod field;
mod gevrey;
mod grid;
mod lp;
mod profile;

pub use fft::{fft1, Fft2};
pub use field::{SpectralField, SNAPSHOT_HEADER_LEN, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
pub use gevrey::{
    bracket, ell1, gevrey_norm, log_gevrey_norm, log_weighted_norm_sq, GevreyParams,
};
pub use grid::{Grid, DEFAULT_DEALIAS};
pub use lp::{
    lp_bands, lp_project, lp_psi, lp_rho, paraproduct_split, paraproduct_split_axis,
    physical_product, LpAxis,
    Paraproduct, ParaproductStyle,
};
pub use profile::{profile_derivative, profile_forward, profile_inverse};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("weighted norm overflows at frequency (k, eta) = ({k}, {eta})")]
    Overflow { k: i64, eta: f64 },
    #[error("snapshot format: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Dealiasing projection; returns a masked copy of the input.
pub fn dealias(field: &SpectralField) -> SpectralField {
    let mut out = field.clone();
    out.apply_dealias();
    out
}
