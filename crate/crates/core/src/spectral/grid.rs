use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SpectralError;

/// Truncated Fourier lattice for the periodic box `[0, 2π) × [-L, L)`.
///
/// Coefficients are stored row-major with the `z` wavenumber outer and the
/// `v` (or `y`) wavenumber inner, both in FFT order: index `i` maps to
/// `i` for `i <= n/2` and to `i - n` otherwise, so the represented
/// wavenumbers are `-n/2+1 ..= n/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n_z: usize,
    pub n_v: usize,
    pub half_width: f64,
    pub dealias_fraction: f64,
}

pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

impl Grid {
    pub fn new(
        n_z: usize,
        n_v: usize,
        half_width: f64,
        dealias_fraction: f64,
    ) -> Result<Self, SpectralError> {
        for (name, n) in [("n_z", n_z), ("n_v", n_v)] {
            if n < 8 || !n.is_power_of_two() {
                return Err(SpectralError::Config(format!(
                    "{name} = {n} must be a power of two >= 8"
                )));
            }
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(SpectralError::Config(format!(
                "half width L = {half_width} must be positive"
            )));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(SpectralError::Config(format!(
                "dealias fraction {dealias_fraction} must lie in (0, 1]"
            )));
        }
        Ok(Self {
            n_z,
            n_v,
            half_width,
            dealias_fraction,
        })
    }

    pub fn len(&self) -> usize {
        self.n_z * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, ik: usize, ij: usize) -> usize {
        ik * self.n_v + ij
    }

    /// Signed `z` wavenumber of row `ik`.
    #[inline]
    pub fn k_of(&self, ik: usize) -> i64 {
        signed(ik, self.n_z)
    }

    /// Signed `v` lattice index of column `ij`; the wavenumber is `j π / L`.
    #[inline]
    pub fn j_of(&self, ij: usize) -> i64 {
        signed(ij, self.n_v)
    }

    #[inline]
    pub fn eta_of(&self, ij: usize) -> f64 {
        self.j_of(ij) as f64 * self.eta_spacing()
    }

    /// Spacing `π / L` of the `η` lattice; also the quadrature weight per mode.
    #[inline]
    pub fn eta_spacing(&self) -> f64 {
        PI / self.half_width
    }

    pub fn row_of_k(&self, k: i64) -> Option<usize> {
        unsigned(k, self.n_z)
    }

    pub fn col_of_j(&self, j: i64) -> Option<usize> {
        unsigned(j, self.n_v)
    }

    /// True for the unpaired Nyquist row or column.
    #[inline]
    pub fn is_nyquist(&self, ik: usize, ij: usize) -> bool {
        ik == self.n_z / 2 || ij == self.n_v / 2
    }

    pub fn dz(&self) -> f64 {
        2.0 * PI / self.n_z as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.half_width / self.n_v as f64
    }

    pub fn z_at(&self, a: usize) -> f64 {
        a as f64 * self.dz()
    }

    pub fn y_at(&self, b: usize) -> f64 {
        -self.half_width + b as f64 * self.dy()
    }

    pub fn dealias_k_max(&self) -> i64 {
        (self.dealias_fraction * (self.n_z / 2) as f64 + 1e-12).floor() as i64
    }

    pub fn dealias_j_max(&self) -> i64 {
        (self.dealias_fraction * (self.n_v / 2) as f64 + 1e-12).floor() as i64
    }

    #[inline]
    pub fn retained(&self, ik: usize, ij: usize) -> bool {
        self.k_of(ik).abs() <= self.dealias_k_max() && self.j_of(ij).abs() <= self.dealias_j_max()
    }

    /// Boolean lattice, true where a mode survives the dealiasing rule.
    pub fn dealias_mask(&self) -> Vec<bool> {
        let mut mask = Vec::with_capacity(self.len());
        for ik in 0..self.n_z {
            for ij in 0..self.n_v {
                mask.push(self.retained(ik, ij));
            }
        }
        mask
    }

    pub fn same_shape(&self, other: &Grid) -> bool {
        self.n_z == other.n_z
            && self.n_v == other.n_v
            && (self.half_width - other.half_width).abs() <= 1e-14 * self.half_width
    }
}

#[inline]
fn signed(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

#[inline]
fn unsigned(k: i64, n: usize) -> Option<usize> {
    let half = (n / 2) as i64;
    if k > half || k <= -half {
        None
    } else if k >= 0 {
        Some(k as usize)
    } else {
        Some((k + n as i64) as usize)
    }
}
