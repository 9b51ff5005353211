//! One-dimensional profiles in `y`, transformed consistently with the `k = 0`
//! row of [`SpectralField`](super::SpectralField): `ĝ(η) = ∫ e^{-iηy} g(y) dy`.

use num_complex::Complex64;

use super::fft::fft1;
use super::Grid;

/// Coefficients `ĝ(η_j)` in FFT order from samples at `y_b = -L + bΔy`.
pub fn profile_forward(grid: &Grid, samples: &[f64]) -> Vec<Complex64> {
    assert_eq!(samples.len(), grid.n_v, "profile length must equal n_v");
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft1(grid.n_v, true).process(&mut buf);
    let dy = grid.dy();
    for (j, c) in buf.iter_mut().enumerate() {
        *c *= if j % 2 == 0 { dy } else { -dy };
    }
    buf
}

/// Real samples of `(1/2π) Σ ĝ(η) e^{iηy} Δη`.
pub fn profile_inverse(grid: &Grid, coeffs: &[Complex64]) -> Vec<f64> {
    assert_eq!(coeffs.len(), grid.n_v, "profile length must equal n_v");
    let s = 1.0 / (2.0 * grid.half_width);
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| c * if j % 2 == 0 { s } else { -s })
        .collect();
    fft1(grid.n_v, false).process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Spectral `∂_y^order`, with the Nyquist column zeroed for odd orders.
pub fn profile_derivative(grid: &Grid, coeffs: &[Complex64], order: u32) -> Vec<Complex64> {
    coeffs
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            if order % 2 == 1 && j == grid.n_v / 2 {
                return Complex64::new(0.0, 0.0);
            }
            c * Complex64::new(0.0, grid.eta_of(j)).powu(order)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{SpectralField, DEFAULT_DEALIAS};
    use std::f64::consts::PI;

    #[test]
    fn matches_zero_row_of_field() {
        let g = Grid::new(8, 32, 2.0 * PI, DEFAULT_DEALIAS).unwrap();
        let prof: Vec<f64> = (0..g.n_v).map(|b| (-g.y_at(b).powi(2)).exp() * (1.0 + g.y_at(b))).collect();
        let mut samples = Vec::new();
        for _ in 0..g.n_z {
            samples.extend_from_slice(&prof);
        }
        let f = SpectralField::from_physical(g, &samples).unwrap();
        let p = profile_forward(&g, &prof);
        for ij in 0..g.n_v {
            assert!((p[ij] - f.coeffs()[ij]).norm() < 1e-12);
        }
        let back = profile_inverse(&g, &p);
        for (a, b) in back.iter().zip(&prof) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn derivative_of_sine() {
        let g = Grid::new(8, 32, PI, DEFAULT_DEALIAS).unwrap();
        let prof: Vec<f64> = (0..g.n_v).map(|b| (3.0 * g.y_at(b)).sin()).collect();
        let d = profile_inverse(&g, &profile_derivative(&g, &profile_forward(&g, &prof), 1));
        for b in 0..g.n_v {
            assert!((d[b] - 3.0 * (3.0 * g.y_at(b)).cos()).abs() < 1e-12);
        }
    }
}
