use num_complex::Complex64;

use super::{SpectralError, SpectralField};

/// Frequency variable for the dyadic decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpAxis {
    /// `ξ = η`.
    V,
    /// `ξ = |k| + |η|`.
    Zv,
}

impl LpAxis {
    fn xi(self, k: i64, eta: f64) -> f64 {
        match self {
            LpAxis::V => eta.abs(),
            LpAxis::Zv => k.unsigned_abs() as f64 + eta.abs(),
        }
    }
}

/// Low cutoff: 1 on `|ξ| ≤ 1/2`, 0 on `|ξ| ≥ 3/4`, quintic smoothstep between.
pub fn lp_psi(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= 0.5 {
        1.0
    } else if a >= 0.75 {
        0.0
    } else {
        let x = (a - 0.5) * 4.0;
        1.0 - x * x * x * (x * (6.0 * x - 15.0) + 10.0)
    }
}

/// `ρ(ξ) = ψ(ξ/2) − ψ(ξ)`, supported in `1/2 ≤ |ξ| ≤ 3/2`.
pub fn lp_rho(xi: f64) -> f64 {
    lp_psi(xi / 2.0) - lp_psi(xi)
}

/// Multiplier of band `m`: `ψ` for the low block `m = 1/2`, `ρ(ξ/m)` otherwise.
fn band_symbol(m: f64, xi: f64) -> f64 {
    if m == 0.0 {
        if xi == 0.0 {
            1.0
        } else {
            0.0
        }
    } else if m == 0.5 {
        lp_psi(xi)
    } else {
        lp_rho(xi / m)
    }
}

/// Inhomogeneous bands `1/2, 1, 2, …, 2^m` with `2^m ≥ xi_max`; they sum to one on `|ξ| ≤ xi_max`.
pub fn lp_bands(xi_max: f64) -> Vec<f64> {
    let mut bands = vec![0.5, 1.0];
    let mut m = 1.0;
    while m < xi_max {
        m *= 2.0;
        bands.push(m);
    }
    bands
}

fn field_xi_max(field: &SpectralField, axis: LpAxis) -> f64 {
    let g = field.grid();
    let kmax = (g.n_z / 2) as i64;
    let emax = (g.n_v / 2) as f64 * g.eta_spacing();
    axis.xi(kmax, emax)
}

/// Band `m` piece of `field`. `m = 1/2` is the low block.
pub fn lp_project(field: &SpectralField, m: f64, axis: LpAxis) -> SpectralField {
    field.map_modes(|k, eta, c| c * band_symbol(m, axis.xi(k, eta)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParaproductStyle {
    /// Bands `1/2, 1, 2, …`.
    Inhomogeneous,
    /// A zero-frequency block followed by dyadic bands starting at the
    /// lattice's lowest nonzero frequency.
    Homogeneous,
}

#[derive(Debug, Clone)]
pub struct Paraproduct {
    /// `Σ_N f_{<N/8} g_N`.
    pub low_high: SpectralField,
    /// `Σ_N g_{<N/8} f_N`.
    pub high_low: SpectralField,
    /// `Σ_{N/8 ≤ N′ ≤ 8N} f_N g_{N′}`.
    pub remainder: SpectralField,
}

fn style_bands(field: &SpectralField, axis: LpAxis, style: ParaproductStyle) -> Vec<f64> {
    let xi_max = field_xi_max(field, axis);
    match style {
        ParaproductStyle::Inhomogeneous => lp_bands(xi_max),
        ParaproductStyle::Homogeneous => {
            let g = field.grid();
            let xi_min = match axis {
                LpAxis::V => g.eta_spacing(),
                LpAxis::Zv => g.eta_spacing().min(1.0),
            };
            let mut n = 1.0f64;
            while n > 4.0 / 3.0 * xi_min {
                n /= 2.0;
            }
            while 2.0 * n <= 4.0 / 3.0 * xi_min {
                n *= 2.0;
            }
            let mut bands = vec![0.0, n];
            while n < xi_max {
                n *= 2.0;
                bands.push(n);
            }
            bands
        }
    }
}

fn band_symbol_styled(m: f64, xi: f64, style: ParaproductStyle) -> f64 {
    match style {
        ParaproductStyle::Inhomogeneous => band_symbol(m, xi),
        ParaproductStyle::Homogeneous if m == 0.0 => band_symbol(0.0, xi),
        ParaproductStyle::Homogeneous => lp_rho(xi / m),
    }
}

/// Dealiased product `f·g` computed in physical space.
pub fn physical_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField, SpectralError> {
    if !f.grid().same_shape(g.grid()) {
        return Err(SpectralError::GridMismatch);
    }
    let a = f.to_physical_complex();
    let b = g.to_physical_complex();
    let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut out = SpectralField::from_physical_complex(*f.grid(), prod)?;
    out.apply_dealias();
    Ok(out)
}

/// Splits the dealiased product `f·g` into low-high, high-low and remainder
/// terms along the `ξ = |k| + |η|` decomposition.
pub fn paraproduct_split(
    f: &SpectralField,
    g: &SpectralField,
    style: ParaproductStyle,
) -> Result<Paraproduct, SpectralError> {
    paraproduct_split_axis(f, g, style, LpAxis::Zv)
}

pub fn paraproduct_split_axis(
    f: &SpectralField,
    g: &SpectralField,
    style: ParaproductStyle,
    axis: LpAxis,
) -> Result<Paraproduct, SpectralError> {
    if !f.grid().same_shape(g.grid()) {
        return Err(SpectralError::GridMismatch);
    }
    let bands = style_bands(f, axis, style);
    let project = |h: &SpectralField, m: f64| {
        h.map_modes(|k, eta, c| c * band_symbol_styled(m, axis.xi(k, eta), style))
    };
    let f_bands: Vec<SpectralField> = bands.iter().map(|&m| project(f, m)).collect();
    let g_bands: Vec<SpectralField> = bands.iter().map(|&m| project(g, m)).collect();

    let grid = *f.grid();
    let mut low_high = SpectralField::zeros(grid);
    let mut high_low = SpectralField::zeros(grid);
    let mut remainder = SpectralField::zeros(grid);
    let sum_where = |parts: &[SpectralField], keep: &dyn Fn(f64) -> bool| {
        let mut acc = SpectralField::zeros(grid);
        for (p, &m) in parts.iter().zip(&bands) {
            if keep(m) {
                acc.add_assign(p);
            }
        }
        acc
    };
    for (i, &n) in bands.iter().enumerate() {
        let f_low = sum_where(&f_bands, &|m| m < n / 8.0);
        low_high.add_assign(&physical_product(&f_low, &g_bands[i])?);
        let g_low = sum_where(&g_bands, &|m| m < n / 8.0);
        high_low.add_assign(&physical_product(&g_low, &f_bands[i])?);
        let f_near = sum_where(&f_bands, &|m| m >= n / 8.0 && n >= m / 8.0);
        remainder.add_assign(&physical_product(&f_near, &g_bands[i])?);
    }
    Ok(Paraproduct {
        low_high,
        high_low,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, DEFAULT_DEALIAS};
    use std::f64::consts::PI;

    #[test]
    fn cutoff_shape() {
        assert_eq!(lp_psi(0.4), 1.0);
        assert_eq!(lp_psi(0.5), 1.0);
        assert_eq!(lp_psi(0.75), 0.0);
        assert!((lp_psi(0.625) - 0.5).abs() < 1e-15);
        assert_eq!(lp_rho(1.0), 1.0);
        assert_eq!(lp_rho(0.5), 0.0);
        assert_eq!(lp_rho(1.5), 0.0);
    }

    #[test]
    fn unit_mode_in_band_one() {
        let g = Grid::new(8, 16, PI, DEFAULT_DEALIAS).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_real_mode(0, 1, Complex64::new(1.0, 0.0)).unwrap();
        let p = lp_project(&f, 1.0, LpAxis::V);
        assert!(p.max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn low_mode_in_low_block() {
        let g = Grid::new(8, 16, 2.5 * PI, DEFAULT_DEALIAS).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_real_mode(0, 1, Complex64::new(1.0, 0.0)).unwrap();
        assert!((g.eta_spacing() - 0.4).abs() < 1e-15);
        let p = lp_project(&f, 0.5, LpAxis::V);
        assert!(p.max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn bands_cover_range() {
        assert_eq!(lp_bands(5.0), vec![0.5, 1.0, 2.0, 4.0, 8.0]);
        assert_eq!(lp_bands(1.0), vec![0.5, 1.0]);
    }
}
