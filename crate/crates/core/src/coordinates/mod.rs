//! Nonlinear coordinate quantities `Φ, v − y, h, g, h̄` reconstructed from the
//! frame solution, all stored as functions of the label `y`.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::solver::SimState;
use crate::spectral::{profile_derivative, profile_inverse, Fft2, Grid, SpectralField};

/// Below this time `g`, `h`, `h̄` and `v − y` are reported as masked.
pub const SMALL_TIME_MASK: f64 = 0.1;

#[derive(Debug, Error, PartialEq)]
pub enum CoordError {
    #[error("zero-mode stream gap: expected t = {expected}, got {got}")]
    StreamGap { expected: f64, got: f64 },
    #[error("coordinate map not monotone at t = {t}: min(1 + h) = {min}")]
    NonMonotone { t: f64, min: f64 },
    #[error("time stencil misaligned: steps {left} and {right}")]
    Stencil { left: f64, right: f64 },
}

/// `k = 0` data of the solver state at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMode {
    pub t: f64,
    /// `Û^x_0(η) = iω̂_0(η)/η`, zero at `η = 0` and at the Nyquist column.
    pub u0_hat: Vec<Complex64>,
    pub omega0_hat: Vec<Complex64>,
}

impl ZeroMode {
    pub fn from_field(t: f64, f: &SpectralField) -> Self {
        let g = f.grid();
        let omega0_hat: Vec<Complex64> = f.coeffs()[..g.n_v].to_vec();
        let u0_hat = omega0_hat
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let eta = g.eta_of(j);
                if eta == 0.0 || j == g.n_v / 2 {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, 1.0) * c / eta
                }
            })
            .collect();
        Self {
            t,
            u0_hat,
            omega0_hat,
        }
    }

    pub fn from_state(state: &SimState) -> Self {
        Self::from_field(state.t, &state.f_hat)
    }
}

/// Coordinate quantities at one time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoordState {
    pub t: f64,
    pub phi: Vec<f64>,
    pub u0: Vec<f64>,
    pub v_minus_y: Vec<f64>,
    pub vprime_minus_1: Vec<f64>,
    pub g: Vec<f64>,
    pub hbar: Vec<f64>,
    /// True for `t < SMALL_TIME_MASK`, where the derived fields are zeroed.
    pub masked: bool,
    #[serde(skip)]
    pub grid: Grid,
    #[serde(skip)]
    pub phi_hat: Vec<Complex64>,
    #[serde(skip)]
    pub zero: ZeroMode,
}

impl CoordState {
    /// `Φ(0) = 0`.
    pub fn initial(grid: Grid, zero: ZeroMode) -> Result<Self, CoordError> {
        let phi_hat = vec![Complex64::new(0.0, 0.0); grid.n_v];
        coord_fields(grid, zero, phi_hat)
    }

    pub fn min_vprime(&self) -> f64 {
        self.vprime_minus_1
            .iter()
            .fold(f64::INFINITY, |m, &h| m.min(1.0 + h))
    }
}

/// Heat-propagated trapezoidal step of `Φ_t = U^x_0 + νΦ_yy`.
pub fn update_phi(
    prev: &CoordState,
    now: ZeroMode,
    dt: f64,
    nu: f64,
) -> Result<CoordState, CoordError> {
    let expected = prev.t + dt;
    if (now.t - expected).abs() > 1e-9 * expected.abs().max(1.0) {
        return Err(CoordError::StreamGap {
            expected,
            got: now.t,
        });
    }
    let g = prev.grid;
    let phi_hat = (0..g.n_v)
        .map(|j| {
            let eta = g.eta_of(j);
            let e = (-nu * eta * eta * dt).exp();
            e * (prev.phi_hat[j] + 0.5 * dt * prev.zero.u0_hat[j]) + 0.5 * dt * now.u0_hat[j]
        })
        .collect();
    coord_fields(g, now, phi_hat)
}

/// Builds the sample fields from `Φ̂` and the zero mode.
pub fn coord_fields(
    grid: Grid,
    zero: ZeroMode,
    phi_hat: Vec<Complex64>,
) -> Result<CoordState, CoordError> {
    let t = zero.t;
    let n = grid.n_v;
    let phi = profile_inverse(&grid, &phi_hat);
    let u0 = profile_inverse(&grid, &zero.u0_hat);
    let masked = t < SMALL_TIME_MASK;
    let (v_minus_y, vprime_minus_1, gf, hbar) = if masked {
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n])
    } else {
        let h_hat = scaled(&profile_derivative(&grid, &phi_hat, 1), 1.0 / t);
        let g_hat = g_hat(&zero, &phi_hat, t);
        let hbar_hat: Vec<Complex64> = zero
            .omega0_hat
            .iter()
            .zip(&h_hat)
            .map(|(w, h)| (-w - h) / t)
            .collect();
        (
            phi.iter().map(|p| p / t).collect(),
            profile_inverse(&grid, &h_hat),
            profile_inverse(&grid, &g_hat),
            profile_inverse(&grid, &hbar_hat),
        )
    };
    let state = CoordState {
        t,
        phi,
        u0,
        v_minus_y,
        vprime_minus_1,
        g: gf,
        hbar,
        masked,
        grid,
        phi_hat,
        zero,
    };
    let min = state.min_vprime();
    if !(min > 0.0) {
        return Err(CoordError::NonMonotone { t, min });
    }
    Ok(state)
}

fn scaled(c: &[Complex64], s: f64) -> Vec<Complex64> {
    c.iter().map(|v| v * s).collect()
}

/// `ĝ = (Û_0 − Φ̂/t)/t`.
fn g_hat(zero: &ZeroMode, phi_hat: &[Complex64], t: f64) -> Vec<Complex64> {
    zero.u0_hat
        .iter()
        .zip(phi_hat)
        .map(|(u, p)| (u - p / t) / t)
        .collect()
}

/// `L²(dy)` norm of a profile from its coefficients.
pub fn profile_l2(grid: &Grid, coeffs: &[Complex64]) -> f64 {
    let s: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    (s * grid.eta_spacing() / (2.0 * std::f64::consts::PI)).sqrt()
}

/// Residual norms of `∂_t v = g + ν∂_yy v` and `∂_y g = h̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub t: f64,
    pub transport: f64,
    pub biot_savart: f64,
}

/// Evaluates both identities at `cur` with a centered time difference.
pub fn identity_residuals(
    prev: &CoordState,
    cur: &CoordState,
    next: &CoordState,
    nu: f64,
) -> Result<IdentityResiduals, CoordError> {
    let (left, right) = (cur.t - prev.t, next.t - cur.t);
    if !(left > 0.0) || (left - right).abs() > 1e-9 * left.max(right) {
        return Err(CoordError::Stencil { left, right });
    }
    let grid = cur.grid;
    let t = cur.t;
    if prev.t <= 0.0 {
        return Err(CoordError::Stencil { left, right });
    }
    let g = g_hat(&cur.zero, &cur.phi_hat, t);
    let transport: Vec<Complex64> = (0..grid.n_v)
        .map(|j| {
            let eta = grid.eta_of(j);
            let dv = (next.phi_hat[j] / next.t - prev.phi_hat[j] / prev.t) / (left + right);
            dv - g[j] + nu * eta * eta * cur.phi_hat[j] / t
        })
        .collect();
    let dg = profile_derivative(&grid, &g, 1);
    let h = profile_derivative(&grid, &cur.phi_hat, 1);
    let bs: Vec<Complex64> = (0..grid.n_v)
        .map(|j| dg[j] - (-cur.zero.omega0_hat[j] - h[j] / t) / t)
        .collect();
    Ok(IdentityResiduals {
        t,
        transport: profile_l2(&grid, &transport),
        biot_savart: profile_l2(&grid, &bs),
    })
}

/// `ω(t, x + ty + Φ(t,y), y)` from frame coefficients: each `y` row of the
/// `z`-transform is multiplied by `e^{ikΦ(y)}`.
pub fn shifted_vorticity(f: &SpectralField, phi: &[f64]) -> SpectralField {
    let g = *f.grid();
    assert_eq!(phi.len(), g.n_v, "phi must have n_v samples");
    let fft = Fft2::shared(g.n_z, g.n_v);
    let mut buf = f.coeffs().to_vec();
    let s = 1.0 / (2.0 * g.half_width);
    for row in buf.chunks_exact_mut(g.n_v) {
        for (j, c) in row.iter_mut().enumerate() {
            *c *= if j % 2 == 0 { s } else { -s };
        }
    }
    fft.rows(&mut buf, false);
    for ik in 0..g.n_z {
        let k = g.k_of(ik) as f64;
        if k == 0.0 {
            continue;
        }
        for (b, c) in buf[ik * g.n_v..(ik + 1) * g.n_v].iter_mut().enumerate() {
            *c *= Complex64::from_polar(1.0, k * phi[b]);
        }
    }
    fft.rows(&mut buf, true);
    let dy = g.dy();
    for row in buf.chunks_exact_mut(g.n_v) {
        for (j, c) in row.iter_mut().enumerate() {
            *c *= if j % 2 == 0 { dy } else { -dy };
        }
    }
    SpectralField::from_coeffs(g, buf).expect("shape preserved")
}
