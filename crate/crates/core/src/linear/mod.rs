//! Closed-form Kelvin solution of the linearized equation around Couette flow.

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::{fit_decay, DecayFit, DecayKind, DecayModel, FitError};
use crate::solver::frame::{biot_savart, lab_eta, laplacian_symbol, shift_lattice};
use crate::spectral::{SpectralError, SpectralField};

#[derive(Debug, Error)]
pub enum LinearError {
    #[error("shear offset t = {t} is not a multiple of the lattice shift π/L = {spacing}")]
    Misaligned { t: f64, spacing: f64 },
    #[error("Orr response needs k != 0")]
    ZeroK,
    #[error("invalid input: {0}")]
    Config(String),
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `ν∫₀ᵗ k² + (η + k(t − τ))² dτ`: the viscous exponent of a mode that sits at
/// `y`-wavenumber `η` at time `t`.
pub fn viscous_phase(k: i64, eta: f64, t: f64, nu: f64) -> f64 {
    let kf = k as f64;
    let a = eta + kf * t;
    nu * t * (kf * kf + (a * a + a * eta + eta * eta) / 3.0)
}

/// Viscous exponent accumulated between frame offsets `t1` and `t2` by the
/// frame mode `(k, η)`, whose physical wavenumber is `η − kτ`.
pub fn frame_phase(k: i64, eta: f64, t1: f64, t2: f64, nu: f64) -> f64 {
    let kf = k as f64;
    let a = eta - kf * t1;
    let b = eta - kf * t2;
    nu * (t2 - t1) * (kf * kf + (a * a + a * b + b * b) / 3.0)
}

/// Kelvin evolution in the frame `z = x − ty`: each coefficient only decays.
pub fn kelvin_frame(omega_in: &SpectralField, nu: f64, t: f64) -> SpectralField {
    if nu == 0.0 {
        return omega_in.clone();
    }
    omega_in.map_modes(|k, eta, c| c * (-frame_phase(k, eta, 0.0, t, nu)).exp())
}

/// Result of mapping frame coefficients onto the physical lattice.
#[derive(Debug, Clone)]
pub struct KelvinSolution {
    pub omega: SpectralField,
    pub psi: SpectralField,
    /// Occupied modes whose sheared wavenumber left the grid.
    pub sheared_out: usize,
    /// `L²` energy carried by those modes.
    pub sheared_out_energy: f64,
}

/// Reindexes frame coefficients at offset `t` onto physical wavenumbers.
///
/// Needs `t` to be an integer multiple of `π/L` so that `η − kt` lands on the
/// lattice. Modes leaving the grid are dropped and counted.
pub fn frame_to_lab(frame: &SpectralField, t: f64) -> Result<KelvinSolution, LinearError> {
    let g = *frame.grid();
    let spacing = g.eta_spacing();
    let shift = t / spacing;
    let m = shift.round();
    if (shift - m).abs() > 1e-9 * shift.abs().max(1.0) {
        return Err(LinearError::Misaligned { t, spacing });
    }
    let (omega, loss) = shift_lattice(frame, m as i64, false);
    if loss.modes > 0 {
        log::warn!("{} modes sheared off the grid at t = {t}", loss.modes);
    }
    let psi = biot_savart(&omega, 0.0);
    Ok(KelvinSolution {
        omega,
        psi,
        sheared_out: loss.modes,
        sheared_out_energy: loss.energy,
    })
}

/// `ω̂(t, k, η) = ω̂_in(k, η + kt)·e^{−viscous_phase}` on the physical lattice.
pub fn kelvin_evolve(
    omega_in: &SpectralField,
    nu: f64,
    t: f64,
) -> Result<KelvinSolution, LinearError> {
    frame_to_lab(&kelvin_frame(omega_in, nu, t), t)
}

/// Peak stream-function amplification of a unit mode sheared through its critical time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrrResponse {
    pub t_peak: f64,
    pub amplification: f64,
}

/// `|ψ̂(t)|/|ψ̂(0)|` for a mode starting at `(k, η₀)`.
pub fn orr_amplification(k: i64, eta0: f64, t: f64, nu: f64) -> f64 {
    laplacian_symbol(k, eta0, 0.0) / laplacian_symbol(k, eta0, t)
        * (-frame_phase(k, eta0, 0.0, t, nu)).exp()
}

pub fn orr_response(k: i64, eta0: f64, nu: f64) -> Result<OrrResponse, LinearError> {
    if k == 0 {
        return Err(LinearError::ZeroK);
    }
    let t_crit = eta0 / k as f64;
    if !(t_crit > 0.0) {
        return Ok(OrrResponse {
            t_peak: 0.0,
            amplification: 1.0,
        });
    }
    let f = |t: f64| orr_amplification(k, eta0, t, nu);
    if nu == 0.0 {
        return Ok(OrrResponse {
            t_peak: t_crit,
            amplification: f(t_crit),
        });
    }
    // viscosity only moves the peak earlier; bracket it by a dense scan first
    let n = 400;
    let h = t_crit / n as f64;
    let best = (0..=n)
        .map(|i| i as f64 * h)
        .max_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap_or(0.0);
    let (mut lo, mut hi) = ((best - h).max(0.0), (best + h).min(t_crit));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
        if hi - lo < 1e-13 * t_crit.max(1.0) {
            break;
        }
    }
    let t_peak = 0.5 * (lo + hi);
    let (t_peak, amp) = if f(t_peak) >= f(0.0) {
        (t_peak, f(t_peak))
    } else {
        (0.0, 1.0)
    };
    Ok(OrrResponse {
        t_peak,
        amplification: amp,
    })
}

/// Norms of the Kelvin solution at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearSample {
    pub t: f64,
    pub ux_nonzero: f64,
    pub uy: f64,
    pub omega_zero: f64,
    pub omega_l2: f64,
    /// `H^σ` norm of the frame vorticity.
    pub frame_sobolev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearRateReport {
    pub samples: Vec<LinearSample>,
    pub window: (f64, f64),
    pub ux_fit: DecayFit,
    pub uy_fit: DecayFit,
    /// Fitted `c` in `e^{−cνt³}` for the nonzero-mode vorticity, when `ν > 0`.
    pub mixing_fit: Option<DecayFit>,
}

/// Inviscid fit window `[10, min(100, ½(νc)^{−1/3})]` with `c = 1/3`.
pub fn default_fit_window(nu: f64) -> (f64, f64) {
    let hi = if nu > 0.0 {
        (0.5 * (nu / 3.0).powf(-1.0 / 3.0)).min(100.0)
    } else {
        100.0
    };
    (10.0, hi)
}

/// Evaluates norms of the frame Kelvin solution at one time.
pub fn linear_sample(omega_in: &SpectralField, nu: f64, t: f64, sigma: f64) -> LinearSample {
    let f = kelvin_frame(omega_in, nu, t);
    let g = *f.grid();
    let (mut ux, mut uy, mut zero, mut total, mut sob) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ik in 0..g.n_z {
        let k = g.k_of(ik);
        for ij in 0..g.n_v {
            let eta = g.eta_of(ij);
            let a = f.coeffs()[g.index(ik, ij)].norm_sqr();
            if a == 0.0 {
                continue;
            }
            total += a;
            sob += a * (1.0 + (k * k) as f64 + eta * eta).powf(sigma);
            let q = laplacian_symbol(k, eta, t);
            if k == 0 {
                zero += a;
                continue;
            }
            let l = lab_eta(k, eta, t);
            ux += a * l * l / (q * q);
            uy += a * (k * k) as f64 / (q * q);
        }
    }
    let d = g.eta_spacing();
    LinearSample {
        t,
        ux_nonzero: (ux * d).sqrt(),
        uy: (uy * d).sqrt(),
        omega_zero: (zero * d).sqrt(),
        omega_l2: (total * d).sqrt(),
        frame_sobolev: (sob * d).sqrt(),
    }
}

/// Time series of linear norms and power-law fits over `window`.
pub fn linear_rate_report(
    omega_in: &SpectralField,
    nu: f64,
    t_grid: &[f64],
    window: Option<(f64, f64)>,
    sigma: f64,
) -> Result<LinearRateReport, LinearError> {
    if nu < 0.0 {
        return Err(LinearError::Config(format!("nu = {nu} must be nonnegative")));
    }
    let window = window.unwrap_or_else(|| default_fit_window(nu));
    let samples: Vec<LinearSample> = t_grid
        .iter()
        .map(|&t| linear_sample(omega_in, nu, t, sigma))
        .collect();
    let power = DecayModel {
        kind: DecayKind::Power,
        window,
    };
    let series = |sel: fn(&LinearSample) -> f64| -> Vec<(f64, f64)> {
        samples.iter().map(|s| (s.t, sel(s))).collect()
    };
    let ux_fit = fit_decay(&series(|s| s.ux_nonzero), &power)?;
    let uy_fit = fit_decay(&series(|s| s.uy), &power)?;
    let mixing_fit = if nu > 0.0 {
        let nz: Vec<(f64, f64)> = samples
            .iter()
            .map(|s| (s.t, (s.omega_l2.powi(2) - s.omega_zero.powi(2)).max(0.0).sqrt()))
            .collect();
        let t_end = t_grid.iter().cloned().fold(0.0, f64::max);
        fit_decay(
            &nz,
            &DecayModel {
                kind: DecayKind::ExpNuTCubed { nu },
                window: (window.0, t_end),
            },
        )
        .ok()
    } else {
        None
    };
    Ok(LinearRateReport {
        samples,
        window,
        ux_fit,
        uy_fit,
        mixing_fit,
    })
}
