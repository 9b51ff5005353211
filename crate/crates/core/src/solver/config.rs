use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SolverError;
use crate::spectral::{Grid, SpectralField};

/// One real Fourier mode of the initial vorticity; its conjugate is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSpec {
    pub k: i64,
    /// Must lie on the lattice `π/L · ℤ`.
    pub eta: f64,
    pub re: f64,
    pub im: f64,
}

/// Shape of the initial vorticity. The field is rescaled to `‖ω_in‖₂ = ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InitialData {
    Modes(Vec<ModeSpec>),
    /// `cos(kx·x)·G(y) + zero_mode·G(y)` with `G(y) = e^{−y²/(2w²)}`, mean removed.
    Bump { kx: i64, width: f64, zero_mode: f64 },
    /// Random phases under a Gaussian envelope `e^{−(k²+η²)/(2s²)}`.
    Random { envelope: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtController {
    pub cfl_safety: f64,
    pub dt_max: f64,
}

impl Default for DtController {
    fn default() -> Self {
        Self {
            cfl_safety: 0.4,
            dt_max: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Integrator {
    Rk4IntegratingFactor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub grid: Grid,
    pub nu: f64,
    pub epsilon: f64,
    pub initial_data: InitialData,
    pub t_max: f64,
    pub dt_controller: DtController,
    pub integrator: Integrator,
    pub remap_enabled: bool,
    pub diagnostics_stride: usize,
    pub seed: u64,
    /// Switches the `U·∇ω` term off for Kelvin-oracle runs.
    pub nonlinear: bool,
}

impl SimConfig {
    pub fn new(grid: Grid, initial_data: InitialData) -> Self {
        Self {
            grid,
            nu: 0.0,
            epsilon: 1e-3,
            initial_data,
            t_max: 10.0,
            dt_controller: DtController::default(),
            integrator: Integrator::Rk4IntegratingFactor,
            remap_enabled: false,
            diagnostics_stride: 10,
            seed: 0,
            nonlinear: true,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: String| Err(SolverError::Config(m));
        if !(self.nu >= 0.0) || !self.nu.is_finite() {
            return bad(format!("nu = {} must be nonnegative", self.nu));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return bad(format!("epsilon = {} must be nonnegative", self.epsilon));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return bad(format!("t_max = {} must be positive", self.t_max));
        }
        let c = &self.dt_controller;
        if !(c.dt_max > 0.0) || !(c.cfl_safety > 0.0) {
            return bad("dt_max and cfl_safety must be positive".into());
        }
        if self.diagnostics_stride == 0 {
            return bad("diagnostics_stride must be positive".into());
        }
        match &self.initial_data {
            InitialData::Modes(m) if m.is_empty() => bad("mode list is empty".into()),
            InitialData::Bump { width, .. } if !(*width > 0.0) => {
                bad(format!("bump width {width} must be positive"))
            }
            InitialData::Random { envelope } if !(*envelope > 0.0) => {
                bad(format!("random envelope {envelope} must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Dealiased, mean-free initial vorticity scaled to `‖ω_in‖₂ = ε`.
    pub fn initial_field(&self) -> Result<SpectralField, SolverError> {
        self.validate()?;
        let g = self.grid;
        let mut f = match &self.initial_data {
            InitialData::Modes(modes) => {
                let mut f = SpectralField::zeros(g);
                for m in modes {
                    let j = m.eta / g.eta_spacing();
                    if (j - j.round()).abs() > 1e-9 * j.abs().max(1.0) {
                        return Err(SolverError::Config(format!(
                            "mode eta = {} is not a multiple of pi/L = {}",
                            m.eta,
                            g.eta_spacing()
                        )));
                    }
                    let (k, j) = (m.k, j.round() as i64);
                    if k == 0 && j == 0 {
                        continue;
                    }
                    let c = f.get(k, j) + Complex64::new(m.re, m.im);
                    f.set_real_mode(k, j, c)
                        .map_err(|e| SolverError::Config(e.to_string()))?;
                }
                f
            }
            InitialData::Bump {
                kx,
                width,
                zero_mode,
            } => {
                let mut samples = vec![0.0; g.len()];
                for a in 0..g.n_z {
                    let cx = (*kx as f64 * g.z_at(a)).cos();
                    for b in 0..g.n_v {
                        let y = g.y_at(b);
                        let bump = (-0.5 * y * y / (width * width)).exp();
                        samples[a * g.n_v + b] = (cx + zero_mode) * bump;
                    }
                }
                SpectralField::from_physical(g, &samples)?
            }
            InitialData::Random { envelope } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut f = SpectralField::zeros(g);
                let (km, jm) = (g.dealias_k_max(), g.dealias_j_max());
                for k in 0..=km {
                    for j in -jm..=jm {
                        if k == 0 && j <= 0 {
                            continue;
                        }
                        let eta = j as f64 * g.eta_spacing();
                        let amp = (-((k * k) as f64 + eta * eta) / (2.0 * envelope * envelope)).exp();
                        let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                        f.set_real_mode(k, j, Complex64::from_polar(amp, phase))?;
                    }
                }
                f
            }
        };
        f.apply_dealias();
        f.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        let n = f.l2_norm();
        if self.epsilon == 0.0 || n == 0.0 {
            return Ok(SpectralField::zeros(g));
        }
        f.scale(self.epsilon / n);
        Ok(f)
    }
}
