use num_complex::Complex64;

use super::frame::laplacian_symbol;
use super::{remap_shear, SimConfig, SimState, SolverError, Stepper};
use crate::coordinates::{update_phi, CoordState, ZeroMode};
use crate::diagnostics::{record, DiagnosticsRecord, ModeHistory, ModeSample, RecordOptions};
use crate::linear::frame_phase;
use crate::multipliers::{WeightContext, WeightParams};
use crate::spectral::SpectralField;

/// What `run` keeps besides the record stream.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub weights: WeightParams,
    pub record: RecordOptions,
    /// Track nonlinear stream-function amplitudes for `1 ≤ |k| ≤ k_watch`.
    pub echo_k_watch: i64,
    /// Keep a state snapshot every this many records.
    pub snapshot_every: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            weights: WeightParams::default(),
            record: RecordOptions::default(),
            echo_k_watch: 0,
            snapshot_every: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub config: SimConfig,
    pub initial: SpectralField,
    pub records: Vec<DiagnosticsRecord>,
    pub coords: Vec<CoordState>,
    pub snapshots: Vec<SimState>,
    pub mode_history: Vec<ModeHistory>,
    pub final_state: SimState,
    pub steps: usize,
}

impl Trajectory {
    /// `(t, value)` pairs of one record field.
    pub fn series(&self, sel: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<(f64, f64)> {
        self.records.iter().map(|r| (r.t, sel(r))).collect()
    }
}

/// Integrates `config` to `t_max`, recording diagnostics every
/// `diagnostics_stride` steps and at the final time.
pub fn run(config: &SimConfig, opts: &RunOptions) -> Result<Trajectory, SolverError> {
    config.validate()?;
    let mut weights = opts.weights;
    weights.nu = config.nu;
    let ctx = WeightContext::new(weights)?;
    let grid = config.grid;
    let f_in = config.initial_field()?;
    let mut state = SimState::new(f_in.clone());
    let mut stepper = Stepper::new(grid, config.nu, config.nonlinear);
    let mut coord = CoordState::initial(grid, ZeroMode::from_state(&state))?;

    let mut out = Trajectory {
        config: config.clone(),
        initial: f_in.clone(),
        records: Vec::new(),
        coords: Vec::new(),
        snapshots: Vec::new(),
        mode_history: (1..=opts.echo_k_watch)
            .map(|k| ModeHistory {
                k,
                samples: Vec::new(),
            })
            .collect(),
        final_state: state.clone(),
        steps: 0,
    };
    let emit = |state: &SimState, coord: &CoordState, out: &mut Trajectory| -> Result<(), SolverError> {
        out.records.push(record(state, coord, &ctx, &opts.record)?);
        out.coords.push(coord.clone());
        if let Some(every) = opts.snapshot_every {
            if (out.records.len() - 1) % every.max(1) == 0 {
                out.snapshots.push(state.clone());
            }
        }
        for h in out.mode_history.iter_mut() {
            h.samples.push(departure_sample(&f_in, state, config.nu, h.k));
        }
        Ok(())
    };
    emit(&state, &coord, &mut out)?;

    let dt_max = config.dt_controller.dt_max;
    let tol = 1e-9 * dt_max;
    while config.t_max - state.t > tol {
        let mut dt = dt_max.min(config.t_max - state.t);
        let limit = stepper.cfl_limit(&state, config.dt_controller.cfl_safety);
        if dt > limit {
            dt = limit;
            state.warnings.cfl_limited_steps += 1;
        }
        stepper.step(&mut state, dt)?;
        if config.remap_enabled {
            remap_shear(&mut state);
        }
        coord = update_phi(&coord, ZeroMode::from_state(&state), dt, config.nu)?;
        out.steps += 1;
        let last = config.t_max - state.t <= tol;
        if out.steps % config.diagnostics_stride == 0 || last {
            emit(&state, &coord, &mut out)?;
        }
    }
    out.final_state = state;
    Ok(out)
}

/// `‖P_k(ψ − ψ_lin)‖₂` with `ψ_lin` the Kelvin evolution of the initial data.
fn departure_sample(f_in: &SpectralField, state: &SimState, nu: f64, k: i64) -> ModeSample {
    let g = state.grid();
    let t = state.t;
    let tau = state.offset;
    let shift = ((t - tau) / g.eta_spacing()).round() as i64;
    let mut acc = 0.0;
    let (mut best, mut best_eta) = (0.0, 0.0);
    for sign in [1i64, -1] {
        let kk = sign * k;
        let Some(ik) = g.row_of_k(kk) else { continue };
        for ij in 0..g.n_v {
            let eta_f = g.eta_of(ij);
            // the same physical mode in the initial (unremapped) frame
            let j0 = g.j_of(ij) + kk * shift;
            let lin = match g.col_of_j(j0) {
                Some(c0) => {
                    let eta0 = g.eta_of(c0);
                    f_in.coeffs()[g.index(ik, c0)] * (-frame_phase(kk, eta0, 0.0, t, nu)).exp()
                }
                None => Complex64::new(0.0, 0.0),
            };
            let d = state.f_hat.coeffs()[g.index(ik, ij)] - lin;
            let q = laplacian_symbol(kk, eta_f, tau);
            let v = d.norm_sqr() / (q * q);
            acc += v;
            if sign == 1 && v > best {
                best = v;
                best_eta = eta_f + kk as f64 * (t - tau);
            }
        }
    }
    ModeSample {
        t,
        amplitude: (acc * g.eta_spacing()).sqrt(),
        dominant_eta: best_eta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::kelvin_frame;
    use crate::solver::{DtController, InitialData};
    use crate::spectral::{Grid, DEFAULT_DEALIAS};
    use std::f64::consts::PI;

    fn config() -> SimConfig {
        let g = Grid::new(16, 64, 2.0 * PI, DEFAULT_DEALIAS).unwrap();
        let mut c = SimConfig::new(
            g,
            InitialData::Bump {
                kx: 1,
                width: 1.0,
                zero_mode: 0.5,
            },
        );
        c.t_max = 2.0;
        c.dt_controller = DtController {
            cfl_safety: 0.4,
            dt_max: 0.1,
        };
        c.diagnostics_stride = 5;
        c
    }

    #[test]
    fn linear_run_matches_kelvin() {
        let mut c = config();
        c.nonlinear = false;
        c.nu = 1e-3;
        let tr = run(&c, &RunOptions::default()).unwrap();
        let want = kelvin_frame(&tr.initial, c.nu, tr.final_state.t);
        let err = tr.final_state.f_hat.sub(&want).l2_norm() / want.l2_norm();
        assert!(err < 1e-12, "{err}");
        assert_eq!(tr.records.len(), 5);
        assert!((tr.final_state.t - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_epsilon_stays_zero() {
        let mut c = config();
        c.epsilon = 0.0;
        let tr = run(&c, &RunOptions::default()).unwrap();
        assert_eq!(tr.final_state.f_hat.l2_norm(), 0.0);
        assert!(tr.records.iter().all(|r| r.l2_total == 0.0));
    }

    #[test]
    fn deterministic_and_linear_departure_vanishes() {
        let mut c = config();
        c.initial_data = InitialData::Random { envelope: 2.0 };
        c.seed = 7;
        let o = RunOptions {
            echo_k_watch: 1,
            ..Default::default()
        };
        let a = run(&c, &o).unwrap();
        let b = run(&c, &o).unwrap();
        assert_eq!(a.final_state.f_hat.coeffs(), b.final_state.f_hat.coeffs());
        c.nonlinear = false;
        let lin = run(&c, &o).unwrap();
        assert!(lin.mode_history[0].samples.iter().all(|s| s.amplitude == 0.0));
    }
}
