use num_complex::Complex64;
use serde::Serialize;

use super::frame::{shear_production, shift_lattice, NonlinearWorkspace};
use super::SolverError;
use crate::linear::frame_phase;
use crate::spectral::{Grid, SpectralField};

/// Counters for events that lose information without failing the run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Warnings {
    pub remap_lost_modes: usize,
    pub remap_lost_energy: f64,
    pub cfl_limited_steps: usize,
}

/// Solver state in the shearing frame.
#[derive(Debug, Clone)]
pub struct SimState {
    pub t: f64,
    /// Shear offset `τ` of the frame `z = x − τy`; equals `t` until a remap.
    pub offset: f64,
    pub f_hat: SpectralField,
    pub remap_count: usize,
    pub warnings: Warnings,
    /// `∫₀ᵗ` of the kinetic energy produced by the background shear, integrated
    /// with the same stages as the vorticity so that `½‖U‖² − production` is
    /// an inviscid invariant.
    pub production: f64,
}

impl SimState {
    pub fn new(f_hat: SpectralField) -> Self {
        Self {
            t: 0.0,
            offset: 0.0,
            f_hat,
            remap_count: 0,
            warnings: Warnings::default(),
            production: 0.0,
        }
    }

    pub fn grid(&self) -> &Grid {
        self.f_hat.grid()
    }
}

/// Lawson integrating-factor RK4 with exact per-mode viscous decay.
#[derive(Debug)]
pub struct Stepper {
    grid: Grid,
    nu: f64,
    nonlinear: bool,
    ws: NonlinearWorkspace,
    k: [SpectralField; 4],
    stage: SpectralField,
    e_half_a: Vec<f64>,
    e_half_b: Vec<f64>,
    /// `max(|u_z|/Δz, |u_y|/Δy)` at the start of the last step.
    last_rate: f64,
}

impl Stepper {
    pub fn new(grid: Grid, nu: f64, nonlinear: bool) -> Self {
        let z = SpectralField::zeros(grid);
        Self {
            grid,
            nu,
            nonlinear,
            ws: NonlinearWorkspace::new(grid),
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            stage: z,
            e_half_a: vec![1.0; grid.len()],
            e_half_b: vec![1.0; grid.len()],
            last_rate: 0.0,
        }
    }

    /// Largest stable step for the current state under `cfl_safety`.
    pub fn cfl_limit(&mut self, state: &SimState, cfl_safety: f64) -> f64 {
        if !self.nonlinear {
            return f64::INFINITY;
        }
        let rate = self.ws.max_rate(&state.f_hat, state.offset);
        self.last_rate = rate;
        if rate > 0.0 {
            cfl_safety / rate
        } else {
            f64::INFINITY
        }
    }

    /// Advances `state` by `dt`. The caller is responsible for the CFL bound;
    /// see [`Stepper::cfl_limit`].
    pub fn step(&mut self, state: &mut SimState, dt: f64) -> Result<(), SolverError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(SolverError::Config(format!("time step {dt} must be positive")));
        }
        let g = self.grid;
        let (t0, tm, t1) = (state.offset, state.offset + 0.5 * dt, state.offset + dt);
        let viscous = self.nu > 0.0;
        if viscous {
            for ik in 0..g.n_z {
                let k = g.k_of(ik);
                for ij in 0..g.n_v {
                    let eta = g.eta_of(ij);
                    let i = g.index(ik, ij);
                    self.e_half_a[i] = (-frame_phase(k, eta, t0, tm, self.nu)).exp();
                    self.e_half_b[i] = (-frame_phase(k, eta, tm, t1, self.nu)).exp();
                }
            }
        }
        if !self.nonlinear {
            if viscous {
                for (c, (a, b)) in state
                    .f_hat
                    .coeffs_mut()
                    .iter_mut()
                    .zip(self.e_half_a.iter().zip(&self.e_half_b))
                {
                    *c *= a * b;
                }
            }
            let p0 = shear_production(&state.f_hat, t0);
            let pm = shear_production(&state.f_hat, tm);
            let p1 = shear_production(&state.f_hat, t1);
            state.production += dt / 6.0 * (p0 + 4.0 * pm + p1);
            state.t += dt;
            state.offset = t1;
            return Ok(());
        }

        let f0 = &state.f_hat;
        let n = g.len();
        let ea = &self.e_half_a;
        let eb = &self.e_half_b;
        let h = dt;

        // stage 1
        self.ws.rhs(f0, t0, &mut self.k[0]);
        let p1 = shear_production(f0, t0);
        // stage 2: P_a (f0 + h/2 k1)
        {
            let (k1, s) = (self.k[0].coeffs(), self.stage.coeffs_mut());
            for i in 0..n {
                let e = if viscous { ea[i] } else { 1.0 };
                s[i] = (f0.coeffs()[i] + 0.5 * h * k1[i]) * e;
            }
        }
        self.ws.rhs(&self.stage, tm, &mut self.k[1]);
        let p2 = shear_production(&self.stage, tm);
        // stage 3: P_a f0 + h/2 k2
        {
            let (k2, s) = (self.k[1].coeffs(), self.stage.coeffs_mut());
            for i in 0..n {
                let e = if viscous { ea[i] } else { 1.0 };
                s[i] = f0.coeffs()[i] * e + 0.5 * h * k2[i];
            }
        }
        self.ws.rhs(&self.stage, tm, &mut self.k[2]);
        let p3 = shear_production(&self.stage, tm);
        // stage 4: P_a P_b f0 + h P_b k3
        {
            let (k3, s) = (self.k[2].coeffs(), self.stage.coeffs_mut());
            for i in 0..n {
                let (a, b) = if viscous { (ea[i], eb[i]) } else { (1.0, 1.0) };
                s[i] = f0.coeffs()[i] * (a * b) + h * b * k3[i];
            }
        }
        self.ws.rhs(&self.stage, t1, &mut self.k[3]);
        let p4 = shear_production(&self.stage, t1);

        let [k1, k2, k3, k4] = &self.k;
        let out = state.f_hat.coeffs_mut();
        let mut finite = true;
        for i in 0..n {
            let (a, b) = if viscous { (ea[i], eb[i]) } else { (1.0, 1.0) };
            let ab = a * b;
            let v = out[i] * ab
                + h / 6.0
                    * (k1.coeffs()[i] * ab + 2.0 * b * (k2.coeffs()[i] + k3.coeffs()[i])
                        + k4.coeffs()[i]);
            finite &= v.re.is_finite() && v.im.is_finite();
            out[i] = v;
        }
        out[0] = Complex64::new(0.0, 0.0);
        if !finite {
            return Err(SolverError::NonFinite { t: state.t + dt });
        }
        state.production += h / 6.0 * (p1 + 2.0 * p2 + 2.0 * p3 + p4);
        state.t += dt;
        state.offset = t1;
        Ok(())
    }

    pub fn last_rate(&self) -> f64 {
        self.last_rate
    }
}

/// Outcome of a shear remap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct RemapReport {
    pub shifts: i64,
    pub lost_modes: usize,
    pub lost_energy: f64,
}

/// Resets the frame offset by whole box-shear units `π/L`, reindexing
/// `f̂_k(η) → f̂_k(η + k·shift)`. Modes pushed outside the dealiased lattice
/// are dropped and counted.
pub fn remap_shear(state: &mut SimState) -> RemapReport {
    let d = state.grid().eta_spacing();
    let shifts = (state.offset / d + 1e-12).floor() as i64;
    if shifts <= 0 {
        return RemapReport::default();
    }
    let (f, loss) = shift_lattice(&state.f_hat, shifts, true);
    state.f_hat = f;
    state.offset -= shifts as f64 * d;
    state.remap_count += 1;
    state.warnings.remap_lost_modes += loss.modes;
    state.warnings.remap_lost_energy += loss.energy;
    RemapReport {
        shifts,
        lost_modes: loss.modes,
        lost_energy: loss.energy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linear::kelvin_frame;
    use crate::solver::frame::kinetic_energy;
    use crate::spectral::DEFAULT_DEALIAS;
    use std::f64::consts::PI;

    fn two_mode(g: Grid, amp: f64) -> SpectralField {
        let mut f = SpectralField::zeros(g);
        f.set_real_mode(1, 4, Complex64::new(amp, 0.0)).unwrap();
        f.set_real_mode(0, 2, Complex64::new(0.0, amp)).unwrap();
        f.set_real_mode(2, -3, Complex64::new(0.5 * amp, 0.2 * amp)).unwrap();
        f
    }

    #[test]
    fn linear_steps_match_kelvin() {
        let g = Grid::new(16, 64, 2.0 * PI, DEFAULT_DEALIAS).unwrap();
        let f = two_mode(g, 1.0);
        let mut st = SimState::new(f.clone());
        let mut s = Stepper::new(g, 1e-2, false);
        for _ in 0..50 {
            s.step(&mut st, 0.2).unwrap();
        }
        let want = kelvin_frame(&f, 1e-2, st.t);
        assert!(st.f_hat.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid::new(16, 32, PI, DEFAULT_DEALIAS).unwrap();
        let mut st = SimState::new(SpectralField::zeros(g));
        let mut s = Stepper::new(g, 1e-3, true);
        s.step(&mut st, 0.1).unwrap();
        assert_eq!(st.f_hat.l2_norm(), 0.0);
    }

    #[test]
    fn fourth_order_one_step() {
        let g = Grid::new(16, 32, PI, DEFAULT_DEALIAS).unwrap();
        let f = two_mode(g, 2.0);
        let run = |dt: f64, n: usize| {
            let mut st = SimState::new(f.clone());
            let mut s = Stepper::new(g, 0.0, true);
            for _ in 0..n {
                s.step(&mut st, dt).unwrap();
            }
            st.f_hat
        };
        let reference = run(0.025 / 16.0, 16);
        let e1 = run(0.025, 1).sub(&reference).l2_norm();
        let e2 = run(0.0125, 2).sub(&reference).l2_norm();
        let order = (e1 / e2).log2();
        // a single step carries O(dt^5) local error; two half steps give 2·(dt/2)^5
        assert!(order > 3.7, "order {order}, e1 {e1:e}, e2 {e2:e}");
    }

    #[test]
    fn inviscid_invariants() {
        let g = Grid::new(16, 64, 2.0 * PI, DEFAULT_DEALIAS).unwrap();
        let f = two_mode(g, 0.05);
        let mut st = SimState::new(f.clone());
        let mut s = Stepper::new(g, 0.0, true);
        let e0 = kinetic_energy(&st.f_hat, 0.0);
        let z0 = st.f_hat.l2_norm_sq();
        for _ in 0..100 {
            s.step(&mut st, 0.05).unwrap();
        }
        let e1 = kinetic_energy(&st.f_hat, st.offset) - st.production;
        assert!(((e1 - e0) / e0).abs() < 1e-9, "{e0} {e1}");
        assert!(((st.f_hat.l2_norm_sq() - z0) / z0).abs() < 1e-9);
        assert!(st.f_hat.hermitian_defect() < 1e-15);
    }

    #[test]
    fn viscous_enstrophy_nonincreasing() {
        let g = Grid::new(16, 64, 2.0 * PI, DEFAULT_DEALIAS).unwrap();
        let mut st = SimState::new(two_mode(g, 0.2));
        let mut s = Stepper::new(g, 1e-2, true);
        let mut prev = st.f_hat.l2_norm();
        for _ in 0..40 {
            s.step(&mut st, 0.1).unwrap();
            let now = st.f_hat.l2_norm();
            assert!(now <= prev * (1.0 + 1e-12));
            prev = now;
        }
    }

    fn eval_lab(f: &SpectralField, tau: f64, x: f64, y: f64) -> f64 {
        let g = f.grid();
        let mut acc = Complex64::new(0.0, 0.0);
        for ik in 0..g.n_z {
            for ij in 0..g.n_v {
                let (k, eta) = (g.k_of(ik) as f64, g.eta_of(ij));
                let z = x - tau * y;
                acc += f.coeffs()[g.index(ik, ij)] * Complex64::from_polar(1.0, k * z + eta * y);
            }
        }
        acc.re
    }

    #[test]
    fn remap_preserves_field() {
        let g = Grid::new(8, 32, PI, DEFAULT_DEALIAS).unwrap();
        let f = two_mode(g, 1.0);
        let mut st = SimState::new(f.clone());
        st.offset = 2.3;
        let before: Vec<f64> = [(0.3, 0.7), (1.9, -2.2), (5.0, 0.1)]
            .iter()
            .map(|&(x, y)| eval_lab(&f, 2.3, x, y))
            .collect();
        let r = remap_shear(&mut st);
        assert_eq!(r.shifts, 2);
        assert_eq!(r.lost_modes, 0);
        assert!((st.offset - 0.3).abs() < 1e-12);
        for (&(x, y), b) in [(0.3, 0.7), (1.9, -2.2), (5.0, 0.1)].iter().zip(before) {
            assert!((eval_lab(&st.f_hat, st.offset, x, y) - b).abs() < 1e-12);
        }
        let snapshot = st.f_hat.clone();
        let again = remap_shear(&mut st);
        assert_eq!(again.shifts, 0);
        assert_eq!(st.f_hat.max_abs_diff(&snapshot), 0.0);
    }

    #[test]
    fn remap_loss_bookkeeping() {
        let g = Grid::new(8, 32, PI, DEFAULT_DEALIAS).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_real_mode(2, 8, Complex64::new(1.0, 0.0)).unwrap();
        f.set_real_mode(1, 1, Complex64::new(0.5, 0.0)).unwrap();
        f.set_real_mode(0, 3, Complex64::new(0.25, 0.0)).unwrap();
        let mut st = SimState::new(f);
        st.offset = 3.0;
        let r = remap_shear(&mut st);
        // (2, 8) → (2, 2) and (1, 1) → (1, −2), all inside |j| ≤ 10
        assert_eq!((r.shifts, r.lost_modes), (3, 0));
        let before = st.f_hat.l2_norm_sq();
        st.offset = 10.0;
        let r = remap_shear(&mut st);
        // k = ±1, ±2 leave the dealiased band; the k = 0 mode stays
        assert_eq!(r.lost_modes, 4);
        assert!((r.lost_energy - 2.5).abs() < 1e-12);
        assert!((r.lost_energy + st.f_hat.l2_norm_sq() - before).abs() < 1e-12);
    }
}
