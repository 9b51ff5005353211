use serde::{Deserialize, Serialize};

use crate::coordinates::{profile_l2, shifted_vorticity, CoordState};
use crate::multipliers::{MultiplierError, MultiplierSpec, WeightContext};
use crate::solver::frame::{kinetic_energy, lab_eta, laplacian_symbol};
use crate::solver::SimState;
use crate::spectral::{bracket, ell1, profile_derivative};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordOptions {
    /// Coefficients below `noise_floor · max|f̂|` are left out of the weighted
    /// norms, whose Sobolev and Gevrey factors would otherwise amplify
    /// round-off in empty high modes past the physical content.
    pub noise_floor: f64,
    /// Also evaluate the `CK_w` term, which needs `∂_t w/w` per mode.
    pub expensive: bool,
}

impl Default for RecordOptions {
    fn default() -> Self {
        Self {
            noise_floor: 1e-13,
            expensive: false,
        }
    }
}

/// Diagnostics at one time. Norms are `L²` over the box unless noted.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub l2_total: f64,
    pub l2_zero_mode: f64,
    /// `‖ũ_0‖₂` of the `x`-averaged velocity perturbation over the box.
    pub u0_l2: f64,
    /// `‖P≠0 ω̃‖₂` of the profile-shifted vorticity.
    pub l2_nonzero: f64,
    pub gevrey_A_sq: f64,
    pub gevrey_Anu_sq: f64,
    pub ck_lambda: f64,
    pub ck_lambda_nu: f64,
    pub ux_nonzero: f64,
    pub uy: f64,
    /// `‖P≠0 ψ‖` in the Gevrey norm with `σ − 3` Sobolev weight.
    pub psi_nonzero_gevrey: f64,
    pub g_inf: f64,
    pub h_l2: f64,
    pub dvh_l2: f64,
    pub remap_losses: f64,
    /// `½‖U‖² − ∫ production`, inviscidly conserved.
    pub energy: f64,
    pub enstrophy: f64,
    /// Fraction of `‖ω‖₂²` in `|y| > 3L/4`, near the periodic seam.
    pub seam_fraction: f64,
    pub min_vprime: f64,
    pub coords_masked: bool,
    pub ck_w: Option<f64>,
}

/// Evaluates one record.
///
/// Frame coefficients are converted to the unsheared-frame frequency
/// `η + k(t − τ)` before weighting, so remapped states get the same weights.
pub fn record(
    state: &SimState,
    coords: &CoordState,
    ctx: &WeightContext,
    opts: &RecordOptions,
) -> Result<DiagnosticsRecord, MultiplierError> {
    let f = &state.f_hat;
    let g = *f.grid();
    let t = state.t;
    let tau = state.offset;
    let d_eta = g.eta_spacing();
    let p = ctx.params();
    let lam = ctx.lambda(t);
    let lam_dot = ctx.lambda_dot(t);
    let max_abs = f.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let floor = opts.noise_floor * max_abs;

    let mut zero = 0.0;
    let (mut ux, mut uy) = (0.0, 0.0);
    let (mut a_sq, mut anu_sq, mut ck, mut ck_nu, mut psi_g) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut ck_w = 0.0;
    for ik in 0..g.n_z {
        let k = g.k_of(ik);
        for ij in 0..g.n_v {
            let c = f.coeffs()[g.index(ik, ij)];
            let a = c.norm_sqr();
            if a == 0.0 {
                continue;
            }
            let eta_f = g.eta_of(ij);
            if k == 0 {
                zero += a;
            } else {
                let q = laplacian_symbol(k, eta_f, tau);
                let l = lab_eta(k, eta_f, tau);
                ux += a * l * l / (q * q);
                uy += a * (k * k) as f64 / (q * q);
            }
            if c.norm() <= floor {
                continue;
            }
            let eta = eta_f + k as f64 * (t - tau);
            let grad_s = ell1(k, eta).powf(p.s);
            let la = ctx.multiplier_log(MultiplierSpec::A, k, eta, t)?;
            let wa = (2.0 * la).exp() * a;
            a_sq += wa;
            ck += grad_s * wa;
            if opts.expensive {
                ck_w += ctx.dtw_ratio(k, eta, t) * wa;
            }
            if k != 0 {
                let ln = ctx.multiplier_log(MultiplierSpec::ANu, k, eta, t)?;
                let wn = (2.0 * ln).exp() * a;
                anu_sq += wn;
                ck_nu += grad_s * wn;
                let qp = laplacian_symbol(k, eta, t);
                let lg = lam * ell1(k, eta).powf(p.s) + (p.sigma - 3.0) * bracket(k, eta).ln();
                psi_g += (2.0 * lg).exp() * a / (qp * qp);
            }
        }
    }
    let total = f.l2_norm_sq();
    let shifted = shifted_vorticity(f, &coords.phi);
    let mut nonzero = 0.0;
    for ik in 0..g.n_z {
        if g.k_of(ik) == 0 {
            continue;
        }
        nonzero += shifted.coeffs()[ik * g.n_v..(ik + 1) * g.n_v]
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>();
    }

    let seam_fraction = if total > 0.0 {
        let phys = f.to_physical();
        let cut = 0.75 * g.half_width;
        let mut seam = 0.0;
        let mut all = 0.0;
        for a in 0..g.n_z {
            for b in 0..g.n_v {
                let v = phys[a * g.n_v + b].powi(2);
                all += v;
                if g.y_at(b).abs() > cut {
                    seam += v;
                }
            }
        }
        if all > 0.0 { seam / all } else { 0.0 }
    } else {
        0.0
    };

    let (g_inf, h_l2, dvh_l2) = if coords.masked {
        (0.0, 0.0, 0.0)
    } else {
        let h_hat: Vec<_> = profile_derivative(&g, &coords.phi_hat, 1)
            .into_iter()
            .map(|c| c / t)
            .collect();
        let dh = profile_derivative(&g, &h_hat, 1);
        (
            coords.g.iter().fold(0.0f64, |m, x| m.max(x.abs())),
            profile_l2(&g, &h_hat),
            profile_l2(&g, &dh),
        )
    };

    Ok(DiagnosticsRecord {
        t,
        l2_total: total.sqrt(),
        l2_zero_mode: (zero * d_eta).sqrt(),
        u0_l2: (2.0 * std::f64::consts::PI).sqrt() * profile_l2(&g, &coords.zero.u0_hat),
        l2_nonzero: (nonzero * d_eta).sqrt(),
        gevrey_A_sq: a_sq * d_eta,
        gevrey_Anu_sq: anu_sq * d_eta,
        ck_lambda: -lam_dot * ck * d_eta,
        ck_lambda_nu: -lam_dot * ck_nu * d_eta,
        ux_nonzero: (ux * d_eta).sqrt(),
        uy: (uy * d_eta).sqrt(),
        psi_nonzero_gevrey: (psi_g * d_eta).sqrt(),
        g_inf,
        h_l2,
        dvh_l2,
        remap_losses: state.warnings.remap_lost_energy,
        energy: kinetic_energy(f, tau) - state.production,
        enstrophy: total,
        seam_fraction,
        min_vprime: coords.min_vprime(),
        coords_masked: coords.masked,
        ck_w: opts.expensive.then_some(ck_w * d_eta),
    })
}

/// One monitored quantity of the bootstrap report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapEntry {
    pub name: String,
    /// Power of `ε` the quantity is normalized by.
    pub epsilon_power: i32,
    pub initial_ratio: f64,
    pub max_ratio: f64,
    /// `max / initial`, or 0 when the initial value vanishes.
    pub growth: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapReport {
    pub epsilon: f64,
    pub factor: f64,
    pub entries: Vec<BootstrapEntry>,
}

impl BootstrapReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| !e.flagged)
    }

    pub fn get(&self, name: &str) -> Option<&BootstrapEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

/// Maximum of each bootstrap quantity over the run, normalized by `ε²` (energy
/// type) or `ε` (decay type), flagged if it grows past `factor` times its
/// initial value. Quantities that start at zero (the coordinate fields) are
/// reported but cannot be flagged.
pub fn bootstrap_report(records: &[DiagnosticsRecord], epsilon: f64, factor: f64) -> BootstrapReport {
    type Sel = fn(&DiagnosticsRecord) -> f64;
    let monitored: [(&str, i32, Sel); 5] = [
        ("gevrey_A_sq", 2, |r| r.gevrey_A_sq),
        ("gevrey_Anu_sq", 2, |r| r.gevrey_Anu_sq),
        ("u0_sq", 2, |r| r.u0_l2 * r.u0_l2),
        ("h_l2", 1, |r| r.h_l2),
        ("g_inf_t2", 1, |r| (1.0 + r.t * r.t) * r.g_inf),
    ];
    let entries = monitored
        .iter()
        .map(|&(name, pw, sel)| {
            let scale = if epsilon > 0.0 { epsilon.powi(pw) } else { 1.0 };
            let vals: Vec<f64> = records.iter().map(|r| sel(r) / scale).collect();
            let initial = vals.first().copied().unwrap_or(0.0);
            let max = vals.iter().copied().fold(0.0, f64::max);
            let growth = if initial > 0.0 { max / initial } else { 0.0 };
            BootstrapEntry {
                name: name.to_string(),
                epsilon_power: pw,
                initial_ratio: initial,
                max_ratio: max,
                growth,
                flagged: growth > factor || !max.is_finite(),
            }
        })
        .collect();
    BootstrapReport {
        epsilon,
        factor,
        entries,
    }
}
