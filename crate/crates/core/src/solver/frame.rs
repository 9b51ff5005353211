//! Fourier symbols in the shearing frame `z = x − τy`.
//!
//! A frame coefficient at `(k, η)` carries the physical `y`-wavenumber `η − kτ`.
//! Physical derivatives are `∂_x → ik` and `∂_y → i(η − kτ)`.

use num_complex::Complex64;

use crate::spectral::{Fft2, Grid, SpectralField};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Physical `y`-wavenumber of frame mode `(k, η)` at shear offset `tau`.
#[inline]
pub fn lab_eta(k: i64, eta: f64, tau: f64) -> f64 {
    eta - k as f64 * tau
}

/// `k² + (η − kτ)²`, the symbol of `−Δ_L`.
#[inline]
pub fn laplacian_symbol(k: i64, eta: f64, tau: f64) -> f64 {
    let kf = k as f64;
    let l = eta - kf * tau;
    kf * kf + l * l
}

/// `ψ̂ = −f̂ / (k² + (η − kτ)²)`, zero on the mean mode.
pub fn biot_savart(f: &SpectralField, tau: f64) -> SpectralField {
    f.map_modes(|k, eta, c| {
        let q = laplacian_symbol(k, eta, tau);
        if q == 0.0 {
            ZERO
        } else {
            -c / q
        }
    })
}

/// Physical velocity components `(U^x, U^y) = (−∂_y ψ, ∂_x ψ)` as frame coefficients.
pub fn velocity(f: &SpectralField, tau: f64) -> (SpectralField, SpectralField) {
    let g = *f.grid();
    let psi = biot_savart(f, tau);
    let ux = psi.map_modes(|k, eta, c| {
        if nyquist_j(&g, eta) {
            ZERO
        } else {
            Complex64::new(0.0, -lab_eta(k, eta, tau)) * c
        }
    });
    let uy = psi.map_modes(|k, _, c| {
        if nyquist_k(&g, k) {
            ZERO
        } else {
            Complex64::new(0.0, k as f64) * c
        }
    });
    (ux, uy)
}

fn nyquist_k(g: &Grid, k: i64) -> bool {
    k == (g.n_z / 2) as i64
}

fn nyquist_j(g: &Grid, eta: f64) -> bool {
    (eta - (g.n_v / 2) as f64 * g.eta_spacing()).abs() < 1e-9 * g.eta_spacing()
}

/// `∂_t ½‖U‖²` produced by the background shear: `Σ k(η − kτ)|f̂|²/q² Δη`.
pub fn shear_production(f: &SpectralField, tau: f64) -> f64 {
    let g = f.grid();
    let mut acc = 0.0;
    for ik in 0..g.n_z {
        let k = g.k_of(ik);
        if k == 0 {
            continue;
        }
        for ij in 0..g.n_v {
            let c = f.coeffs()[g.index(ik, ij)];
            let a = c.norm_sqr();
            if a == 0.0 {
                continue;
            }
            let eta = g.eta_of(ij);
            let q = laplacian_symbol(k, eta, tau);
            acc += k as f64 * lab_eta(k, eta, tau) * a / (q * q);
        }
    }
    acc * g.eta_spacing()
}

/// Kinetic energy `½‖U‖² = ½ Σ |f̂|²/q Δη`.
pub fn kinetic_energy(f: &SpectralField, tau: f64) -> f64 {
    let g = f.grid();
    let mut acc = 0.0;
    for ik in 0..g.n_z {
        let k = g.k_of(ik);
        for ij in 0..g.n_v {
            let q = laplacian_symbol(k, g.eta_of(ij), tau);
            if q > 0.0 {
                acc += f.coeffs()[g.index(ik, ij)].norm_sqr() / q;
            }
        }
    }
    0.5 * acc * g.eta_spacing()
}

/// Coefficients dropped by a lattice shift.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShiftLoss {
    pub modes: usize,
    pub energy: f64,
}

/// Moves every coefficient `(k, j)` to `(k, j − k·m)`.
///
/// Coefficients landing off the grid (or outside the dealias mask when
/// `masked`) are dropped and their `L²` energy is returned.
pub fn shift_lattice(field: &SpectralField, m: i64, masked: bool) -> (SpectralField, ShiftLoss) {
    let g = *field.grid();
    let mut out = SpectralField::zeros(g);
    let mut loss = ShiftLoss::default();
    for ik in 0..g.n_z {
        let k = g.k_of(ik);
        for ij in 0..g.n_v {
            let c = field.coeffs()[g.index(ik, ij)];
            if c == ZERO {
                continue;
            }
            match g.col_of_j(g.j_of(ij) - k * m) {
                Some(dst) if !masked || g.retained(ik, dst) => {
                    out.coeffs_mut()[g.index(ik, dst)] = c
                }
                _ => {
                    loss.modes += 1;
                    loss.energy += c.norm_sqr();
                }
            }
        }
    }
    loss.energy *= g.eta_spacing();
    (out, loss)
}

/// Scratch buffers for repeated evaluation of the nonlinear term.
#[derive(Debug)]
pub struct NonlinearWorkspace {
    grid: Grid,
    vel: Vec<Complex64>,
    grad: Vec<Complex64>,
    mask: Vec<bool>,
    /// Signed `k` per row and `η` per column.
    ks: Vec<f64>,
    etas: Vec<f64>,
}

impl NonlinearWorkspace {
    pub fn new(grid: Grid) -> Self {
        let ks = (0..grid.n_z)
            .map(|ik| {
                if ik == grid.n_z / 2 {
                    f64::NAN
                } else {
                    grid.k_of(ik) as f64
                }
            })
            .collect();
        let etas = (0..grid.n_v)
            .map(|ij| {
                if ij == grid.n_v / 2 {
                    f64::NAN
                } else {
                    grid.eta_of(ij)
                }
            })
            .collect();
        Self {
            grid,
            vel: vec![ZERO; grid.len()],
            grad: vec![ZERO; grid.len()],
            mask: grid.dealias_mask(),
            ks,
            etas,
        }
    }

    /// Packs `U^x + iU^y` into `vel` and `∂_xω + i∂_yω` into `grad`.
    fn pack(&mut self, f: &SpectralField, tau: f64, with_grad: bool) {
        let g = self.grid;
        let coeffs = f.coeffs();
        for ik in 0..g.n_z {
            let k = self.ks[ik];
            for ij in 0..g.n_v {
                let idx = g.index(ik, ij);
                let eta = self.etas[ij];
                let c = coeffs[idx];
                if !self.mask[idx] || k.is_nan() || eta.is_nan() || c == ZERO {
                    self.vel[idx] = ZERO;
                    self.grad[idx] = ZERO;
                    continue;
                }
                let l = eta - k * tau;
                let q = k * k + l * l;
                let psi = if q == 0.0 { ZERO } else { -c / q };
                // ux = -i l psi, uy = i k psi; packed as ux + i uy
                let ux = Complex64::new(psi.im * l, -psi.re * l);
                let uy = Complex64::new(-psi.im * k, psi.re * k);
                self.vel[idx] = ux + Complex64::new(-uy.im, uy.re);
                if with_grad {
                    // fx = i k c, fy = i l c; packed as fx + i fy
                    let fx = Complex64::new(-c.im * k, c.re * k);
                    let fy = Complex64::new(-c.im * l, c.re * l);
                    self.grad[idx] = fx + Complex64::new(-fy.im, fy.re);
                }
            }
        }
    }

    /// `max(|u_z|/Δz, |u_y|/Δy)` with the frame velocity `u_z = U^x − τU^y`.
    pub fn max_rate(&mut self, f: &SpectralField, tau: f64) -> f64 {
        let g = self.grid;
        self.pack(f, tau, false);
        Fft2::shared(g.n_z, g.n_v).inverse(&mut self.vel);
        let s = 1.0 / (2.0 * g.half_width);
        let (dz, dy) = (g.dz(), g.dy());
        self.vel.iter().fold(0.0, |m, v| {
            let (ux, uy) = (v.re * s, v.im * s);
            m.max(((ux - tau * uy).abs() / dz).max(uy.abs() / dy))
        })
    }

    /// `−U·∇ω` in frame coordinates, dealiased, with the mean mode removed.
    ///
    /// The two velocity components and the two gradient components are packed
    /// as real and imaginary parts of two complex fields, so one evaluation
    /// costs two inverse and one forward transform.
    pub fn rhs(&mut self, f: &SpectralField, tau: f64, out: &mut SpectralField) {
        let g = self.grid;
        self.pack(f, tau, true);
        let fft = Fft2::shared(g.n_z, g.n_v);
        fft.inverse(&mut self.vel);
        fft.inverse(&mut self.grad);
        // both packed fields carry the same inverse normalization and phase
        // convention as `SpectralField::to_physical`, applied once on the way back
        let out_buf = out.coeffs_mut();
        for i in 0..g.len() {
            let v = self.vel[i];
            let d = self.grad[i];
            out_buf[i] = Complex64::new(-(v.re * d.re + v.im * d.im), 0.0);
        }
        fft.forward(out_buf);
        let scale = phys_scale(&g);
        for ik in 0..g.n_z {
            for ij in 0..g.n_v {
                let idx = g.index(ik, ij);
                if self.mask[idx] {
                    out_buf[idx] *= scale;
                } else {
                    out_buf[idx] = ZERO;
                }
            }
        }
        out_buf[0] = ZERO;
    }
}

/// Combined normalization of one inverse pair and one forward transform.
///
/// With the `(−1)^j` origin phases omitted on both inverse inputs and the
/// forward output, the product picks up `(−1)^{j_1 + j_2 − j}`, which is `+1`
/// for every triad since `j = j_1 + j_2` modulo `n_v` and `n_v` is even.
fn phys_scale(g: &Grid) -> f64 {
    let inv = 1.0 / (2.0 * g.half_width);
    let fwd = g.dz() * g.dy() / (2.0 * std::f64::consts::PI);
    inv * inv * fwd
}

/// Convenience wrapper allocating a fresh workspace.
pub fn nonlinear_rhs(f: &SpectralField, tau: f64) -> SpectralField {
    let mut ws = NonlinearWorkspace::new(*f.grid());
    let mut out = SpectralField::zeros(*f.grid());
    ws.rhs(f, tau, &mut out);
    out
}
