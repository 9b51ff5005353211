use super::{SpectralError, SpectralField};

/// Parameters of `‖f‖² = Σ_k ∫ |f̂_k(η)|² e^{2λ|k,η|^s} ⟨k,η⟩^{2σ} dη`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GevreyParams {
    pub lambda: f64,
    pub sigma: f64,
    pub s: f64,
}

impl GevreyParams {
    /// `λ = 0` is accepted so the family contains the Sobolev and `L²` norms.
    pub fn new(lambda: f64, sigma: f64, s: f64) -> Result<Self, SpectralError> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(SpectralError::Config(format!(
                "Gevrey radius lambda = {lambda} must be finite and >= 0"
            )));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(SpectralError::Config(format!(
                "Sobolev correction sigma = {sigma} must be >= 0"
            )));
        }
        if !(s > 0.5 && s < 1.0) {
            return Err(SpectralError::Config(format!(
                "Gevrey index s = {s} must lie strictly inside (1/2, 1)"
            )));
        }
        Ok(Self { lambda, sigma, s })
    }

    pub fn log_weight(&self, k: i64, eta: f64) -> f64 {
        let mut lw = 0.0;
        if self.lambda != 0.0 {
            lw += self.lambda * ell1(k, eta).powf(self.s);
        }
        if self.sigma != 0.0 {
            lw += self.sigma * bracket(k, eta).ln();
        }
        lw
    }
}

/// `|k, η| = |k| + |η|`.
#[inline]
pub fn ell1(k: i64, eta: f64) -> f64 {
    k.unsigned_abs() as f64 + eta.abs()
}

/// `⟨k, η⟩ = (1 + k² + η²)^{1/2}`.
#[inline]
pub fn bracket(k: i64, eta: f64) -> f64 {
    let k = k as f64;
    (1.0 + k * k + eta * eta).sqrt()
}

/// Natural log of `Σ |f̂|² m(k,η)² Δη` where `ln m` is supplied by `log_weight`.
///
/// Returns `-∞` for a zero field. Terms more than 700 e-folds below the
/// largest are dropped. `log_weight` may return `-∞` to exclude a mode.
pub fn log_weighted_norm_sq(
    field: &SpectralField,
    mut log_weight: impl FnMut(i64, f64) -> f64,
) -> f64 {
    let g = *field.grid();
    let coeffs = field.coeffs();
    let mut terms = Vec::new();
    let mut top = f64::NEG_INFINITY;
    for ik in 0..g.n_z {
        let k = g.k_of(ik);
        for ij in 0..g.n_v {
            let c = coeffs[g.index(ik, ij)];
            let a = c.norm_sqr();
            if a == 0.0 {
                continue;
            }
            let lw = log_weight(k, g.eta_of(ij));
            if lw == f64::NEG_INFINITY {
                continue;
            }
            let term = a.ln() + 2.0 * lw;
            top = top.max(term);
            terms.push(term);
        }
    }
    if top == f64::NEG_INFINITY {
        return top;
    }
    let sum: f64 = terms
        .iter()
        .filter(|&&t| t >= top - 700.0)
        .map(|t| (t - top).exp())
        .sum();
    top + sum.ln() + g.eta_spacing().ln()
}

/// `ln ‖f‖_{G^{λ,σ;s}}`, or an overflow error naming the dominant frequency
/// when the norm exceeds the double range.
pub fn log_gevrey_norm(field: &SpectralField, p: &GevreyParams) -> Result<f64, SpectralError> {
    let lse = log_weighted_norm_sq(field, |k, eta| p.log_weight(k, eta));
    let half = 0.5 * lse;
    if half != f64::NEG_INFINITY && !(half <= f64::MAX.ln()) {
        let (k, eta) = dominant_mode(field, |k, eta| p.log_weight(k, eta));
        return Err(SpectralError::Overflow { k, eta });
    }
    Ok(half)
}

pub fn gevrey_norm(field: &SpectralField, p: &GevreyParams) -> Result<f64, SpectralError> {
    Ok(log_gevrey_norm(field, p)?.exp())
}

pub(crate) fn dominant_mode(
    field: &SpectralField,
    mut log_weight: impl FnMut(i64, f64) -> f64,
) -> (i64, f64) {
    let g = *field.grid();
    let mut best = (f64::NEG_INFINITY, 0, 0.0);
    for ik in 0..g.n_z {
        for ij in 0..g.n_v {
            let a = field.coeffs()[g.index(ik, ij)].norm_sqr();
            if a == 0.0 {
                continue;
            }
            let (k, eta) = (g.k_of(ik), g.eta_of(ij));
            let t = a.ln() + 2.0 * log_weight(k, eta);
            if t > best.0 {
                best = (t, k, eta);
            }
        }
    }
    (best.1, best.2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{Grid, DEFAULT_DEALIAS};
    use num_complex::Complex64;
    use std::f64::consts::{E, PI};

    #[test]
    fn zero_field_has_zero_norm() {
        let g = Grid::new(8, 8, PI, DEFAULT_DEALIAS).unwrap();
        let f = SpectralField::zeros(g);
        let p = GevreyParams::new(1.0, 1.0, 0.6).unwrap();
        assert_eq!(gevrey_norm(&f, &p).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_value() {
        let g = Grid::new(8, 8, PI, DEFAULT_DEALIAS).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 0, Complex64::new(1.0, 0.0)).unwrap();
        let p = GevreyParams::new(1.0, 1.0, 0.6).unwrap();
        let n = gevrey_norm(&f, &p).unwrap();
        assert!((n - E * 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn lambda_zero_is_l2() {
        let g = Grid::new(8, 16, 2.0, DEFAULT_DEALIAS).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_real_mode(2, 3, Complex64::new(0.3, -0.7)).unwrap();
        f.set_real_mode(1, -5, Complex64::new(1.1, 0.2)).unwrap();
        let p = GevreyParams::new(0.0, 0.0, 0.6).unwrap();
        assert!((gevrey_norm(&f, &p).unwrap() - f.l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn overflow_names_frequency() {
        let g = Grid::new(8, 64, 0.01, DEFAULT_DEALIAS).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(1, 20, Complex64::new(1.0, 0.0)).unwrap();
        let p = GevreyParams::new(200.0, 0.0, 0.99).unwrap();
        match gevrey_norm(&f, &p) {
            Err(SpectralError::Overflow { k, eta }) => {
                assert_eq!(k, 1);
                assert!((eta - 20.0 * PI / 0.01).abs() < 1e-6);
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_index() {
        assert!(GevreyParams::new(1.0, 0.0, 0.5).is_err());
        assert!(GevreyParams::new(1.0, 0.0, 1.0).is_err());
        assert!(GevreyParams::new(-1.0, 0.0, 0.6).is_err());
    }
}
