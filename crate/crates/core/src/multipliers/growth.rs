use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{MultiplierError, WeightContext};

/// Fit of `ln(1/w(0,η)) ≈ c + m√η + p ln η`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthFit {
    /// `2m`, the exponent `μ` in `e^{(μ/2)√η}`.
    pub mu_fit: f64,
    pub sqrt_slope: f64,
    pub log_coeff: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares fit of the total growth `1/w(0, η)` of the weight construction.
pub fn growth_fit(eta_samples: &[f64], ctx: &WeightContext) -> Result<GrowthFit, MultiplierError> {
    let mut sorted: Vec<f64> = eta_samples.iter().map(|e| e.abs()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(MultiplierError::IllConditioned(
            "repeated eta values in growth fit".into(),
        ));
    }
    if sorted.len() < 4 {
        return Err(MultiplierError::IllConditioned(format!(
            "growth fit needs at least 4 distinct eta values, got {}",
            sorted.len()
        )));
    }
    let n = sorted.len();
    let x = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => sorted[i].sqrt(),
        _ => sorted[i].ln(),
    });
    let y = DVector::from_iterator(n, sorted.iter().map(|&e| -ctx.ln_w_nr(e, 0.0)));
    let svd = x.clone().svd(true, true);
    let sv = &svd.singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > 1e-10 * smax) {
        return Err(MultiplierError::IllConditioned(format!(
            "design matrix condition number {:.3e}",
            smax / smin
        )));
    }
    let coef = svd
        .solve(&y, 1e-14)
        .map_err(|e| MultiplierError::IllConditioned(e.to_string()))?;
    let resid = &y - &x * &coef;
    let mean = y.mean();
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res = resid.norm_squared();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 0.0 };
    if r_squared < 0.9 {
        return Err(MultiplierError::PoorFit { r_squared });
    }
    Ok(GrowthFit {
        mu_fit: 2.0 * coef[1],
        sqrt_slope: coef[1],
        log_coeff: coef[2],
        intercept: coef[0],
        r_squared,
    })
}

/// `n` log-spaced frequencies on `[lo, hi]`.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multipliers::WeightParams;

    #[test]
    fn repeated_eta_rejected() {
        let ctx = WeightContext::new(WeightParams::default()).unwrap();
        let err = growth_fit(&[100.0, 100.0, 400.0, 900.0], &ctx).unwrap_err();
        assert!(matches!(err, MultiplierError::IllConditioned(_)));
    }

    #[test]
    fn fit_quality_and_slope() {
        let ctx = WeightContext::new(WeightParams::default()).unwrap();
        let fit = growth_fit(&log_spaced(1e2, 1e4, 60), &ctx).unwrap();
        assert!(fit.r_squared > 0.99);
        // the product of (η/k²)^{1+2Cκ} over k ≤ √η grows like e^{2(1+2Cκ)√η}
        assert!((fit.sqrt_slope - 4.0).abs() < 0.4, "{fit:?}");
    }
}
