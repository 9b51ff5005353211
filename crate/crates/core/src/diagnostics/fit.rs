use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Rate forms, each fitted by a straight line in its linearizing coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecayKind {
    /// `y = C⟨t⟩^p`; reports `p`.
    Power,
    /// `y = C e^{−cνt³}`; reports `c`.
    ExpNuTCubed { nu: f64 },
    /// `y = C / (⟨t⟩⟨νt³⟩^α)`; reports `α`.
    PolyNuTCubed { nu: f64 },
    /// `y = C⟨νt⟩^p`; reports `p` (the heat rate is `−1/4`).
    QuarterHeat { nu: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayModel {
    pub kind: DecayKind,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub coefficient: f64,
    pub exponent: f64,
    pub r_squared: f64,
    pub samples: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("fit window holds {got} samples, at least 10 are required")]
    TooFewSamples { got: usize },
    #[error("non-positive value {value} at t = {t} inside the fit window")]
    NonPositive { t: f64, value: f64 },
    #[error("degenerate abscissa: all samples share one coordinate")]
    Degenerate,
}

pub const MIN_FIT_SAMPLES: usize = 10;

fn jap(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r²)`.
pub fn linear_regression(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let b = sxy / sxx;
    let a = my - b * mx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Some((a, b, r2))
}

/// Fits `series = [(t, y)]` restricted to the model window.
pub fn fit_decay(series: &[(f64, f64)], model: &DecayModel) -> Result<DecayFit, FitError> {
    let (t0, t1) = model.window;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .copied()
        .filter(|&(t, _)| t >= t0 && t <= t1)
        .collect();
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(FitError::TooFewSamples { got: pts.len() });
    }
    if let Some(&(t, value)) = pts.iter().find(|&&(_, y)| !(y > 0.0)) {
        return Err(FitError::NonPositive { t, value });
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts
        .iter()
        .map(|&(t, y)| match model.kind {
            DecayKind::Power => (jap(t).ln(), y.ln()),
            DecayKind::ExpNuTCubed { nu } => (nu * t.powi(3), y.ln()),
            DecayKind::PolyNuTCubed { nu } => (jap(nu * t.powi(3)).ln(), (y * jap(t)).ln()),
            DecayKind::QuarterHeat { nu } => (jap(nu * t).ln(), y.ln()),
        })
        .unzip();
    let (a, b, r_squared) = linear_regression(&xs, &ys).ok_or(FitError::Degenerate)?;
    let exponent = match model.kind {
        DecayKind::Power | DecayKind::QuarterHeat { .. } => b,
        DecayKind::ExpNuTCubed { .. } | DecayKind::PolyNuTCubed { .. } => -b,
    };
    Ok(DecayFit {
        coefficient: a.exp(),
        exponent,
        r_squared,
        samples: pts.len(),
    })
}
