use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};
use statrs::function::beta::{beta, beta_reg};

use super::critical::{critical_time, interval_count};
use super::MultiplierError;

/// Free constants of the weight construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightParams {
    pub kappa: f64,
    /// The combined exponent `Cκ` in the `w_NR` recursion.
    pub c_kappa_exponent: f64,
    pub mu: f64,
    pub s: f64,
    pub lambda0: f64,
    pub lambda_prime: f64,
    pub delta_lambda: f64,
    pub q_tilde: f64,
    /// `C₀` in `T_{λ,λ′} = min((λ − λ′)/C₀, 1)`.
    pub c0: f64,
    pub sigma: f64,
    pub beta: f64,
    pub alpha: f64,
    pub nu: f64,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self {
            kappa: 0.25,
            c_kappa_exponent: 0.5,
            mu: 1.0,
            s: 0.6,
            lambda0: 1.0,
            lambda_prime: 0.5,
            delta_lambda: 1e-3,
            q_tilde: 0.51,
            c0: 1.0,
            sigma: 18.0,
            beta: 6.0,
            alpha: 1.0,
            nu: 0.0,
        }
    }
}

impl WeightParams {
    pub fn validate(&self) -> Result<(), MultiplierError> {
        let bad = |msg: String| Err(MultiplierError::Config(msg));
        let p = self;
        let finite = [
            p.kappa,
            p.c_kappa_exponent,
            p.mu,
            p.s,
            p.lambda0,
            p.lambda_prime,
            p.delta_lambda,
            p.q_tilde,
            p.c0,
            p.sigma,
            p.beta,
            p.alpha,
            p.nu,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("weight parameters must be finite".into());
        }
        if !(p.kappa > 0.0 && p.kappa < 0.5) {
            return bad(format!("kappa = {} must lie in (0, 1/2)", p.kappa));
        }
        if p.c_kappa_exponent <= 0.0 {
            return bad("c_kappa_exponent must be positive".into());
        }
        if p.mu <= 0.0 {
            return bad("mu must be positive".into());
        }
        if !(p.s > 0.5 && p.s < 1.0) {
            return bad(format!("s = {} must lie in (1/2, 1)", p.s));
        }
        if !(p.lambda_prime > 0.0 && p.lambda0 > p.lambda_prime) {
            return bad("need lambda0 > lambda_prime > 0".into());
        }
        if p.delta_lambda < 0.0 {
            return bad("delta_lambda must be >= 0".into());
        }
        let q_hi = p.s / 8.0 + 7.0 / 16.0;
        if !(p.q_tilde > 0.5 && p.q_tilde < q_hi) {
            return bad(format!(
                "q_tilde = {} must lie in (1/2, s/8 + 7/16) = (0.5, {q_hi})",
                p.q_tilde
            ));
        }
        if p.c0 <= 0.0 {
            return bad("c0 must be positive".into());
        }
        if p.alpha <= 0.0 {
            return bad("alpha must be positive".into());
        }
        if !(p.beta + 3.0 * p.alpha + 8.0 < p.sigma) {
            return bad(format!(
                "violates β + 3α + 8 < σ: {} + 3·{} + 8 = {} >= {}",
                p.beta,
                p.alpha,
                p.beta + 3.0 * p.alpha + 8.0,
                p.sigma
            ));
        }
        if !(p.beta > 3.0 * p.alpha + 2.0) {
            return bad(format!(
                "violates β > 3α + 2: β = {} but 3α + 2 = {}",
                p.beta,
                3.0 * p.alpha + 2.0
            ));
        }
        if p.nu < 0.0 {
            return bad("nu must be >= 0".into());
        }
        Ok(())
    }
}

/// Per-`η` constants of the `w` construction, `η ≥ 10`.
#[derive(Debug)]
pub(crate) struct WTable {
    pub eta: f64,
    /// Indexed by `k - 1`.
    pub rows: Vec<WRow>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct WRow {
    pub k: f64,
    pub t_k: f64,
    #[allow(dead_code)]
    pub t_prev: f64,
    pub center: f64,
    pub a: f64,
    pub b: f64,
    /// `ln w_NR(t_{k-1})`.
    pub ln_w_prev: f64,
    /// `ln w_NR(η/k)`.
    pub ln_w_center: f64,
}

impl WTable {
    fn build(eta: f64, ck: f64) -> Self {
        let n = interval_count(eta);
        let mut rows = Vec::with_capacity(n as usize);
        let mut ln_prev = 0.0;
        for k in 1..=n {
            let kf = k as f64;
            let ratio = kf * kf / eta;
            let b = if k == 1 {
                1.0 - 1.0 / eta
            } else {
                2.0 * (kf - 1.0) / kf * (1.0 - ratio)
            };
            let a = 2.0 * (kf + 1.0) / kf * (1.0 - ratio);
            let ln_center = ck * ratio.ln() + ln_prev;
            let ln_k = (1.0 + ck) * ratio.ln() + ln_center;
            rows.push(WRow {
                k: kf,
                t_k: critical_time(k, eta),
                t_prev: critical_time(k - 1, eta),
                center: eta / kf,
                a,
                b,
                ln_w_prev: ln_prev,
                ln_w_center: ln_center,
            });
            ln_prev = ln_k;
        }
        Self { eta, rows }
    }

    pub fn start(&self) -> f64 {
        self.rows.last().map_or(2.0 * self.eta, |r| r.t_k)
    }

    /// Row whose half-open interval `[t_k, t_{k-1})` contains `t`.
    pub fn row_at(&self, t: f64) -> Option<&WRow> {
        if t >= 2.0 * self.eta || self.rows.is_empty() {
            return None;
        }
        // t_k is decreasing in k: binary search on the first row with t_k <= t
        let idx = self.rows.partition_point(|r| r.t_k > t);
        self.rows.get(idx)
    }

    /// `ln w_NR(t)` on `[t_E, 2η)`; clamps below `t_E`.
    pub fn ln_w_nr(&self, t: f64, ck: f64) -> f64 {
        let t = t.max(self.start());
        match self.row_at(t) {
            None => 0.0,
            Some(r) => {
                if t >= r.center {
                    ck * ((r.k * r.k / self.eta) * (1.0 + r.b * (t - r.center))).ln()
                        + r.ln_w_prev
                } else {
                    -(1.0 + ck) * (1.0 + r.a * (r.center - t)).ln() + r.ln_w_center
                }
            }
        }
    }

    /// `ln w_R(t)` using the interval that contains `t` (clamped below `t_E`).
    pub fn ln_w_r(&self, t: f64, ck: f64) -> f64 {
        let t = t.max(self.start());
        match self.row_at(t) {
            None => 0.0,
            Some(r) => {
                let tau = (t - r.center).abs();
                let slope = if t >= r.center { r.b } else { r.a };
                (r.k * r.k / self.eta).ln() + (1.0 + slope * tau).ln() + self.ln_w_nr(t, ck)
            }
        }
    }
}

/// Validated weight parameters with memoized per-`η` tables.
#[derive(Debug, Clone)]
pub struct WeightContext {
    params: WeightParams,
    lambda_start: f64,
    t_lambda: f64,
    i_at_t_lambda: f64,
    tables: Arc<RwLock<HashMap<u64, Arc<WTable>>>>,
}

/// Frequencies below this use the tables of `η = 10`.
pub const ETA_FLOOR: f64 = 10.0;

impl WeightContext {
    pub fn new(params: WeightParams) -> Result<Self, MultiplierError> {
        params.validate()?;
        let t_lambda = ((params.lambda0 - params.lambda_prime) / params.c0).min(1.0);
        let ctx = Self {
            params,
            lambda_start: 0.75 * params.lambda0 + 0.25 * params.lambda_prime,
            t_lambda,
            i_at_t_lambda: decay_integral(t_lambda, params.q_tilde),
            tables: Arc::new(RwLock::new(HashMap::new())),
        };
        let floor = 0.5 * (params.lambda0 + params.lambda_prime);
        let inf = ctx.lambda_infinity();
        if !(inf > floor) {
            return Err(MultiplierError::Config(format!(
                "lambda(infinity) = {inf} must exceed (lambda0 + lambda_prime)/2 = {floor}; reduce delta_lambda"
            )));
        }
        Ok(ctx)
    }

    pub fn params(&self) -> &WeightParams {
        &self.params
    }

    /// Same parameters with a different viscosity.
    pub fn with_nu(&self, nu: f64) -> Result<Self, MultiplierError> {
        let mut p = self.params;
        p.nu = nu;
        let mut out = Self::new(p)?;
        if p.c_kappa_exponent == self.params.c_kappa_exponent {
            out.tables = self.tables.clone();
        }
        Ok(out)
    }

    pub fn t_lambda(&self) -> f64 {
        self.t_lambda
    }

    /// `λ(t)`: constant up to `T_{λ,λ′}`, then
    /// `1 + λ(t) = (1 + λ_T) exp(−δ_λ ∫_T^t ⟨τ⟩^{−2q̃} dτ)`.
    pub fn lambda(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.t_lambda || p.delta_lambda == 0.0 {
            return self.lambda_start;
        }
        let gap = decay_integral(t, p.q_tilde) - self.i_at_t_lambda;
        (1.0 + self.lambda_start) * (-p.delta_lambda * gap).exp() - 1.0
    }

    /// `dλ/dt`, zero on `[0, T_{λ,λ′}]`.
    pub fn lambda_dot(&self, t: f64) -> f64 {
        let p = &self.params;
        if t <= self.t_lambda {
            return 0.0;
        }
        -p.delta_lambda * (1.0 + self.lambda(t)) / (1.0 + t * t).powf(p.q_tilde)
    }

    pub fn lambda_infinity(&self) -> f64 {
        let p = &self.params;
        if p.delta_lambda == 0.0 {
            return self.lambda_start;
        }
        let total = 0.5 * beta(0.5, p.q_tilde - 0.5);
        (1.0 + self.lambda_start) * (-p.delta_lambda * (total - self.i_at_t_lambda)).exp() - 1.0
    }

    pub(crate) fn table(&self, eta: f64) -> Arc<WTable> {
        let key = eta.to_bits();
        if let Some(t) = self.tables.read().expect("weight table lock").get(&key) {
            return t.clone();
        }
        let built = Arc::new(WTable::build(eta, self.params.c_kappa_exponent));
        self.tables
            .write()
            .expect("weight table lock")
            .entry(key)
            .or_insert(built)
            .clone()
    }
}

/// `∫₀^τ (1 + s²)^{−q} ds = ½ B(τ²/(1+τ²); ½, q − ½)`.
pub fn decay_integral(tau: f64, q: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let x = tau * tau / (1.0 + tau * tau);
    let (a, b) = (0.5, q - 0.5);
    0.5 * beta_reg(a, b, x) * beta(a, b)
}
