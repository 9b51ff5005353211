//! Randomized and exhaustive property checks of the weight construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::critical::{critical_time, critical_times};
use super::eval::d_value;
use super::growth::{growth_fit, log_spaced};
use super::{MultiplierSpec, WeightContext};

#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct LemmaReport {
    pub checks: Vec<LemmaCheck>,
}

impl LemmaReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&LemmaCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &str, passed: bool, value: f64, detail: String) {
        self.checks.push(LemmaCheck {
            name: name.to_string(),
            passed,
            value,
            detail,
        });
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LemmaSuiteConfig {
    /// Samples for the pointwise lower bounds.
    pub bound_samples: usize,
    /// Base sample count for the fitted constants; rerun with ten times as many.
    pub constant_samples: usize,
    pub seed: u64,
    /// Allowed relative change of a fitted constant under the tenfold increase.
    pub stability: f64,
}

impl Default for LemmaSuiteConfig {
    fn default() -> Self {
        Self {
            bound_samples: 1_000_000,
            constant_samples: 100_000,
            seed: 20_240_601,
            stability: 0.2,
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn random_sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

fn jap(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Counts failures of `ν|η|³ ≤ 3αD` and `νt³ ≤ 24αD`, allowing four ulps of rounding.
pub fn d_lower_bound_violations(alpha: f64, samples: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slack = 1.0 + 4.0 * f64::EPSILON;
    let mut bad = 0;
    for _ in 0..samples {
        let nu = log_uniform(&mut rng, 1e-8, 1.0);
        let t = log_uniform(&mut rng, 1e-3, 1e4);
        let eta = random_sign(&mut rng) * log_uniform(&mut rng, 1e-3, 1e4);
        let d = d_value(nu, alpha, eta, t);
        if nu * eta.abs().powi(3) > 3.0 * alpha * d * slack || nu * t.powi(3) > 24.0 * alpha * d * slack {
            bad += 1;
        }
    }
    bad
}

fn sample_pair(rng: &mut ChaCha8Rng) -> (f64, f64, f64, f64) {
    let t = log_uniform(rng, 1e-2, 1e3);
    let nu = log_uniform(rng, 1e-6, 1e-1);
    let eta = random_sign(rng) * log_uniform(rng, 1e-2, 1e3);
    let xi = if rng.gen_bool(0.5) {
        eta + rng.gen_range(-2.0..2.0)
    } else {
        random_sign(rng) * log_uniform(rng, 1e-2, 1e3)
    };
    (t, nu, eta, xi)
}

/// `sup ⟨D(t,η)⟩ / (⟨D(t,ξ)⟩ ⟨η−ξ⟩³)` over random samples.
pub fn d_ratio_constant(alpha: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = 0.0f64;
    for _ in 0..samples {
        let (t, nu, eta, xi) = sample_pair(&mut rng);
        let r = jap(d_value(nu, alpha, eta, t))
            / (jap(d_value(nu, alpha, xi, t)) * jap(eta - xi).powi(3));
        sup = sup.max(r);
    }
    sup
}

/// `sup |⟨D_η⟩^α − ⟨D_ξ⟩^α| ⟨ξ⟩ / (⟨D_ξ⟩^α ⟨η−ξ⟩^{3α})` over `|ξ|/K ≤ |η| ≤ K|ξ|`.
pub fn d_difference_constant(alpha: f64, k_ratio: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup = 0.0f64;
    let lk = k_ratio.ln();
    for _ in 0..samples {
        let t = log_uniform(&mut rng, 1e-2, 1e3);
        let nu = log_uniform(&mut rng, 1e-6, 1e-1);
        let xi = random_sign(&mut rng) * log_uniform(&mut rng, 1e-2, 1e3);
        let eta = random_sign(&mut rng) * (xi.abs() * rng.gen_range(-lk..lk).exp());
        let de = jap(d_value(nu, alpha, eta, t)).powf(alpha);
        let dx = jap(d_value(nu, alpha, xi, t)).powf(alpha);
        let r = (de - dx).abs() * jap(xi) / (dx * jap(eta - xi).powf(3.0 * alpha));
        sup = sup.max(r);
    }
    sup
}

/// Largest mismatch between adjacent interval endpoints and the ends of `[t_E, 2η]`.
pub fn tiling_defect(eta: f64) -> f64 {
    let tab = critical_times(eta);
    let mut worst = 0.0f64;
    let mut right = 2.0 * eta.abs();
    for e in &tab.entries {
        worst = worst.max((e.t_prev - right).abs() / right);
        // independent evaluation of the left end
        let k = e.k as f64;
        let direct = eta.abs() * (2.0 * k + 1.0) / (2.0 * k * (k + 1.0));
        worst = worst.max((e.t_k - direct).abs() / direct);
        if !(e.t_k < e.t_prev) {
            return f64::INFINITY;
        }
        right = e.t_k;
    }
    if let Some(last) = tab.entries.last() {
        let e = tab.entries.len() as u64;
        worst = worst.max((last.t_k - critical_time(e, eta)).abs());
    }
    worst
}

/// Largest relative jump of `w_k(·, η)` across interval endpoints, over all relevant `k`.
pub fn w_continuity_defect(ctx: &WeightContext, eta: f64) -> f64 {
    let tab = critical_times(eta);
    let mut worst = 0.0f64;
    let kmax = tab.entries.len() as i64 + 1;
    let mut knots: Vec<f64> = Vec::new();
    for e in &tab.entries {
        knots.push(e.t_k);
        knots.push(eta.abs() / e.k as f64);
    }
    knots.push(2.0 * eta.abs());
    for &t in &knots {
        let h = 1e-9 * t.max(1.0);
        for k in -kmax..=kmax {
            let l = ctx.ln_w(k, eta, t - h);
            let r = ctx.ln_w(k, eta, t + h);
            let slope = ctx.dtw_ratio(k, eta, t - 2.0 * h).max(ctx.dtw_ratio(k, eta, t + h));
            worst = worst.max((l - r).abs() - 2.0 * h * slope.max(1.0));
        }
    }
    worst.max(0.0)
}

/// Largest decrease of `ln w_NR` along a fine time grid.
pub fn w_nr_monotone_defect(ctx: &WeightContext, eta: f64, points: usize) -> f64 {
    let t_hi = 2.2 * eta.abs();
    let mut prev = ctx.ln_w_nr(eta, 0.0);
    let mut worst = 0.0f64;
    for i in 1..=points {
        let t = t_hi * i as f64 / points as f64;
        let v = ctx.ln_w_nr(eta, t);
        worst = worst.max(prev - v);
        prev = v;
    }
    worst
}

/// Runs every check of the weight construction.
pub fn run_lemma_suite(ctx: &WeightContext, cfg: &LemmaSuiteConfig) -> LemmaReport {
    let mut rep = LemmaReport::default();
    let alpha = ctx.params().alpha;

    let bad = d_lower_bound_violations(alpha, cfg.bound_samples, cfg.seed);
    rep.push(
        "d_lower_bounds",
        bad == 0,
        bad as f64,
        format!("{bad} violations of ν|η|³ ≤ 3αD or νt³ ≤ 24αD in {} samples", cfg.bound_samples),
    );

    // equality case of the second bound at t = 2|η|
    let eq = (1..200)
        .map(|i| {
            let eta = i as f64 * 0.37;
            let t = 2.0 * eta;
            let d = d_value(1e-3, alpha, eta, t);
            ((1e-3 * t.powi(3)) - 24.0 * alpha * d).abs() / (1e-3 * t.powi(3))
        })
        .fold(0.0f64, f64::max);
    rep.push(
        "d_equality_at_two_eta",
        eq < 1e-13,
        eq,
        format!("max relative gap νt³ vs 24αD at t = 2|η|: {eq:.3e}"),
    );

    let n = cfg.constant_samples;
    let c1 = d_ratio_constant(alpha, n, cfg.seed ^ 0x11);
    let c10 = d_ratio_constant(alpha, 10 * n, cfg.seed ^ 0x11);
    let drift = (c10 - c1).abs() / c1;
    rep.push(
        "d_ratio_constant",
        c10.is_finite() && drift <= cfg.stability,
        c10,
        format!("C = {c1:.4} at {n} samples, {c10:.4} at {} (drift {:.1}%)", 10 * n, 100.0 * drift),
    );

    let k1 = d_difference_constant(alpha, 2.0, n, cfg.seed ^ 0x22);
    let k10 = d_difference_constant(alpha, 2.0, 10 * n, cfg.seed ^ 0x22);
    let drift = (k10 - k1).abs() / k1;
    rep.push(
        "d_difference_constant",
        k10.is_finite() && drift <= cfg.stability,
        k10,
        format!("C_K = {k1:.4} at {n} samples, {k10:.4} at {} (drift {:.1}%)", 10 * n, 100.0 * drift),
    );

    let etas = log_spaced(1.0, 1e4, 200);
    let tiling = etas.iter().map(|&e| tiling_defect(e)).fold(0.0f64, f64::max);
    rep.push(
        "interval_tiling",
        tiling < 1e-12,
        tiling,
        format!("max endpoint mismatch {tiling:.3e}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x33);
    let mut not_one = 0usize;
    for _ in 0..20_000 {
        let eta = random_sign(&mut rng) * log_uniform(&mut rng, 1e-2, 1e4);
        let k = rng.gen_range(-60i64..=60);
        let t = 2.0 * eta.abs() * (1.0 + rng.gen_range(0.0..3.0));
        if ctx.w(k, eta, t) != 1.0 {
            not_one += 1;
        }
    }
    rep.push(
        "w_one_after_two_eta",
        not_one == 0,
        not_one as f64,
        format!("{not_one} samples with w != 1 for t >= 2|η|"),
    );

    let mono = [10.0, 37.0, 100.0, 400.0, 2500.0]
        .iter()
        .map(|&e| w_nr_monotone_defect(ctx, e, 20_000))
        .fold(0.0f64, f64::max);
    rep.push(
        "w_nr_nondecreasing",
        mono <= 1e-12,
        mono,
        format!("max decrease of ln w_NR on a fine grid {mono:.3e}"),
    );

    let cont = [10.0, 37.0, 100.0, -400.0, 2500.0]
        .iter()
        .map(|&e| w_continuity_defect(ctx, e))
        .fold(0.0f64, f64::max);
    rep.push(
        "w_lipschitz",
        cont < 1e-6,
        cont,
        format!("max unexplained jump of ln w across interval endpoints {cont:.3e}"),
    );

    let mut dtw_worst = 1.0f64;
    for i in 1..2000 {
        let t = 300.0 + 500.0 * i as f64 / 2000.0;
        let r = ctx.dtw_ratio(1, 400.0, t) * (1.0 + (t - 400.0).abs());
        dtw_worst = dtw_worst.max(r).max(1.0 / r);
    }
    rep.push(
        "dtw_resonant_scale",
        dtw_worst <= 8.0,
        dtw_worst,
        format!("∂_t w/w within a factor {dtw_worst:.3} of 1/(1+|t−η/k|) on I_(1,400)"),
    );

    let mut fd_worst = 0.0f64;
    for &(k, eta) in &[(1i64, 400.0), (2, 400.0), (0, 400.0), (3, -900.0)] {
        for i in 1..400 {
            let t = 2.0 * f64::abs(eta) * i as f64 / 400.0;
            let h = 1e-6;
            let fd = (ctx.ln_w(k, eta, t + h) - ctx.ln_w(k, eta, t)) / h;
            let an = ctx.dtw_ratio(k, eta, t);
            // skip steps that straddle a knot
            if (ctx.dtw_ratio(k, eta, t + h) - an).abs() > 1e-3 * an.max(1e-3) {
                continue;
            }
            fd_worst = fd_worst.max((fd - an).abs() / an.max(1e-3));
        }
    }
    rep.push(
        "dtw_matches_finite_difference",
        fd_worst < 1e-3,
        fd_worst,
        format!("max relative mismatch {fd_worst:.3e}"),
    );

    let mut ar_bad = 0usize;
    for _ in 0..5000 {
        let eta = random_sign(&mut rng) * log_uniform(&mut rng, 1.0, 2e3);
        let t = rng.gen_range(0.0..2.5 * eta.abs());
        let ar = ctx.multiplier_log(MultiplierSpec::AR, 0, eta, t);
        let a0 = ctx.multiplier_log(MultiplierSpec::A, 0, eta, t);
        match (ar, a0) {
            (Ok(x), Ok(y)) if x >= y - 1e-12 * y.abs().max(1.0) => {}
            _ => ar_bad += 1,
        }
    }
    rep.push(
        "a_r_dominates_a0",
        ar_bad == 0,
        ar_bad as f64,
        format!("{ar_bad} samples with A^R < A_0"),
    );

    match growth_fit(&log_spaced(1e2, 1e4, 80), ctx) {
        Ok(fit) => rep.push(
            "growth_fit",
            fit.r_squared > 0.99,
            fit.r_squared,
            format!(
                "r² = {:.6}, μ_fit = {:.4}, log coefficient {:.4}",
                fit.r_squared, fit.mu_fit, fit.log_coeff
            ),
        ),
        Err(e) => rep.push("growth_fit", false, f64::NAN, e.to_string()),
    }
    rep
}
