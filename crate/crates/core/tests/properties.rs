//! Randomized invariants across modules.

use std::f64::consts::PI;

use couette::coordinates::shifted_vorticity;
use couette::diagnostics::{fit_decay, DecayKind, DecayModel};
use couette::multipliers::{critical_time, d_value, interval_count, WeightContext, WeightParams};
use couette::solver::{InitialData, SimConfig, SimState, Stepper};
use couette::spectral::{
    gevrey_norm, lp_bands, lp_project, paraproduct_split, physical_product, GevreyParams, Grid,
    LpAxis, ParaproductStyle, SpectralField, DEFAULT_DEALIAS,
};
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(16, 64, 2.0 * PI, DEFAULT_DEALIAS).unwrap()
}

fn random_field(seed: u64, envelope: f64) -> SpectralField {
    let mut c = SimConfig::new(grid(), InitialData::Random { envelope });
    c.seed = seed;
    c.epsilon = 1.0;
    c.initial_field().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn steps_keep_real_and_mean_zero(seed in 0u64..1000, tau in 0.0f64..5.0, nu in 0.0f64..1e-2) {
        let f = random_field(seed, 3.0);
        let mut st = SimState::new(f);
        st.t = tau;
        st.offset = tau;
        let mut s = Stepper::new(grid(), nu, true);
        for _ in 0..3 {
            s.step(&mut st, 0.05).unwrap();
        }
        prop_assert!(st.f_hat.hermitian_defect() < 1e-13);
        prop_assert_eq!(st.f_hat.get(0, 0).norm(), 0.0);
    }

    #[test]
    fn lp_bands_partition_unity(seed in 0u64..1000, zv in any::<bool>()) {
        let f = random_field(seed, 4.0);
        let axis = if zv { LpAxis::Zv } else { LpAxis::V };
        let g = grid();
        let xi_max = (g.n_z / 2) as f64 + (g.n_v / 2) as f64 * g.eta_spacing();
        let mut sum = SpectralField::zeros(g);
        for m in lp_bands(xi_max) {
            sum.add_assign(&lp_project(&f, m, axis));
        }
        prop_assert!(sum.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn paraproduct_terms_sum_to_product(a in 0u64..1000, b in 0u64..1000, homogeneous in any::<bool>()) {
        let f = random_field(a, 3.0);
        let g = random_field(b + 5000, 3.0);
        let style = if homogeneous { ParaproductStyle::Homogeneous } else { ParaproductStyle::Inhomogeneous };
        let p = paraproduct_split(&f, &g, style).unwrap();
        let mut sum = p.low_high.clone();
        sum.add_assign(&p.high_low);
        sum.add_assign(&p.remainder);
        let want = physical_product(&f, &g).unwrap();
        prop_assert!(sum.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn gevrey_norm_orders(seed in 0u64..1000, l1 in 0.0f64..2.0, dl in 0.0f64..1.0, s1 in 0.0f64..4.0, ds in 0.0f64..2.0) {
        let f = random_field(seed, 2.0);
        let flat = gevrey_norm(&f, &GevreyParams::new(0.0, 0.0, 0.6).unwrap()).unwrap();
        prop_assert!((flat - f.l2_norm()).abs() <= 1e-12 * flat);
        let base = gevrey_norm(&f, &GevreyParams::new(l1, s1, 0.6).unwrap()).unwrap();
        let more_l = gevrey_norm(&f, &GevreyParams::new(l1 + dl, s1, 0.6).unwrap()).unwrap();
        let more_s = gevrey_norm(&f, &GevreyParams::new(l1, s1 + ds, 0.6).unwrap()).unwrap();
        prop_assert!(more_l >= base * (1.0 - 1e-12));
        prop_assert!(more_s >= base * (1.0 - 1e-12));
    }

    #[test]
    fn coordinate_shift_is_an_isometry(seed in 0u64..1000, amp in 0.0f64..3.0, phase in 0.0f64..6.3) {
        let f = random_field(seed, 3.0);
        let g = grid();
        let phi: Vec<f64> = (0..g.n_v)
            .map(|b| amp * (g.y_at(b) * g.eta_spacing() * 3.0 + phase).sin())
            .collect();
        let shifted = shifted_vorticity(&f, &phi);
        prop_assert!((shifted.l2_norm() - f.l2_norm()).abs() <= 1e-12 * f.l2_norm());
    }

    #[test]
    fn d_lower_bounds_hold(eta in -500.0f64..500.0, t in 0.0f64..2000.0, alpha in 0.5f64..4.0, nu in 1e-8f64..1e-2) {
        let d = d_value(nu, alpha, eta, t);
        let slack = 1.0 + 4.0 * f64::EPSILON;
        prop_assert!(nu * eta.abs().powi(3) <= 3.0 * alpha * d * slack);
        prop_assert!(nu * t.powi(3) <= 24.0 * alpha * d * slack);
    }

    #[test]
    fn critical_times_decrease_in_k(eta in 1.0f64..1e5) {
        let n = interval_count(eta);
        for k in 1..n {
            prop_assert!(critical_time(k + 1, eta) < critical_time(k, eta));
        }
    }

    #[test]
    fn power_fit_recovers_exponent(p in -3.0f64..-0.1, c in 0.1f64..10.0) {
        let series: Vec<(f64, f64)> = (0..200)
            .map(|i| {
                let t = i as f64;
                (t, c * (1.0 + t * t).sqrt().powf(p))
            })
            .collect();
        let fit = fit_decay(&series, &DecayModel { kind: DecayKind::Power, window: (10.0, 150.0) }).unwrap();
        prop_assert!((fit.exponent - p).abs() < 1e-9 * p.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn weights_are_one_past_twice_eta(eta in 1.0f64..400.0, extra in 0.0f64..50.0, k in -20i64..20) {
        let ctx = WeightContext::new(WeightParams::default()).unwrap();
        let t = 2.0 * eta + extra;
        prop_assert_eq!(ctx.w(k, eta, t), 1.0);
        prop_assert_eq!(ctx.w(k, -eta, t), 1.0);
    }
}
