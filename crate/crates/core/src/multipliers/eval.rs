use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::context::{WTable, WeightContext, ETA_FLOOR};
use super::MultiplierError;
use crate::spectral::{bracket, ell1};

/// Which weight to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MultiplierSpec {
    WNr,
    WR,
    W,
    J,
    JR,
    JTilde,
    A,
    AR,
    AS,
    ATilde,
    D,
    ANu,
}

impl MultiplierSpec {
    pub const ALL: [MultiplierSpec; 12] = [
        MultiplierSpec::WNr,
        MultiplierSpec::WR,
        MultiplierSpec::W,
        MultiplierSpec::J,
        MultiplierSpec::JR,
        MultiplierSpec::JTilde,
        MultiplierSpec::A,
        MultiplierSpec::AR,
        MultiplierSpec::AS,
        MultiplierSpec::ATilde,
        MultiplierSpec::D,
        MultiplierSpec::ANu,
    ];

    /// False for the weights that depend on `η` only.
    pub fn uses_k(self) -> bool {
        !matches!(
            self,
            MultiplierSpec::WNr
                | MultiplierSpec::WR
                | MultiplierSpec::JR
                | MultiplierSpec::AR
                | MultiplierSpec::AS
                | MultiplierSpec::D
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            MultiplierSpec::WNr => "w_nr",
            MultiplierSpec::WR => "w_r",
            MultiplierSpec::W => "w",
            MultiplierSpec::J => "j",
            MultiplierSpec::JR => "j_r",
            MultiplierSpec::JTilde => "j_tilde",
            MultiplierSpec::A => "a",
            MultiplierSpec::AR => "a_r",
            MultiplierSpec::AS => "a_s",
            MultiplierSpec::ATilde => "a_tilde",
            MultiplierSpec::D => "d",
            MultiplierSpec::ANu => "a_nu",
        }
    }
}

impl fmt::Display for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MultiplierSpec {
    type Err = MultiplierError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        MultiplierSpec::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| MultiplierError::Config(format!("unknown multiplier '{s}'")))
    }
}

impl WeightContext {
    /// Reduces `(k, η)` to `η > 0` and applies the `|η| < 10` floor.
    /// Returns the table and the reflected mode index.
    fn resolve(&self, k: i64, eta: f64) -> (Arc<WTable>, i64) {
        let (k, a) = if eta < 0.0 { (-k, -eta) } else { (k, eta) };
        (self.table(a.max(ETA_FLOOR)), k)
    }

    /// `ln w_k(t, η)`.
    pub fn ln_w(&self, k: i64, eta: f64, t: f64) -> f64 {
        if t >= 2.0 * eta.abs() {
            return 0.0;
        }
        let (tab, k) = self.resolve(k, eta);
        let ck = self.params().c_kappa_exponent;
        let t_cl = t.max(tab.start());
        match tab.row_at(t_cl) {
            Some(r) if k >= 1 && r.k == k as f64 => tab.ln_w_r(t_cl, ck),
            _ => tab.ln_w_nr(t_cl, ck),
        }
    }

    pub fn w(&self, k: i64, eta: f64, t: f64) -> f64 {
        self.ln_w(k, eta, t).exp()
    }

    pub fn ln_w_nr(&self, eta: f64, t: f64) -> f64 {
        if t >= 2.0 * eta.abs() {
            return 0.0;
        }
        let (tab, _) = self.resolve(0, eta);
        tab.ln_w_nr(t, self.params().c_kappa_exponent)
    }

    /// `ln w_R(t, η)` on the interval containing `t`, clamped below `t_E`.
    pub fn ln_w_r(&self, eta: f64, t: f64) -> f64 {
        if t >= 2.0 * eta.abs() {
            return 0.0;
        }
        let (tab, _) = self.resolve(0, eta);
        tab.ln_w_r(t, self.params().c_kappa_exponent)
    }

    /// Right derivative `∂_t w_k / w_k`.
    pub fn dtw_ratio(&self, k: i64, eta: f64, t: f64) -> f64 {
        if t >= 2.0 * eta.abs() {
            return 0.0;
        }
        let (tab, k) = self.resolve(k, eta);
        if t < tab.start() {
            return 0.0;
        }
        let ck = self.params().c_kappa_exponent;
        let Some(r) = tab.row_at(t) else {
            return 0.0;
        };
        let resonant = k >= 1 && r.k == k as f64;
        if t >= r.center {
            let base = r.b / (1.0 + r.b * (t - r.center));
            if resonant {
                (1.0 + ck) * base
            } else {
                ck * base
            }
        } else {
            let base = r.a / (1.0 + r.a * (r.center - t));
            if resonant {
                ck * base
            } else {
                (1.0 + ck) * base
            }
        }
    }

    /// `D(t, η) = ν|η|³/(3α) + ν(t³ − 8|η|³)₊/(24α)`.
    pub fn d(&self, eta: f64, t: f64) -> f64 {
        d_value(self.params().nu, self.params().alpha, eta, t)
    }

    /// Natural log of the requested weight; `-∞` where the weight vanishes.
    pub fn multiplier_log(
        &self,
        spec: MultiplierSpec,
        k: i64,
        eta: f64,
        t: f64,
    ) -> Result<f64, MultiplierError> {
        let p = self.params();
        let lam = self.lambda(t);
        let mu_eta = p.mu * eta.abs().sqrt();
        let gevrey_kz = lam * ell1(k, eta).powf(p.s);
        let gevrey_z = lam * eta.abs().powf(p.s);
        let ln_eta_bracket = bracket(0, eta).ln();
        let ln_j = || log_add(mu_eta - self.ln_w(k, eta, t), p.mu * (k.unsigned_abs() as f64).sqrt());
        let ln_jr = || {
            if t >= 2.0 * eta.abs() {
                log_add(mu_eta, 0.0)
            } else {
                log_add(mu_eta - self.ln_w_r(eta, t), 0.0)
            }
        };
        let v = match spec {
            MultiplierSpec::WNr => self.ln_w_nr(eta, t),
            MultiplierSpec::WR => self.ln_w_r(eta, t),
            MultiplierSpec::W => self.ln_w(k, eta, t),
            MultiplierSpec::J => ln_j(),
            MultiplierSpec::JR => ln_jr(),
            MultiplierSpec::JTilde => mu_eta - self.ln_w(k, eta, t),
            MultiplierSpec::A => gevrey_kz + p.sigma * bracket(k, eta).ln() + ln_j(),
            MultiplierSpec::AR => gevrey_z + p.sigma * ln_eta_bracket + ln_jr(),
            MultiplierSpec::AS => gevrey_z + (p.sigma - 6.0) * ln_eta_bracket,
            MultiplierSpec::ATilde => {
                gevrey_kz + p.sigma * bracket(k, eta).ln() + mu_eta - self.ln_w(k, eta, t)
            }
            MultiplierSpec::D => self.d(eta, t).ln(),
            MultiplierSpec::ANu => {
                if k == 0 {
                    f64::NEG_INFINITY
                } else {
                    let dd = self.d(eta, t);
                    gevrey_kz + p.beta * bracket(k, eta).ln() + p.alpha * 0.5 * (1.0 + dd * dd).ln()
                }
            }
        };
        if v.is_nan() || v == f64::INFINITY {
            return Err(MultiplierError::Overflow { k, eta });
        }
        Ok(v)
    }

    /// Value of the requested weight, or an overflow error naming `(k, η)`.
    pub fn multiplier_eval(
        &self,
        spec: MultiplierSpec,
        k: i64,
        eta: f64,
        t: f64,
    ) -> Result<f64, MultiplierError> {
        let lv = self.multiplier_log(spec, k, eta, t)?;
        if lv > f64::MAX.ln() {
            return Err(MultiplierError::Overflow { k, eta });
        }
        Ok(lv.exp())
    }
}

pub fn d_value(nu: f64, alpha: f64, eta: f64, t: f64) -> f64 {
    let e3 = eta.abs().powi(3);
    nu * e3 / (3.0 * alpha) + nu * (t * t * t - 8.0 * e3).max(0.0) / (24.0 * alpha)
}

/// `ln(e^a + e^b)`.
pub fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}
