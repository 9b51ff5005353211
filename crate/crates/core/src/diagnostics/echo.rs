use serde::{Deserialize, Serialize};

/// Stream-function amplitude of the nonlinear part of one `z`-mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeSample {
    pub t: f64,
    pub amplitude: f64,
    /// Unsheared-frame frequency carrying the largest share of the amplitude.
    pub dominant_eta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeHistory {
    pub k: i64,
    pub samples: Vec<ModeSample>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoOptions {
    /// A burst must exceed this multiple of the median over its neighbourhood.
    pub prominence: f64,
    /// Amplitudes at or below this are ignored.
    pub floor: f64,
}

impl Default for EchoOptions {
    fn default() -> Self {
        Self {
            prominence: 3.0,
            floor: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EchoBurst {
    pub t_burst: f64,
    pub k: i64,
    pub eta_estimate: f64,
    pub amplitude: f64,
    /// Critical time `η/k` of the dominant frequency.
    pub critical_time: f64,
}

/// Local maxima of each history with `|k| ≤ k_watch` that stand out against
/// the median of their neighbourhood (a quarter of the series on each side).
pub fn echo_scan(histories: &[ModeHistory], k_watch: i64, opts: &EchoOptions) -> Vec<EchoBurst> {
    let mut out = Vec::new();
    for h in histories.iter().filter(|h| h.k != 0 && h.k.abs() <= k_watch) {
        let s = &h.samples;
        let n = s.len();
        if n < 3 {
            continue;
        }
        let half = (n / 4).max(2);
        for i in 1..n - 1 {
            let a = s[i].amplitude;
            if !(a > opts.floor) || !(a > s[i - 1].amplitude) || !(a >= s[i + 1].amplitude) {
                continue;
            }
            let lo = i.saturating_sub(half);
            let hi = (i + half + 1).min(n);
            let mut window: Vec<f64> = s[lo..hi].iter().map(|x| x.amplitude).collect();
            window.sort_by(f64::total_cmp);
            let median = window[window.len() / 2];
            if a > opts.prominence * median {
                let eta = s[i].dominant_eta;
                out.push(EchoBurst {
                    t_burst: s[i].t,
                    k: h.k,
                    eta_estimate: eta,
                    amplitude: a,
                    critical_time: if h.k as f64 * eta > 0.0 {
                        eta / h.k as f64
                    } else {
                        0.0
                    },
                });
            }
        }
    }
    out.sort_by(|a, b| a.t_burst.total_cmp(&b.t_burst));
    out
}

/// First time the ratio `series / baseline` falls to `e^{−1}`, interpolating
/// `ln(ratio)` linearly between samples. Both series are `(t, value)` on the
/// same time grid.
pub fn onset_time(series: &[(f64, f64)], baseline: &[(f64, f64)]) -> Option<f64> {
    let ratio: Vec<(f64, f64)> = series
        .iter()
        .zip(baseline)
        .filter(|(a, b)| b.1 > 0.0 && a.1 > 0.0 && (a.0 - b.0).abs() <= 1e-9 * a.0.abs().max(1.0))
        .map(|(a, b)| (a.0, (a.1 / b.1).ln()))
        .collect();
    let target = -1.0;
    if let Some(first) = ratio.first() {
        if first.1 <= target {
            return Some(first.0);
        }
    }
    ratio.windows(2).find_map(|w| {
        let ((t0, r0), (t1, r1)) = (w[0], w[1]);
        (r1 <= target).then(|| t0 + (t1 - t0) * (r0 - target) / (r0 - r1))
    })
}
