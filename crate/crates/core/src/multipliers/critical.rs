use serde::Serialize;

/// One critical interval `I_{k,η} = [t_{k,η}, t_{k-1,η}]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalInterval {
    pub k: u64,
    pub t_k: f64,
    pub t_prev: f64,
    pub resonant: bool,
}

/// Critical times of a frequency `η`, `k = 1 ..= E(√|η|)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalTimeTable {
    pub eta: f64,
    pub t0: f64,
    pub entries: Vec<CriticalInterval>,
}

/// `E(√|η|)`, the number of critical intervals.
pub fn interval_count(eta: f64) -> u64 {
    eta.abs().sqrt().floor() as u64
}

/// `t_{k,η} = |η/k| − |η|/(2|k|(|k|+1))` for `k ≥ 1` and `t_{0,η} = 2|η|`.
pub fn critical_time(k: u64, eta: f64) -> f64 {
    let a = eta.abs();
    if k == 0 {
        return 2.0 * a;
    }
    let k = k as f64;
    a / k - a / (2.0 * k * (k + 1.0))
}

pub fn critical_times(eta: f64) -> CriticalTimeTable {
    let n = interval_count(eta);
    let root = 2.0 * eta.abs().sqrt();
    let entries = (1..=n)
        .map(|k| {
            let t_k = critical_time(k, eta);
            CriticalInterval {
                k,
                t_k,
                t_prev: critical_time(k - 1, eta),
                resonant: root <= t_k,
            }
        })
        .collect();
    CriticalTimeTable {
        eta,
        t0: 2.0 * eta.abs(),
        entries,
    }
}

impl CriticalTimeTable {
    /// Index `k` of the interval `[t_k, t_{k-1})` containing `t`, if any.
    pub fn interval_of(&self, t: f64) -> Option<u64> {
        if t >= self.t0 {
            return None;
        }
        self.entries
            .iter()
            .find(|e| t >= e.t_k && t < e.t_prev)
            .map(|e| e.k)
    }

    /// Left end `t_{E(√|η|),η}` of the tiled range; `2|η|` when the table is empty.
    pub fn start(&self) -> f64 {
        self.entries.last().map_or(self.t0, |e| e.t_k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_four() {
        let tab = critical_times(4.0);
        assert_eq!(tab.t0, 8.0);
        assert_eq!(tab.entries.len(), 2);
        assert!((tab.entries[0].t_k - 3.0).abs() < 1e-15);
        assert!((tab.entries[1].t_k - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(tab.entries[0].t_prev, 8.0);
        assert_eq!(tab.entries[1].t_prev, tab.entries[0].t_k);
        assert!(tab.entries.iter().all(|e| !e.resonant));
    }

    #[test]
    fn eta_hundred_first_is_resonant() {
        let tab = critical_times(100.0);
        assert!((tab.entries[0].t_k - 75.0).abs() < 1e-12);
        assert!(tab.entries[0].resonant);
        assert_eq!(tab.entries.len(), 10);
    }

    #[test]
    fn small_eta_empty() {
        assert!(critical_times(0.5).entries.is_empty());
        assert_eq!(critical_times(-0.5).start(), 1.0);
    }

    #[test]
    fn negative_eta_mirrors() {
        assert_eq!(critical_times(-4.0).entries, critical_times(4.0).entries);
    }

    #[test]
    fn interval_lookup() {
        let tab = critical_times(4.0);
        assert_eq!(tab.interval_of(3.0), Some(1));
        assert_eq!(tab.interval_of(2.9), Some(2));
        assert_eq!(tab.interval_of(8.0), None);
        assert_eq!(tab.interval_of(1.0), None);
    }
}
