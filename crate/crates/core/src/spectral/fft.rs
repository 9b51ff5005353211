use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Unnormalized 2D complex FFT on a row-major `n_z × n_v` buffer.
pub struct Fft2 {
    n_z: usize,
    n_v: usize,
    fwd_v: Arc<dyn Fft<f64>>,
    inv_v: Arc<dyn Fft<f64>>,
    fwd_z: Arc<dyn Fft<f64>>,
    inv_z: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fft2({}x{})", self.n_z, self.n_v)
    }
}

static PLANS: OnceLock<Mutex<HashMap<(usize, usize), Arc<Fft2>>>> = OnceLock::new();

impl Fft2 {
    /// Shared plan for a given shape.
    pub fn shared(n_z: usize, n_v: usize) -> Arc<Fft2> {
        let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("fft plan cache poisoned");
        map.entry((n_z, n_v))
            .or_insert_with(|| Arc::new(Fft2::new(n_z, n_v)))
            .clone()
    }

    fn new(n_z: usize, n_v: usize) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        Self {
            n_z,
            n_v,
            fwd_v: planner.plan_fft_forward(n_v),
            inv_v: planner.plan_fft_inverse(n_v),
            fwd_z: planner.plan_fft_forward(n_z),
            inv_z: planner.plan_fft_inverse(n_z),
        }
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, true);
    }

    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, false);
    }

    /// Transform along `v` only (each contiguous row).
    pub fn rows(&self, buf: &mut [Complex64], forward: bool) {
        let plan = if forward { &self.fwd_v } else { &self.inv_v };
        plan.process(buf);
    }

    fn run(&self, buf: &mut [Complex64], forward: bool) {
        assert_eq!(buf.len(), self.n_z * self.n_v);
        self.rows(buf, forward);
        let mut t = transpose(buf, self.n_z, self.n_v);
        let plan = if forward { &self.fwd_z } else { &self.inv_z };
        plan.process(&mut t);
        transpose_into(&t, self.n_v, self.n_z, buf);
    }
}

fn transpose(src: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut dst = vec![Complex64::new(0.0, 0.0); src.len()];
    transpose_into(src, rows, cols, &mut dst);
    dst
}

fn transpose_into(src: &[Complex64], rows: usize, cols: usize, dst: &mut [Complex64]) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

/// 1D unnormalized FFT of length `n`, cached.
pub fn fft1(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    static PLANS1: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let cache = PLANS1.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::<f64>::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}
