use std::io::{Read, Write};

use num_complex::Complex64;

use super::fft::Fft2;
use super::{Grid, SpectralError};

/// Complex Fourier coefficients `f̂_k(η_j)` on a [`Grid`].
///
/// The forward transform carries the `1/2π` normalization,
/// `f̂_k(η) = (1/2π) ∫∫ e^{-ikz - iηv} f dz dv`, so that
/// `∫∫ |f|² = Σ_k Σ_j |f̂_k(η_j)|² (π/L)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl SpectralField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![ZERO; grid.len()],
        }
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::ShapeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at signed lattice indices `(k, j)`, or zero when off-grid.
    pub fn get(&self, k: i64, j: i64) -> Complex64 {
        match (self.grid.row_of_k(k), self.grid.col_of_j(j)) {
            (Some(ik), Some(ij)) => self.coeffs[self.grid.index(ik, ij)],
            _ => ZERO,
        }
    }

    pub fn set(&mut self, k: i64, j: i64, value: Complex64) -> Result<(), SpectralError> {
        match (self.grid.row_of_k(k), self.grid.col_of_j(j)) {
            (Some(ik), Some(ij)) => {
                let idx = self.grid.index(ik, ij);
                self.coeffs[idx] = value;
                Ok(())
            }
            _ => Err(SpectralError::Config(format!(
                "mode ({k}, {j}) is outside the lattice"
            ))),
        }
    }

    /// Sets `(k, j)` to `value` and `(-k, -j)` to its conjugate.
    pub fn set_real_mode(&mut self, k: i64, j: i64, value: Complex64) -> Result<(), SpectralError> {
        if k == 0 && j == 0 {
            return self.set(0, 0, Complex64::new(value.re, 0.0));
        }
        self.set(k, j, value)?;
        self.set(-k, -j, value.conj())
    }

    pub fn from_physical(grid: Grid, samples: &[f64]) -> Result<Self, SpectralError> {
        if samples.len() != grid.len() {
            return Err(SpectralError::ShapeMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        let buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_physical_complex(grid, buf)
    }

    pub fn from_physical_complex(
        grid: Grid,
        mut buf: Vec<Complex64>,
    ) -> Result<Self, SpectralError> {
        if buf.len() != grid.len() {
            return Err(SpectralError::ShapeMismatch {
                expected: grid.len(),
                got: buf.len(),
            });
        }
        Fft2::shared(grid.n_z, grid.n_v).forward(&mut buf);
        let scale = forward_scale(&grid);
        apply_phase(&grid, &mut buf, scale);
        Ok(Self { grid, coeffs: buf })
    }

    /// Complex physical samples, `z` index outer, `y` index inner.
    pub fn to_physical_complex(&self) -> Vec<Complex64> {
        let mut buf = self.coeffs.clone();
        apply_phase(&self.grid, &mut buf, inverse_scale(&self.grid));
        Fft2::shared(self.grid.n_z, self.grid.n_v).inverse(&mut buf);
        buf
    }

    /// Real part of the physical samples.
    pub fn to_physical(&self) -> Vec<f64> {
        self.to_physical_complex().into_iter().map(|c| c.re).collect()
    }

    /// `L²` norm over the box via Parseval.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.eta_spacing()
    }

    /// Largest violation of `f̂(-k,-η) = conj f̂(k,η)` over the paired modes.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst = 0.0f64;
        for ik in 0..g.n_z {
            for ij in 0..g.n_v {
                if g.is_nyquist(ik, ij) {
                    continue;
                }
                let k = g.k_of(ik);
                let j = g.j_of(ij);
                let a = self.coeffs[g.index(ik, ij)];
                let b = self.get(-k, -j);
                worst = worst.max((a - b.conj()).norm());
            }
        }
        worst
    }

    /// Zeroes every mode outside the dealiasing region; returns the removed `L²` energy.
    pub fn apply_dealias(&mut self) -> f64 {
        let g = self.grid;
        let mut removed = 0.0;
        for ik in 0..g.n_z {
            for ij in 0..g.n_v {
                if !g.retained(ik, ij) {
                    let idx = g.index(ik, ij);
                    removed += self.coeffs[idx].norm_sqr();
                    self.coeffs[idx] = ZERO;
                }
            }
        }
        removed * g.eta_spacing()
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn add_assign(&mut self, other: &SpectralField) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        SpectralField {
            grid: self.grid,
            coeffs,
        }
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.coeffs {
            *c *= s;
        }
    }

    /// Applies a per-mode multiplier `m(k, η)`.
    pub fn map_modes(&self, mut m: impl FnMut(i64, f64, Complex64) -> Complex64) -> SpectralField {
        let g = self.grid;
        let mut out = self.clone();
        for ik in 0..g.n_z {
            let k = g.k_of(ik);
            for ij in 0..g.n_v {
                let idx = g.index(ik, ij);
                out.coeffs[idx] = m(k, g.eta_of(ij), self.coeffs[idx]);
            }
        }
        out
    }

    /// Writes the CSPF snapshot: 32-byte header then `(re, im)` pairs as
    /// little-endian `f64`, with `k` ascending outer and `j` ascending inner.
    pub fn write_snapshot<W: Write>(&self, mut w: W) -> Result<(), SpectralError> {
        let g = &self.grid;
        let mut header = [0u8; SNAPSHOT_HEADER_LEN];
        header[0..4].copy_from_slice(SNAPSHOT_MAGIC);
        header[4..8].copy_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
        header[8..12].copy_from_slice(&(g.n_z as u32).to_le_bytes());
        header[12..16].copy_from_slice(&(g.n_v as u32).to_le_bytes());
        header[16..24].copy_from_slice(&g.half_width.to_le_bytes());
        w.write_all(&header)?;
        let mut body = Vec::with_capacity(16 * g.len());
        for k in ascending(g.n_z) {
            for j in ascending(g.n_v) {
                let c = self.get(k, j);
                body.extend_from_slice(&c.re.to_le_bytes());
                body.extend_from_slice(&c.im.to_le_bytes());
            }
        }
        w.write_all(&body)?;
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut r: R) -> Result<Self, SpectralError> {
        let mut header = [0u8; SNAPSHOT_HEADER_LEN];
        r.read_exact(&mut header)?;
        if &header[0..4] != SNAPSHOT_MAGIC {
            return Err(SpectralError::Format("bad magic, expected CSPF".into()));
        }
        let version = u32::from_le_bytes(header[4..8].try_into().unwrap());
        if version != SNAPSHOT_VERSION {
            return Err(SpectralError::Format(format!(
                "unsupported snapshot version {version}"
            )));
        }
        let n_z = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
        let n_v = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
        let half_width = f64::from_le_bytes(header[16..24].try_into().unwrap());
        let grid = Grid::new(n_z, n_v, half_width, super::DEFAULT_DEALIAS)?;
        let mut body = vec![0u8; 16 * grid.len()];
        r.read_exact(&mut body)
            .map_err(|e| SpectralError::Format(format!("truncated snapshot body: {e}")))?;
        let mut field = SpectralField::zeros(grid);
        let mut chunks = body.chunks_exact(16);
        for k in ascending(n_z) {
            for j in ascending(n_v) {
                let c = chunks.next().expect("sized above");
                let re = f64::from_le_bytes(c[0..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..16].try_into().unwrap());
                field.set(k, j, Complex64::new(re, im))?;
            }
        }
        Ok(field)
    }
}

pub const SNAPSHOT_MAGIC: &[u8; 4] = b"CSPF";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const SNAPSHOT_HEADER_LEN: usize = 32;

fn ascending(n: usize) -> impl Iterator<Item = i64> {
    let half = (n / 2) as i64;
    (-half + 1)..=half
}

fn forward_scale(g: &Grid) -> f64 {
    g.dz() * g.dy() / (2.0 * std::f64::consts::PI)
}

fn inverse_scale(g: &Grid) -> f64 {
    1.0 / (2.0 * g.half_width)
}

/// Multiplies column `ij` by `scale · (-1)^ij`, the phase of the `y = -L` origin.
fn apply_phase(g: &Grid, buf: &mut [Complex64], scale: f64) {
    for row in buf.chunks_exact_mut(g.n_v) {
        for (ij, c) in row.iter_mut().enumerate() {
            *c *= if ij % 2 == 0 { scale } else { -scale };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DEFAULT_DEALIAS;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(16, 32, 3.0, DEFAULT_DEALIAS).unwrap()
    }

    fn samples(g: &Grid, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(g.len());
        for a in 0..g.n_z {
            for b in 0..g.n_v {
                out.push(f(g.z_at(a), g.y_at(b)));
            }
        }
        out
    }

    #[test]
    fn constant_only_mean_mode() {
        let g = grid();
        let f = SpectralField::from_physical(g, &samples(&g, |_, _| 2.5)).unwrap();
        let mean = f.get(0, 0);
        // (1/2π)·∫∫ 2.5 = 2.5·2L
        assert!((mean.re - 2.5 * 2.0 * g.half_width).abs() < 1e-12);
        for (i, c) in f.coeffs().iter().enumerate() {
            if i != 0 {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cosine_splits_evenly() {
        let g = grid();
        let f = SpectralField::from_physical(g, &samples(&g, |z, _| z.cos())).unwrap();
        let a = f.get(1, 0);
        let b = f.get(-1, 0);
        assert!((a.norm() - b.norm()).abs() < 1e-12);
        assert!(a.norm() > 1.0);
        let others: f64 = f
            .coeffs()
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            - a.norm_sqr()
            - b.norm_sqr();
        assert!(others < 1e-20);
    }

    #[test]
    fn random_roundtrip_and_parseval() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = SpectralField::from_physical(g, &x).unwrap();
        let back = f.to_physical();
        let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = x
            .iter()
            .zip(&back)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err / scale < 1e-12, "roundtrip error {err}");
        let phys: f64 = x.iter().map(|v| v * v).sum::<f64>() * g.dz() * g.dy();
        assert!((phys - f.l2_norm_sq()).abs() < 1e-10 * phys);
        assert!(f.hermitian_defect() < 1e-12);
    }

    #[test]
    fn gaussian_coefficients_are_real() {
        // A profile centred at y = 0 has real transform once the origin phase is applied.
        let g = Grid::new(8, 64, 4.0 * PI, DEFAULT_DEALIAS).unwrap();
        let f = SpectralField::from_physical(g, &samples(&g, |_, y| (-y * y / 2.0).exp())).unwrap();
        let c = f.get(0, 3);
        assert!(c.im.abs() < 1e-12);
        let eta = 3.0 * g.eta_spacing();
        let want = (2.0 * PI).sqrt() * (-eta * eta / 2.0).exp();
        assert!((c.re - want).abs() < 1e-10);
    }

    #[test]
    fn shape_mismatch_is_error() {
        let g = grid();
        assert!(matches!(
            SpectralField::from_physical(g, &[0.0; 10]),
            Err(SpectralError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn snapshot_roundtrip_and_layout() {
        let g = Grid::new(8, 8, 2.0, DEFAULT_DEALIAS).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set(-3, -3, Complex64::new(1.5, -2.0)).unwrap();
        f.set(4, 1, Complex64::new(0.25, 0.5)).unwrap();
        let mut bytes = Vec::new();
        f.write_snapshot(&mut bytes).unwrap();
        assert_eq!(bytes.len(), 32 + 16 * 64);
        assert_eq!(&bytes[0..4], b"CSPF");
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.0);
        // first record is (k, j) = (-3, -3)
        assert_eq!(f64::from_le_bytes(bytes[32..40].try_into().unwrap()), 1.5);
        assert_eq!(f64::from_le_bytes(bytes[40..48].try_into().unwrap()), -2.0);
        let back = SpectralField::read_snapshot(&bytes[..]).unwrap();
        assert_eq!(back.coeffs(), f.coeffs());

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(SpectralField::read_snapshot(&bad[..]).is_err());
        assert!(SpectralField::read_snapshot(&bytes[..100]).is_err());
    }

    #[test]
    fn dealias_is_idempotent() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut f = SpectralField::from_physical(g, &x).unwrap();
        let removed = f.apply_dealias();
        assert!(removed > 0.0);
        let once = f.clone();
        assert_eq!(f.apply_dealias(), 0.0);
        assert_eq!(f, once);
    }
}
