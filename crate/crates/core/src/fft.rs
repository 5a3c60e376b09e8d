//! Pruned three-dimensional transforms between band-limited spectra and a
//! physical collocation grid.
//!
//! A spectrum is stored at resolution `n` in FFT order (index `j` carries
//! wavenumber `j` for `j <= n/2`, `j - n` otherwise) and is assumed to vanish
//! outside `|k_i| <= kmax`. The physical grid has `m` points per axis, which
//! may exceed `n` (zero padding). Lines that are known to be zero are skipped.
//!
//! Physical samples are laid out as `(j2 * m + j3) * m + j1`, i.e. the first
//! axis is the fastest. Pointwise products do not care about the layout; use
//! [`Transform3::grid_index`] when coordinates matter.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Signed wavenumber carried by FFT index `j` at resolution `n`.
#[inline]
pub fn wavenumber(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// FFT index of wavenumber `k` at resolution `n`.
#[inline]
pub fn fft_index(k: i64, n: usize) -> usize {
    k.rem_euclid(n as i64) as usize
}

/// Smallest even size `>= min` whose only prime factors are 2, 3 and 5.
pub fn padded_size(min: usize) -> usize {
    let mut m = min.max(2);
    loop {
        if m.is_multiple_of(2) {
            let mut r = m;
            for p in [2, 3, 5] {
                while r.is_multiple_of(p) {
                    r /= p;
                }
            }
            if r == 1 {
                return m;
            }
        }
        m += 1;
    }
}

pub struct Transform3 {
    n: usize,
    m: usize,
    kmax: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// (spectral index, grid index) for every active wavenumber on one axis.
    active: Vec<(usize, usize)>,
}

impl std::fmt::Debug for Transform3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform3")
            .field("n", &self.n)
            .field("m", &self.m)
            .field("kmax", &self.kmax)
            .finish()
    }
}

impl Transform3 {
    /// `kmax` must be below `n / 2` (no Nyquist content) and the grid must
    /// hold every active wavenumber, `m >= 2 * kmax + 1`.
    pub fn new(n: usize, kmax: usize, m: usize) -> Self {
        assert!(2 * kmax < n, "kmax {kmax} too large for resolution {n}");
        assert!(m > 2 * kmax, "grid {m} cannot hold kmax {kmax}");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let k = kmax as i64;
        let active = (-k..=k)
            .map(|w| (fft_index(w, n), fft_index(w, m)))
            .collect();
        Self {
            n,
            m,
            kmax,
            forward,
            inverse,
            active,
        }
    }

    pub fn grid_size(&self) -> usize {
        self.m
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    /// Physical array index of grid point `(j1, j2, j3)`.
    #[inline]
    pub fn grid_index(&self, j: [usize; 3]) -> usize {
        (j[1] * self.m + j[2]) * self.m + j[0]
    }

    /// Evaluate `sum_k spec(k) e^{i k.x}` on the grid.
    pub fn to_grid(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let (n, m) = (self.n, self.m);
        assert_eq!(spec.len(), n * n * n);
        let mut spectral_of_grid = vec![None; m];
        for &(s, g) in &self.active {
            spectral_of_grid[g] = Some(s);
        }

        // Axes 3 and 2 stay inside one first-axis plane.
        let mut planes = vec![ZERO; m * m * m];
        for_each_chunk(&mut planes, m * m, |g1, plane| {
            let Some(s1) = spectral_of_grid[g1] else {
                return;
            };
            let mut scratch = vec![ZERO; self.inverse.get_inplace_scratch_len()];
            for &(s2, g2) in &self.active {
                let line = &mut plane[g2 * m..(g2 + 1) * m];
                let src = &spec[(s1 * n + s2) * n..(s1 * n + s2 + 1) * n];
                for &(s3, g3) in &self.active {
                    line[g3] = src[s3];
                }
                self.inverse.process_with_scratch(line, &mut scratch);
            }
            let mut t = vec![ZERO; m * m];
            transpose(plane, &mut t, m);
            self.inverse.process_with_scratch(&mut t, &mut scratch);
            transpose(&t, plane, m);
        });

        let mut grid = vec![ZERO; m * m * m];
        let planes = &planes;
        for_each_chunk(&mut grid, m * m, |g2, slab| {
            for g3 in 0..m {
                let line = &mut slab[g3 * m..(g3 + 1) * m];
                for (g1, out) in line.iter_mut().enumerate() {
                    *out = planes[(g1 * m + g2) * m + g3];
                }
            }
        });
        for_each_chunk(&mut grid, m * m, |_, slab| {
            let mut scratch = vec![ZERO; self.inverse.get_inplace_scratch_len()];
            self.inverse.process_with_scratch(slab, &mut scratch);
        });
        grid
    }

    /// Fourier coefficients `m^-3 sum_x grid(x) e^{-i k.x}` for the active
    /// wavenumbers; all other entries of the returned spectrum are zero.
    /// The grid buffer is overwritten.
    pub fn from_grid(&self, grid: &mut [Complex64]) -> Vec<Complex64> {
        let (n, m) = (self.n, self.m);
        assert_eq!(grid.len(), m * m * m);
        for_each_chunk(grid, m * m, |_, slab| {
            let mut scratch = vec![ZERO; self.forward.get_inplace_scratch_len()];
            self.forward.process_with_scratch(slab, &mut scratch);
        });

        let scale = 1.0 / (m * m * m) as f64;
        let grid = &*grid;
        let planes: Vec<(usize, Vec<Complex64>)> = map_collect(&self.active, |&(s1, g1)| {
            let mut scratch = vec![ZERO; self.forward.get_inplace_scratch_len()];
            // t[g3][g2] so that the second axis is contiguous
            let mut t = vec![ZERO; m * m];
            for g2 in 0..m {
                for g3 in 0..m {
                    t[g3 * m + g2] = grid[(g2 * m + g3) * m + g1];
                }
            }
            self.forward.process_with_scratch(&mut t, &mut scratch);
            let mut out = vec![ZERO; n * n];
            let mut line = vec![ZERO; m];
            for &(s2, g2) in &self.active {
                for (g3, v) in line.iter_mut().enumerate() {
                    *v = t[g3 * m + g2];
                }
                self.forward.process_with_scratch(&mut line, &mut scratch);
                for &(s3, g3) in &self.active {
                    out[s2 * n + s3] = line[g3] * scale;
                }
            }
            (s1, out)
        });

        let mut spec = vec![ZERO; n * n * n];
        for (s1, plane) in planes {
            spec[s1 * n * n..(s1 + 1) * n * n].copy_from_slice(&plane);
        }
        spec
    }

    /// Split the transform of `p + i q` (p, q real) into the spectra of `p`
    /// and `q`, using `P(k) = (Z(k) + conj Z(-k)) / 2`.
    pub fn unpack_pair(&self, z: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.n;
        let mut p = vec![ZERO; n * n * n];
        let mut q = vec![ZERO; n * n * n];
        let neg = |s: usize| (n - s) % n;
        for &(s1, _) in &self.active {
            for &(s2, _) in &self.active {
                for &(s3, _) in &self.active {
                    let i = (s1 * n + s2) * n + s3;
                    let j = (neg(s1) * n + neg(s2)) * n + neg(s3);
                    let a = z[i];
                    let b = z[j].conj();
                    p[i] = (a + b) * 0.5;
                    // (a - b) / (2i)
                    let d = a - b;
                    q[i] = Complex64::new(d.im * 0.5, -d.re * 0.5);
                }
            }
        }
        (p, q)
    }
}

/// Pack two Hermitian spectra as `a + i b`, whose inverse transform is
/// `f_a + i f_b`.
pub fn pack_pair(a: &[Complex64], b: Option<&[Complex64]>) -> Vec<Complex64> {
    match b {
        Some(b) => a
            .iter()
            .zip(b)
            .map(|(x, y)| Complex64::new(x.re - y.im, x.im + y.re))
            .collect(),
        None => a.to_vec(),
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    const B: usize = 8;
    for ib in (0..m).step_by(B) {
        for jb in (0..m).step_by(B) {
            for i in ib..(ib + B).min(m) {
                for j in jb..(jb + B).min(m) {
                    dst[j * m + i] = src[i * m + j];
                }
            }
        }
    }
}

#[cfg(feature = "parallel")]
fn for_each_chunk<F>(buf: &mut [Complex64], size: usize, f: F)
where
    F: Fn(usize, &mut [Complex64]) + Sync + Send,
{
    buf.par_chunks_mut(size)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

#[cfg(not(feature = "parallel"))]
fn for_each_chunk<F>(buf: &mut [Complex64], size: usize, f: F)
where
    F: Fn(usize, &mut [Complex64]),
{
    buf.chunks_mut(size).enumerate().for_each(|(i, c)| f(i, c));
}

#[cfg(feature = "parallel")]
fn map_collect<T: Sync, R: Send, F: Fn(&T) -> R + Sync + Send>(items: &[T], f: F) -> Vec<R> {
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_collect<T, R, F: Fn(&T) -> R>(items: &[T], f: F) -> Vec<R> {
    items.iter().map(f).collect()
}
