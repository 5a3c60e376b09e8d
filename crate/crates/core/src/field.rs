//! Fourier representation of velocity fields on the torus `[0, 2pi)^3`.

use std::f64::consts::PI;
use std::ops::Deref;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft::{fft_index, wavenumber, Transform3, ZERO};

/// Volume of the periodic box, `(2 pi)^3`.
pub const VOLUME: f64 = 8.0 * PI * PI * PI;

pub type Mode = [i64; 3];

#[inline]
pub fn norm_sq(k: Mode) -> i64 {
    k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
}

#[inline]
fn cnorm_sq(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

/// Complex 3-vector coefficients for every wavevector with components in
/// `{-n/2+1, ..., n/2}`, stored per component in FFT order.
///
/// No structural invariant is attached; see [`SpectralField`] for the
/// divergence-free, mean-zero, Hermitian refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    n: usize,
    data: [Vec<Complex64>; 3],
}

impl FourierField {
    pub fn zeros(n: usize) -> Result<Self> {
        check_resolution(n)?;
        let len = n * n * n;
        Ok(Self {
            n,
            data: [vec![ZERO; len], vec![ZERO; len], vec![ZERO; len]],
        })
    }

    pub(crate) fn from_components(n: usize, data: [Vec<Complex64>; 3]) -> Self {
        debug_assert!(data.iter().all(|c| c.len() == n * n * n));
        Self { n, data }
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.data[c]
    }

    /// Largest wavenumber magnitude per axis that is kept (Nyquist excluded).
    pub fn kmax(&self) -> usize {
        self.n / 2 - 1
    }

    pub fn index(&self, k: Mode) -> Option<usize> {
        let h = (self.n / 2) as i64;
        if k.iter().any(|&c| c <= -h || c > h) {
            return None;
        }
        let n = self.n;
        Some((fft_index(k[0], n) * n + fft_index(k[1], n)) * n + fft_index(k[2], n))
    }

    pub fn mode_of(&self, i: usize) -> Mode {
        let n = self.n;
        [
            wavenumber(i / (n * n), n),
            wavenumber((i / n) % n, n),
            wavenumber(i % n, n),
        ]
    }

    pub fn get(&self, k: Mode) -> [Complex64; 3] {
        match self.index(k) {
            Some(i) => self.at(i),
            None => [ZERO; 3],
        }
    }

    #[inline]
    pub fn at(&self, i: usize) -> [Complex64; 3] {
        [self.data[0][i], self.data[1][i], self.data[2][i]]
    }

    pub fn set(&mut self, k: Mode, v: [Complex64; 3]) -> Result<()> {
        let i = self.index(k).ok_or(Error::ModeOutOfRange {
            mode: k,
            resolution: self.n,
        })?;
        self.put(i, v);
        Ok(())
    }

    #[inline]
    pub(crate) fn put(&mut self, i: usize, v: [Complex64; 3]) {
        for (component, value) in self.data.iter_mut().zip(v) {
            component[i] = value;
        }
    }

    /// Iterate `(index, mode)` over every stored coefficient.
    pub fn modes(&self) -> impl Iterator<Item = (usize, Mode)> + '_ {
        (0..self.n * self.n * self.n).map(move |i| (i, self.mode_of(i)))
    }

    fn is_nyquist(&self, k: Mode) -> bool {
        let h = (self.n / 2) as i64;
        k.contains(&h)
    }

    /// Enforce `coeff(-k) = conj(coeff(k))`, clear the mean and the
    /// Nyquist planes.
    pub fn symmetrize(&mut self) {
        for i in 0..self.n * self.n * self.n {
            let k = self.mode_of(i);
            if k == [0, 0, 0] || self.is_nyquist(k) {
                self.put(i, [ZERO; 3]);
                continue;
            }
            let j = self.index([-k[0], -k[1], -k[2]]).expect("mirror mode");
            if j < i {
                continue;
            }
            let (a, b) = (self.at(i), self.at(j));
            let mut va = [ZERO; 3];
            for c in 0..3 {
                va[c] = (a[c] + b[c].conj()) * 0.5;
            }
            self.put(i, va);
            self.put(j, va.map(|z| z.conj()));
        }
    }

    pub fn scale(&mut self, s: f64) {
        for comp in &mut self.data {
            comp.iter_mut().for_each(|z| *z *= s);
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &FourierField) {
        assert_eq!(self.n, other.n);
        for c in 0..3 {
            for (a, b) in self.data[c].iter_mut().zip(&other.data[c]) {
                *a += b * s;
            }
        }
    }

    /// Zero-pad or truncate to resolution `n`. Modes outside the new range
    /// are dropped, the Nyquist planes are cleared.
    pub fn resample(&self, n: usize) -> Result<FourierField> {
        let mut out = FourierField::zeros(n)?;
        let kmax = (self.kmax().min(out.kmax())) as i64;
        for k1 in -kmax..=kmax {
            for k2 in -kmax..=kmax {
                for k3 in -kmax..=kmax {
                    let k = [k1, k2, k3];
                    let (i, j) = (self.index(k).unwrap(), out.index(k).unwrap());
                    out.put(j, self.at(i));
                }
            }
        }
        Ok(out)
    }

    /// Spectral inner product `(f, g) = (2pi)^3 sum_k Re(f(k) . conj g(k))`.
    pub fn inner(&self, other: &FourierField) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::ResolutionMismatch(self.n, other.n));
        }
        let mut acc = 0.0;
        for c in 0..3 {
            for (a, b) in self.data[c].iter().zip(&other.data[c]) {
                acc += a.re * b.re + a.im * b.im;
            }
        }
        Ok(VOLUME * acc)
    }

    /// `sum_k |k|^{2p} |coeff(k)|^2`, the building block of all Sobolev norms.
    fn weighted_energy(&self, power: i32) -> f64 {
        let mut acc = 0.0;
        for (i, k) in self.modes() {
            let w = (norm_sq(k) as f64).powi(power);
            if w != 0.0 || power == 0 {
                acc += w * cnorm_sq(&self.at(i));
            }
        }
        acc
    }

    pub fn l2(&self) -> f64 {
        (VOLUME * self.weighted_energy(0)).sqrt()
    }

    pub fn dirichlet(&self) -> f64 {
        (VOLUME * self.weighted_energy(1)).sqrt()
    }

    pub fn laplacian_l2(&self) -> f64 {
        (VOLUME * self.weighted_energy(2)).sqrt()
    }

    /// `sum_k |coeff(k)|`, an upper bound for the sup norm.
    pub fn l1_coefficients(&self) -> f64 {
        (0..self.n * self.n * self.n)
            .map(|i| cnorm_sq(&self.at(i)).sqrt())
            .sum()
    }

    /// Velocity samples on the `n^3` collocation grid.
    pub fn to_physical(&self) -> Vec<[f64; 3]> {
        let tr = Transform3::new(self.n, self.kmax(), self.n);
        let a = tr.to_grid(&crate::fft::pack_pair(&self.data[0], Some(&self.data[1])));
        let b = tr.to_grid(&self.data[2]);
        a.iter().zip(&b).map(|(p, q)| [p.re, p.im, q.re]).collect()
    }

    /// Max of `|v(x)|` over the collocation grid.
    pub fn grid_sup(&self) -> f64 {
        self.to_physical()
            .iter()
            .map(|v| (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt())
            .fold(0.0, f64::max)
    }

    /// Largest `|k . coeff(k)| / |k|`, relative to the largest coefficient.
    pub fn divergence_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (i, k) in self.modes() {
            let v = self.at(i);
            scale = scale.max(cnorm_sq(&v).sqrt());
            let ns = norm_sq(k);
            if ns == 0 {
                continue;
            }
            let d = v[0] * k[0] as f64 + v[1] * k[1] as f64 + v[2] * k[2] as f64;
            worst = worst.max(d.norm() / (ns as f64).sqrt());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// Largest `|coeff(-k) - conj coeff(k)|`, relative to the largest coefficient.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (i, k) in self.modes() {
            let v = self.at(i);
            scale = scale.max(cnorm_sq(&v).sqrt());
            if self.is_nyquist(k) {
                worst = worst.max(cnorm_sq(&v).sqrt());
                continue;
            }
            let w = self.get([-k[0], -k[1], -k[2]]);
            let d: f64 = (0..3).map(|c| (v[c] - w[c].conj()).norm_sqr()).sum();
            worst = worst.max(d.sqrt());
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn mean(&self) -> [Complex64; 3] {
        self.at(0)
    }
}

fn check_resolution(n: usize) -> Result<()> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::InvalidResolution(n));
    }
    Ok(())
}

/// A real, divergence-free, mean-zero velocity field.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField(FourierField);

impl Deref for SpectralField {
    type Target = FourierField;

    fn deref(&self) -> &FourierField {
        &self.0
    }
}

impl SpectralField {
    pub fn zeros(n: usize) -> Result<Self> {
        FourierField::zeros(n).map(Self)
    }

    /// Wrap coefficients that are already known to satisfy the invariants.
    pub(crate) fn from_raw(f: FourierField) -> Self {
        Self(f)
    }

    pub fn as_fourier(&self) -> &FourierField {
        &self.0
    }

    pub fn into_fourier(self) -> FourierField {
        self.0
    }

    pub(crate) fn raw_mut(&mut self) -> &mut FourierField {
        &mut self.0
    }

    /// Zero-padding or truncation; truncation keeps every invariant.
    pub fn resample(&self, n: usize) -> Result<SpectralField> {
        self.0.resample(n).map(Self)
    }

    /// Drop every mode with `|k|^2 > radius^2`.
    pub fn truncate_sphere(&self, radius: f64) -> SpectralField {
        let mut out = self.0.clone();
        let r2 = radius * radius;
        for i in 0..out.n * out.n * out.n {
            if norm_sq(out.mode_of(i)) as f64 > r2 {
                out.put(i, [ZERO; 3]);
            }
        }
        Self(out)
    }

    pub fn norms(&self, time: f64, time_derivative: Option<&SpectralField>) -> NormBundle {
        norms(self, time_derivative, time)
    }

    pub fn difference(&self, other: &SpectralField) -> Result<SpectralField> {
        let n = self.n.max(other.n);
        let mut a = self.0.resample(n)?;
        let b = other.0.resample(n)?;
        a.axpy(-1.0, &b);
        Ok(Self(a))
    }
}

/// Orthogonal projection onto divergence-free, mean-zero fields:
/// `coeff(k) -> (I - k k^T / |k|^2) coeff(k)`, `coeff(0) -> 0`.
pub fn leray_project(f: &FourierField) -> SpectralField {
    let mut out = f.clone();
    project_in_place(&mut out);
    SpectralField(out)
}

pub(crate) fn project_in_place(f: &mut FourierField) {
    for i in 0..f.n * f.n * f.n {
        let k = f.mode_of(i);
        let ns = norm_sq(k);
        if ns == 0 {
            f.put(i, [ZERO; 3]);
            continue;
        }
        let v = f.at(i);
        let kf = k.map(|c| c as f64);
        let d = (v[0] * kf[0] + v[1] * kf[1] + v[2] * kf[2]) / ns as f64;
        f.put(i, [v[0] - d * kf[0], v[1] - d * kf[1], v[2] - d * kf[2]]);
    }
}

/// Radial Fourier symbol of the space mollifier.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierSymbol {
    /// `exp(-r^2 / 2)`
    #[default]
    Gaussian,
    /// `exp(1 - 1 / (1 - r^2))` for `r < 1`, zero beyond.
    CompactBump,
}

impl MollifierSymbol {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            MollifierSymbol::Gaussian => (-0.5 * r * r).exp(),
            MollifierSymbol::CompactBump => {
                if r >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MollifierSymbol::Gaussian => "gaussian",
            MollifierSymbol::CompactBump => "compact_bump",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(Self::Gaussian),
            "compact_bump" | "bump" => Some(Self::CompactBump),
            _ => None,
        }
    }
}

/// `coeff(k) -> symbol(|k| / m) coeff(k)`.
pub fn mollify(f: &SpectralField, m: f64, symbol: MollifierSymbol) -> Result<SpectralField> {
    if !(m >= 1.0) {
        return Err(invalid("m", format!("mollification index must be >= 1, got {m}")));
    }
    let mut out = f.0.clone();
    for i in 0..out.n * out.n * out.n {
        let k = out.mode_of(i);
        let w = symbol.eval((norm_sq(k) as f64).sqrt() / m);
        if w != 1.0 {
            for c in 0..3 {
                out.data[c][i] *= w;
            }
        }
    }
    Ok(SpectralField(out))
}

/// Norms of a velocity field at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBundle {
    pub t: f64,
    pub l2: f64,
    pub dirichlet: f64,
    pub laplacian_l2: f64,
    /// `|D^2 v|_2`; equals `laplacian_l2` on the torus.
    pub d2_l2: f64,
    /// Max of `|v|` over the collocation grid (a lower estimate).
    pub sup: f64,
    /// `sum_k |coeff(k)|` (a certified upper bound for the sup norm).
    pub sup_bound: f64,
    pub vt_l2: Option<f64>,
}

impl NormBundle {
    /// Sup-norm value used where an upper bound is required.
    pub fn sup_upper(&self) -> f64 {
        self.sup_bound.max(self.sup)
    }
}

pub fn norms(f: &SpectralField, f_t: Option<&SpectralField>, t: f64) -> NormBundle {
    let lap = f.laplacian_l2();
    NormBundle {
        t,
        l2: f.l2(),
        dirichlet: f.dirichlet(),
        laplacian_l2: lap,
        d2_l2: lap,
        sup: f.grid_sup(),
        sup_bound: f.l1_coefficients(),
        vt_l2: f_t.map(|g| g.l2()),
    }
}

/// Initial-datum descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Datum {
    Zero,
    /// `(a sin x2, 0, 0)`
    Kolmogorov { amplitude: f64 },
    /// `(a sin x1 cos x2 cos x3, -a cos x1 sin x2 cos x3, 0)`
    TaylorGreen { amplitude: f64 },
    /// Gaussian random phases with energy spectrum `E(k) ~ k^-slope`,
    /// normalized to root-mean-square velocity `amplitude`.
    Random { seed: u64, slope: f64, amplitude: f64 },
}

impl Datum {
    pub fn name(&self) -> &'static str {
        match self {
            Datum::Zero => "zero",
            Datum::Kolmogorov { .. } => "kolmogorov",
            Datum::TaylorGreen { .. } => "taylor_green",
            Datum::Random { .. } => "random",
        }
    }

    /// Build a preset by name.
    pub fn from_name(name: &str, amplitude: f64, seed: u64, slope: f64) -> Result<Self> {
        match name {
            "zero" => Ok(Datum::Zero),
            "kolmogorov" => Ok(Datum::Kolmogorov { amplitude }),
            "taylor_green" => Ok(Datum::TaylorGreen { amplitude }),
            "random" => Ok(Datum::Random {
                seed,
                slope,
                amplitude,
            }),
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

pub fn make_field(datum: &Datum, n: usize) -> Result<SpectralField> {
    let mut f = FourierField::zeros(n)?;
    let half = Complex64::new(0.0, 0.5);
    match *datum {
        Datum::Zero => {}
        Datum::Kolmogorov { amplitude: a } => {
            check_amplitude(a)?;
            // sin x = (e^{ix} - e^{-ix}) / 2i
            f.set([0, 1, 0], [-half * a, ZERO, ZERO])?;
            f.set([0, -1, 0], [half * a, ZERO, ZERO])?;
        }
        Datum::TaylorGreen { amplitude: a } => {
            check_amplitude(a)?;
            for s1 in [-1i64, 1] {
                for s2 in [-1i64, 1] {
                    for s3 in [-1i64, 1] {
                        let c1 = Complex64::new(0.0, -a * s1 as f64 / 8.0);
                        let c2 = Complex64::new(0.0, a * s2 as f64 / 8.0);
                        f.set([s1, s2, s3], [c1, c2, ZERO])?;
                    }
                }
            }
        }
        Datum::Random {
            seed,
            slope,
            amplitude,
        } => {
            check_amplitude(amplitude)?;
            if !slope.is_finite() {
                return Err(invalid("slope", "must be finite"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let exponent = -(slope + 2.0) / 4.0;
            for i in 0..n * n * n {
                let k = f.mode_of(i);
                let ns = norm_sq(k);
                let mut v = [ZERO; 3];
                for c in v.iter_mut() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    *c = Complex64::new(re, im);
                }
                if ns > 0 {
                    let w = (ns as f64).powf(exponent);
                    f.put(i, v.map(|z| z * w));
                }
            }
            project_in_place(&mut f);
            f.symmetrize();
            let l2 = f.l2();
            if l2 > 0.0 {
                f.scale(amplitude * VOLUME.sqrt() / l2);
            }
        }
    }
    Ok(SpectralField(f))
}

fn check_amplitude(a: f64) -> Result<()> {
    if !a.is_finite() {
        return Err(invalid("amplitude", "must be finite"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn random(seed: u64, n: usize) -> SpectralField {
        make_field(
            &Datum::Random {
                seed,
                slope: 3.0,
                amplitude: 1.0,
            },
            n,
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_resolution() {
        assert!(matches!(
            make_field(&Datum::Zero, 6).map(|_| ()),
            Ok(())
        ));
        assert!(matches!(make_field(&Datum::Zero, 7), Err(Error::InvalidResolution(7))));
        assert!(matches!(make_field(&Datum::Zero, 2), Err(Error::InvalidResolution(2))));
        assert!(matches!(
            Datum::from_name("abc", 1.0, 0, 1.0),
            Err(Error::UnknownPreset(_))
        ));
        assert!(make_field(&Datum::Kolmogorov { amplitude: f64::NAN }, 8).is_err());
    }

    #[test]
    fn zero_field() {
        let f = make_field(&Datum::Zero, 8).unwrap();
        let nb = f.norms(0.0, None);
        assert_eq!(nb.l2, 0.0);
        assert_eq!(nb.sup, 0.0);
        assert_eq!(nb.sup_bound, 0.0);
    }

    #[test]
    fn kolmogorov_norms() {
        let f = make_field(&Datum::Kolmogorov { amplitude: 1.0 }, 8).unwrap();
        assert_relative_eq!(f.l2().powi(2), VOLUME / 2.0, max_relative = 1e-14);
        assert_relative_eq!(f.l2().powi(2), 124.0251, max_relative = 1e-6);
        let nb = f.norms(0.0, None);
        assert_relative_eq!(nb.l2, 11.1367, max_relative = 1e-5);
        assert_relative_eq!(nb.dirichlet, nb.l2, max_relative = 1e-14);
        assert_relative_eq!(nb.laplacian_l2, nb.l2, max_relative = 1e-14);
        assert_relative_eq!(nb.sup, 1.0, max_relative = 1e-14);
        assert_relative_eq!(nb.sup_bound, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn taylor_green_norms() {
        let f = make_field(&Datum::TaylorGreen { amplitude: 1.0 }, 8).unwrap();
        assert_relative_eq!(f.l2().powi(2), VOLUME / 4.0, max_relative = 1e-14);
        assert_relative_eq!(f.l2().powi(2), 62.0126, max_relative = 1e-6);
        assert_eq!(f.divergence_residual(), 0.0);
        assert_eq!(f.hermitian_residual(), 0.0);
        // compare with the closed form on the grid
        let phys = f.to_physical();
        let n = 8;
        let h = 2.0 * PI / n as f64;
        for (j1, j2, j3) in [(0, 1, 2), (3, 5, 7), (1, 1, 1)] {
            let x = [j1 as f64 * h, j2 as f64 * h, j3 as f64 * h];
            let v = phys[(j2 * n + j3) * n + j1];
            assert!((v[0] - x[0].sin() * x[1].cos() * x[2].cos()).abs() < 1e-14);
            assert!((v[1] + x[0].cos() * x[1].sin() * x[2].cos()).abs() < 1e-14);
            assert!(v[2].abs() < 1e-14);
        }
    }

    #[test]
    fn projector_examples() {
        let mut f = FourierField::zeros(8).unwrap();
        let one = Complex64::new(1.0, 0.0);
        f.set([1, 0, 0], [one, one, ZERO]).unwrap();
        f.set([-1, 0, 0], [one, one, ZERO]).unwrap();
        let p = leray_project(&f);
        assert_eq!(p.get([1, 0, 0]), [ZERO, one, ZERO]);

        // gradients are annihilated
        let mut g = FourierField::zeros(8).unwrap();
        let q = random(4, 8);
        for (i, k) in g.modes().collect::<Vec<_>>() {
            let qk = q.at(i)[0];
            let ik = Complex64::new(0.0, 1.0) * qk;
            g.put(i, k.map(|c| ik * c as f64));
        }
        let p = leray_project(&g);
        assert!(p.l2() < 1e-14);
    }

    #[test]
    fn parseval_on_grid() {
        let f = random(11, 12);
        let phys = f.to_physical();
        let quad: f64 = phys.iter().map(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sum::<f64>()
            * VOLUME
            / phys.len() as f64;
        assert_relative_eq!(quad, f.l2().powi(2), max_relative = 1e-12);
    }

    #[test]
    fn mollifier_limits() {
        let f = make_field(&Datum::Kolmogorov { amplitude: 1.0 }, 8).unwrap();
        let mut last = 0.0;
        for m in [1.0, 2.0, 10.0, 1e4] {
            let g = mollify(&f, m, MollifierSymbol::Gaussian).unwrap();
            let ratio = g.get([0, 1, 0])[0].norm() / f.get([0, 1, 0])[0].norm();
            assert!(ratio > last);
            last = ratio;
        }
        assert!((1.0 - last) < 1e-8);
        assert!(mollify(&f, 0.5, MollifierSymbol::Gaussian).is_err());
        let z = mollify(&SpectralField::zeros(8).unwrap(), 3.0, MollifierSymbol::Gaussian).unwrap();
        assert_eq!(z.l2(), 0.0);
        for s in [MollifierSymbol::Gaussian, MollifierSymbol::CompactBump] {
            assert_eq!(s.eval(0.0), 1.0);
            assert!(s.eval(0.3) <= 1.0 && s.eval(0.3) > s.eval(0.6));
        }
    }

    #[test]
    fn resample_keeps_norms() {
        let f = random(2, 8);
        let g = f.resample(16).unwrap();
        assert_eq!(g.l2(), f.l2());
        assert_eq!(g.dirichlet(), f.dirichlet());
        assert_eq!(g.resample(8).unwrap(), f);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn random_fields_satisfy_invariants(seed in 0u64..10_000, n in prop::sample::select(vec![4usize, 6, 8, 10])) {
            let f = random(seed, n);
            prop_assert!(f.divergence_residual() < 1e-13);
            prop_assert!(f.hermitian_residual() < 1e-13);
            prop_assert_eq!(f.mean(), [ZERO; 3]);
            let nb = f.norms(0.0, None);
            prop_assert!(nb.dirichlet.powi(2) <= nb.l2 * nb.laplacian_l2 * (1.0 + 1e-12));
            prop_assert!(nb.sup <= nb.sup_bound * (1.0 + 1e-12));
        }

        #[test]
        fn projector_idempotent_and_self_adjoint(s1 in 0u64..5000, s2 in 0u64..5000) {
            let n = 8;
            // arbitrary (non-solenoidal) Hermitian fields
            let mut a = random(s1, n).into_fourier();
            let b0 = random(s2, n);
            let mut b = b0.clone().into_fourier();
            for (i, k) in a.modes().collect::<Vec<_>>() {
                let kf = k.map(|c| Complex64::new(0.0, c as f64));
                let s = b0.at(i)[1];
                let v = a.at(i);
                a.put(i, [v[0] + kf[0] * s, v[1] + kf[1] * s, v[2] + kf[2] * s]);
                let w = b.at(i);
                b.put(i, [w[0] + kf[0] * v[2], w[1] + kf[1] * v[2], w[2] + kf[2] * v[2]]);
            }
            let pa = leray_project(&a);
            let ppa = leray_project(&pa);
            prop_assert!(pa.difference(&ppa).unwrap().l2() <= 1e-13 * pa.l2().max(1e-300));
            let pb = leray_project(&b);
            let lhs = pa.inner(&b).unwrap();
            let rhs = a.inner(&pb).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (a.l2() * b.l2()).max(1e-300));
        }

        #[test]
        fn mollify_contracts_and_commutes(seed in 0u64..5000) {
            let f = random(seed, 8);
            let g = mollify(&f, 2.0, MollifierSymbol::Gaussian).unwrap();
            prop_assert!(g.l2() <= f.l2());
            prop_assert!(g.divergence_residual() < 1e-13);
            prop_assert!(g.hermitian_residual() < 1e-13);
            // with the projector on an arbitrary field
            let mut raw = f.clone().into_fourier();
            for (i, k) in raw.modes().collect::<Vec<_>>() {
                let v = raw.at(i);
                raw.put(i, [v[0] + Complex64::new(0.0, k[0] as f64) * v[1], v[1], v[2]]);
            }
            raw.symmetrize();
            let a = mollify(&leray_project(&raw), 2.0, MollifierSymbol::Gaussian).unwrap();
            let mut mraw = raw.clone();
            for (i, k) in raw.modes() {
                let w = MollifierSymbol::Gaussian.eval((norm_sq(k) as f64).sqrt() / 2.0);
                mraw.put(i, raw.at(i).map(|z| z * w));
            }
            let b = leray_project(&mraw);
            prop_assert!(a.difference(&b).unwrap().l2() <= 1e-14 * f.l2());
            // with the Laplacian multiplier: |Delta J f| computed both ways
            let lap_then = mollify(&f, 2.0, MollifierSymbol::Gaussian).unwrap().laplacian_l2();
            let mut lf = f.clone().into_fourier();
            for (i, k) in f.modes() {
                let w = MollifierSymbol::Gaussian.eval((norm_sq(k) as f64).sqrt() / 2.0);
                lf.put(i, f.at(i).map(|z| z * w * norm_sq(k) as f64));
            }
            prop_assert!((lf.l2() - lap_then).abs() <= 1e-12 * lap_then.max(1e-300));
        }
    }
}
