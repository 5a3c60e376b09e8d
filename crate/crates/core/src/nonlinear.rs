//! Dealiased convective term `P[(a . grad) u]`.
//!
//! Products are formed on a padded grid with more than `3 kmax` points per
//! axis, so every retained output mode equals the exact truncated
//! convolution sum. For divergence-free `a` the term is evaluated in
//! conservative form `d_j (a_j u_i)`, which needs six forward transforms of
//! products instead of nine gradient fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{pack_pair, padded_size, Transform3, ZERO};
use crate::field::{norm_sq, project_in_place, FourierField, SpectralField};

/// Reusable evaluator for one spectral resolution and band limit.
#[derive(Debug)]
pub struct Convection {
    transform: Transform3,
    /// Retain only `|k|^2 <= radius_sq` in the output (Galerkin truncation).
    radius_sq: Option<f64>,
}

impl Convection {
    /// Full band `|k_i| <= n/2 - 1`, padded by the 3/2 rule.
    pub fn full(n: usize) -> Self {
        let kmax = n / 2 - 1;
        Self {
            transform: Transform3::new(n, kmax, padded_size(3 * kmax + 1)),
            radius_sq: None,
        }
    }

    /// Spherical band `|k| <= radius`; inputs must vanish outside it.
    pub fn spherical(n: usize, radius: f64) -> Self {
        let kmax = (radius.floor() as usize).min(n / 2 - 1);
        Self {
            transform: Transform3::new(n, kmax, padded_size(3 * kmax + 1)),
            radius_sq: Some(radius * radius),
        }
    }

    pub fn grid_size(&self) -> usize {
        self.transform.grid_size()
    }

    pub fn resolution(&self) -> usize {
        self.transform.resolution()
    }

    /// `P[(advecting . grad) u]`, truncated to the band of this evaluator.
    pub fn apply(&self, advecting: &SpectralField, u: &SpectralField) -> Result<SpectralField> {
        let n = self.transform.resolution();
        for f in [advecting, u] {
            if f.resolution() != n {
                return Err(Error::ResolutionMismatch(f.resolution(), n));
            }
        }
        let mut raw = self.conservative_form(advecting, u, std::ptr::eq(advecting, u) || advecting == u);
        project_in_place(&mut raw);
        Ok(SpectralField::from_raw(raw))
    }

    /// Unprojected `(advecting . grad) u`.
    pub fn apply_unprojected(&self, advecting: &SpectralField, u: &SpectralField) -> Result<FourierField> {
        let n = self.transform.resolution();
        for f in [advecting, u] {
            if f.resolution() != n {
                return Err(Error::ResolutionMismatch(f.resolution(), n));
            }
        }
        Ok(self.conservative_form(advecting, u, advecting == u))
    }

    fn conservative_form(&self, a: &SpectralField, u: &SpectralField, same: bool) -> FourierField {
        let tr = &self.transform;
        let n = tr.resolution();

        // products[i][j] = spectrum of a_j u_i
        let mut products: [[Option<Vec<Complex64>>; 3]; 3] = Default::default();
        if same {
            let g01 = tr.to_grid(&pack_pair(u.component(0), Some(u.component(1))));
            let g2 = tr.to_grid(u.component(2));
            let (u0, u1, u2): (Vec<f64>, Vec<f64>, Vec<f64>) = {
                let mut x = Vec::with_capacity(g01.len());
                let mut y = Vec::with_capacity(g01.len());
                let mut z = Vec::with_capacity(g01.len());
                for (p, q) in g01.iter().zip(&g2) {
                    x.push(p.re);
                    y.push(p.im);
                    z.push(q.re);
                }
                (x, y, z)
            };
            let u_phys = [&u0, &u1, &u2];
            let pairs = [((0, 0), (0, 1)), ((0, 2), (1, 1)), ((1, 2), (2, 2))];
            for ((i1, j1), (i2, j2)) in pairs {
                let mut grid: Vec<Complex64> = (0..u0.len())
                    .map(|x| {
                        Complex64::new(u_phys[i1][x] * u_phys[j1][x], u_phys[i2][x] * u_phys[j2][x])
                    })
                    .collect();
                let (p, q) = tr.unpack_pair(&tr.from_grid(&mut grid));
                products[j1][i1] = Some(p.clone());
                products[i1][j1] = Some(p);
                products[j2][i2] = Some(q.clone());
                products[i2][j2] = Some(q);
            }
        } else {
            let g_a01 = tr.to_grid(&pack_pair(a.component(0), Some(a.component(1))));
            let g_a2u0 = tr.to_grid(&pack_pair(a.component(2), Some(u.component(0))));
            let g_u12 = tr.to_grid(&pack_pair(u.component(1), Some(u.component(2))));
            let len = g_a01.len();
            let av = |j: usize, x: usize| match j {
                0 => g_a01[x].re,
                1 => g_a01[x].im,
                _ => g_a2u0[x].re,
            };
            let uv = |i: usize, x: usize| match i {
                0 => g_a2u0[x].im,
                1 => g_u12[x].re,
                _ => g_u12[x].im,
            };
            let index: Vec<(usize, usize)> = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
            for chunk in index.chunks(2) {
                let (i1, j1) = chunk[0];
                let second = chunk.get(1).copied();
                let mut grid: Vec<Complex64> = (0..len)
                    .map(|x| {
                        let re = av(j1, x) * uv(i1, x);
                        let im = second.map_or(0.0, |(i2, j2)| av(j2, x) * uv(i2, x));
                        Complex64::new(re, im)
                    })
                    .collect();
                let (p, q) = tr.unpack_pair(&tr.from_grid(&mut grid));
                products[i1][j1] = Some(p);
                if let Some((i2, j2)) = second {
                    products[i2][j2] = Some(q);
                }
            }
        }

        let mut out = FourierField::zeros(n).expect("valid resolution");
        let radius_sq = self.radius_sq;
        for idx in 0..n * n * n {
            let k = out.mode_of(idx);
            if let Some(r2) = radius_sq {
                if norm_sq(k) as f64 > r2 {
                    continue;
                }
            }
            let kf = k.map(|c| c as f64);
            let mut v = [ZERO; 3];
            for (i, vi) in v.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (j, kj) in kf.iter().enumerate() {
                    acc += products[i][j].as_ref().unwrap()[idx] * *kj;
                }
                // multiply by i
                *vi = Complex64::new(-acc.im, acc.re);
            }
            out.put(idx, v);
        }
        out
    }
}

/// `P[(advecting . grad) u]` with full 3/2-rule dealiasing.
pub fn nonlinear_term(advecting: &SpectralField, u: &SpectralField) -> Result<SpectralField> {
    if advecting.resolution() != u.resolution() {
        return Err(Error::ResolutionMismatch(advecting.resolution(), u.resolution()));
    }
    Convection::full(u.resolution()).apply(advecting, u)
}

/// `(I - P)[-(advecting . grad) u]`, the pressure gradient that keeps the
/// velocity solenoidal.
pub fn pressure_gradient(advecting: &SpectralField, u: &SpectralField) -> Result<FourierField> {
    if advecting.resolution() != u.resolution() {
        return Err(Error::ResolutionMismatch(advecting.resolution(), u.resolution()));
    }
    let conv = Convection::full(u.resolution());
    let raw = conv.apply_unprojected(advecting, u)?;
    let mut projected = raw.clone();
    project_in_place(&mut projected);
    // -(raw - P raw)
    let mut out = projected;
    out.axpy(-1.0, &raw);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{make_field, Datum, VOLUME};

    fn tg(n: usize) -> SpectralField {
        make_field(&Datum::TaylorGreen { amplitude: 1.0 }, n).unwrap()
    }

    #[test]
    fn kolmogorov_self_advection_vanishes() {
        let k = make_field(&Datum::Kolmogorov { amplitude: 1.0 }, 8).unwrap();
        assert!(nonlinear_term(&k, &k).unwrap().l2() < 1e-14);
        assert!(pressure_gradient(&k, &k).unwrap().l2() < 1e-14);
    }

    #[test]
    fn zero_input() {
        let z = SpectralField::zeros(8).unwrap();
        assert_eq!(nonlinear_term(&tg(8), &z).unwrap().l2(), 0.0);
    }

    #[test]
    fn resolution_mismatch() {
        assert!(matches!(
            nonlinear_term(&tg(8), &tg(10)),
            Err(Error::ResolutionMismatch(8, 10))
        ));
    }

    #[test]
    fn pressure_gradient_is_a_gradient() {
        let u = tg(8);
        let g = pressure_gradient(&u, &u).unwrap();
        assert!(g.l2() > 1.0);
        for (i, k) in g.modes() {
            let v = g.at(i);
            let kf = k.map(|c| c as f64);
            let cross = [
                v[1] * kf[2] - v[2] * kf[1],
                v[2] * kf[0] - v[0] * kf[2],
                v[0] * kf[1] - v[1] * kf[0],
            ];
            assert!(cross.iter().all(|c| c.norm() < 1e-14));
        }
        assert!(crate::field::leray_project(&g).l2() < 1e-14);
    }

    #[test]
    fn skew_symmetry() {
        let u = make_field(
            &Datum::Random {
                seed: 9,
                slope: 2.0,
                amplitude: 1.0,
            },
            12,
        )
        .unwrap();
        let b = nonlinear_term(&u, &u).unwrap();
        let s = b.inner(&u).unwrap();
        assert!(s.abs() <= 1e-11 * b.l2() * u.l2(), "{s}");
        let _ = VOLUME;
    }
}
