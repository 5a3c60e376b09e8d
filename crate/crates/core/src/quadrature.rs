//! Time integrals and derivatives of sampled series.
//!
//! Integrals use the local cubic through the four nearest samples of each
//! interval, integrated exactly by two-point Gauss-Legendre. This is fourth
//! order on nonuniform grids and falls back to the trapezoid rule when fewer
//! than four samples exist.

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Plain composite trapezoid rule.
pub fn trapezoid(t: &[f64], f: &[f64]) -> f64 {
    assert_eq!(t.len(), f.len());
    t.windows(2)
        .zip(f.windows(2))
        .map(|(tw, fw)| 0.5 * (tw[1] - tw[0]) * (fw[0] + fw[1]))
        .sum()
}

fn stencil_start(i: usize, len: usize) -> usize {
    i.saturating_sub(1).min(len - 4)
}

fn lagrange(ts: &[f64], fs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for a in 0..ts.len() {
        let mut w = 1.0;
        for b in 0..ts.len() {
            if a != b {
                w *= (x - ts[b]) / (ts[a] - ts[b]);
            }
        }
        acc += w * fs[a];
    }
    acc
}

/// Integral of the interpolant over `[lo, hi]`, a subset of interval `i`.
fn interval_integral(t: &[f64], f: &[f64], i: usize, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if t.len() < 4 {
        let s = (t[i + 1] - t[i]).max(f64::MIN_POSITIVE);
        let at = |x: f64| f[i] + (f[i + 1] - f[i]) * (x - t[i]) / s;
        return 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    let s = stencil_start(i, t.len());
    let (ts, fs) = (&t[s..s + 4], &f[s..s + 4]);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    GAUSS.iter().map(|g| half * lagrange(ts, fs, mid + half * g)).sum()
}

/// Running integral `int_{t_0}^{t_j} f` for every sample `j`.
pub fn cumulative(t: &[f64], f: &[f64]) -> Vec<f64> {
    assert_eq!(t.len(), f.len());
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    if t.is_empty() {
        return out;
    }
    out.push(0.0);
    for i in 0..t.len() - 1 {
        acc += interval_integral(t, f, i, t[i], t[i + 1]);
        out.push(acc);
    }
    out
}

pub fn integrate(t: &[f64], f: &[f64]) -> f64 {
    cumulative(t, f).last().copied().unwrap_or(0.0)
}

/// Integral over `[a, b]`, clipped to the sampled span.
pub fn integrate_between(t: &[f64], f: &[f64], a: f64, b: f64) -> f64 {
    assert_eq!(t.len(), f.len());
    if t.len() < 2 || b <= a {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..t.len() - 1 {
        let lo = a.max(t[i]);
        let hi = b.min(t[i + 1]);
        if hi > lo {
            acc += interval_integral(t, f, i, lo, hi);
        }
    }
    acc
}

/// Three-point centered derivative at interior samples (second order on
/// nonuniform grids); `None` at both ends.
pub fn centered_derivative(t: &[f64], f: &[f64]) -> Vec<Option<f64>> {
    let n = t.len();
    (0..n)
        .map(|j| {
            if j == 0 || j + 1 >= n {
                return None;
            }
            let (h0, h1) = (t[j] - t[j - 1], t[j + 1] - t[j]);
            let d = -h1 / (h0 * (h0 + h1)) * f[j - 1] + (h1 - h0) / (h0 * h1) * f[j]
                + h0 / (h1 * (h0 + h1)) * f[j + 1];
            Some(d)
        })
        .collect()
}

/// Largest `|f'''|` estimated from third divided differences.
pub fn third_derivative_bound(t: &[f64], f: &[f64]) -> f64 {
    if t.len() < 4 {
        return 0.0;
    }
    let dd = |ts: &[f64], fs: &[f64]| -> f64 {
        // Newton divided difference of order 3, times 3!
        let mut c = fs.to_vec();
        for order in 1..4 {
            for i in (order..4).rev() {
                c[i] = (c[i] - c[i - 1]) / (ts[i] - ts[i - order]);
            }
        }
        6.0 * c[3]
    };
    t.windows(4)
        .zip(f.windows(4))
        .map(|(ts, fs)| dd(ts, fs).abs())
        .fold(0.0, f64::max)
}
