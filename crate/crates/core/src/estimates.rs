//! Executable a priori estimates along trajectories: the energy relation,
//! the fractional second-derivative bound, the Dirichlet-norm differential
//! inequality, the Agmon interpolation inequality and the weak formulation.
//!
//! Notation: `D = |grad v|_2`, `L = |P Delta v|_2`, `S` the certified sup-norm
//! bound. Every check compares `lhs <= rhs` per sample.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Sample, Scheme, System, Tolerances, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::field::{norm_sq, project_in_place, FourierField, Mode, NormBundle, SpectralField, VOLUME};
use crate::quadrature::{centered_derivative, cumulative, integrate, third_derivative_bound};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Violated, but within tolerance.
    Warn,
    Fail,
    /// Violated by more than ten tolerances.
    HardFail,
    NotApplicable,
}

/// Outcome of one inequality check. `max_violation = min_j (rhs_j - lhs_j)`,
/// so the check passes iff `max_violation >= -tolerance`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub tolerance: f64,
    pub max_violation: f64,
    pub pass: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl InequalityReport {
    pub fn from_series(name: &str, times: Vec<f64>, lhs: Vec<f64>, rhs: Vec<f64>, tolerance: f64) -> Self {
        assert!(times.len() == lhs.len() && lhs.len() == rhs.len());
        let max_violation = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| if l.is_nan() || r.is_nan() { f64::NEG_INFINITY } else { r - l })
            .fold(f64::INFINITY, f64::min);
        let max_violation = if max_violation == f64::INFINITY { 0.0 } else { max_violation };
        let verdict = if max_violation >= 0.0 {
            Verdict::Pass
        } else if max_violation >= -tolerance {
            Verdict::Warn
        } else if max_violation >= -10.0 * tolerance {
            Verdict::Fail
        } else {
            Verdict::HardFail
        };
        match verdict {
            Verdict::Warn => log::warn!("{name}: violation {:.3e} within tolerance {tolerance:.3e}", -max_violation),
            Verdict::Fail | Verdict::HardFail => {
                log::warn!("{name}: violation {:.3e} exceeds tolerance {tolerance:.3e}", -max_violation)
            }
            _ => {}
        }
        Self {
            name: name.to_string(),
            times,
            lhs,
            rhs,
            tolerance,
            max_violation,
            pass: max_violation >= -tolerance,
            verdict,
            note: None,
        }
    }

    pub fn not_applicable(name: &str, reason: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            times: Vec::new(),
            lhs: Vec::new(),
            rhs: Vec::new(),
            tolerance: 0.0,
            max_violation: 0.0,
            pass: true,
            verdict: Verdict::NotApplicable,
            note: Some(reason.into()),
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Combine two reports on the same property; the result fails if either does.
    fn and(self, other: InequalityReport) -> Self {
        let worse = if other.max_violation + other.tolerance < self.max_violation + self.tolerance {
            &other
        } else {
            &self
        };
        let (mv, tol, verdict) = (worse.max_violation, worse.tolerance, worse.verdict);
        Self {
            pass: self.pass && other.pass,
            max_violation: mv,
            tolerance: tol,
            verdict,
            ..self
        }
    }

    /// Summary object `{name, pass, tolerance, max_violation, series_file}`.
    pub fn summary(&self, series_file: Option<&str>) -> serde_json::Value {
        serde_json::json!({
            "name": self.name,
            "pass": self.pass,
            "tolerance": self.tolerance,
            "max_violation": self.max_violation,
            "series_file": series_file,
        })
    }

    /// Per-sample series as CSV `t,lhs,rhs`.
    pub fn series_csv(&self) -> String {
        let mut s = String::from("t,lhs,rhs\n");
        for ((t, l), r) in self.times.iter().zip(&self.lhs).zip(&self.rhs) {
            s.push_str(&format!("{t:.16e},{l:.16e},{r:.16e}\n"));
        }
        s
    }
}

fn tolerances(traj: &Trajectory) -> Tolerances {
    traj.config.as_ref().map(|c| c.tolerances.clone()).unwrap_or_default()
}

fn need(traj: &Trajectory, needed: usize) -> Result<()> {
    if traj.len() < needed {
        return Err(Error::TooFewSamples {
            needed,
            found: traj.len(),
        });
    }
    Ok(())
}

/// `|v(t)|^2 + 2 int_0^t D^2 <= |v0|^2`, plus monotonicity of `|v(t)|`.
///
/// The slack is `max(tol_energy |v0|^2, (2 lambda h)^4 lambda |v0|^2 T)` with
/// `lambda = D0^2 / |v0|^2` and `h` the sample spacing: the quadrature error
/// of a fourth-order rule on a mode decaying like `exp(-2 lambda t)`.
pub fn energy_check(traj: &Trajectory) -> Result<InequalityReport> {
    need(traj, 2)?;
    let tol = tolerances(traj);
    let t = traj.times();
    let e: Vec<f64> = traj.series(|n| n.l2 * n.l2);
    let d2: Vec<f64> = traj.series(|n| n.dirichlet * n.dirichlet);
    let dissipated = cumulative(&t, &d2);
    let e0 = e[0];
    let lambda = if e0 > 0.0 { d2[0] / e0 } else { 0.0 };
    let horizon = t[t.len() - 1] - t[0];
    let tolerance = (tol.energy_rel * e0).max((2.0 * lambda * traj.spacing()).powi(4) * lambda * e0 * horizon);
    let lhs: Vec<f64> = e.iter().zip(&dissipated).map(|(a, b)| a + 2.0 * b).collect();
    let rhs = vec![e0; t.len()];
    let relation = InequalityReport::from_series("energy", t.clone(), lhs, rhs, tolerance);

    let mono_lhs: Vec<f64> = e[1..].to_vec();
    let mono_rhs: Vec<f64> = e[..e.len() - 1].to_vec();
    let monotone = InequalityReport::from_series("energy_monotone", t[1..].to_vec(), mono_lhs, mono_rhs, tolerance);
    Ok(relation.and(monotone))
}

/// Majorant of `int_0^T L^alpha` obtained from the Dirichlet inequality.
///
/// With `X = arctan(D0^2) + c int D^2`, `int L^2 (1 + D^2)^-2 <= 2X`, and
/// Hölder gives `int L^alpha <= (2X)^(alpha/2) (int (1+D^2)^(2 alpha/(2-alpha)))^((2-alpha)/2)`.
/// For `alpha = 2/3` this is the arctan form
/// `(1/2)(int L^(2/3))^3 <= (T + int D^2)^2 X`.
pub fn ds_bound_check(traj: &Trajectory, alpha: f64, c: f64) -> Result<InequalityReport> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(invalid("alpha", format!("must lie in (0, 2], got {alpha}")));
    }
    if !(c > 0.0) {
        return Err(invalid("c", format!("must be positive, got {c}")));
    }
    need(traj, 1)?;
    let t = traj.times();
    let t0 = t[0];
    let d2 = traj.series(|n| n.dirichlet * n.dirichlet);
    let la = traj.series(|n| n.laplacian_l2.powf(alpha));
    let int_la = cumulative(&t, &la);
    let final_lhs = int_la.last().copied().unwrap_or(0.0);
    let int_d2 = cumulative(&t, &d2);
    let x: Vec<f64> = int_d2.iter().map(|i| d2[0].atan() + c * i).collect();
    let arctan_form = (alpha - 2.0 / 3.0).abs() < 1e-12;

    let (lhs, rhs): (Vec<f64>, Vec<f64>) = if arctan_form {
        let lhs = int_la.iter().map(|i| 0.5 * i.powi(3)).collect();
        let rhs = t
            .iter()
            .zip(&int_d2)
            .zip(&x)
            .map(|((tj, i), xj)| (tj - t0 + i).powi(2) * xj)
            .collect();
        (lhs, rhs)
    } else if alpha == 2.0 {
        let mut peak = 0.0f64;
        let rhs = d2
            .iter()
            .zip(&x)
            .map(|(d, xj)| {
                peak = peak.max((1.0 + d).powi(2));
                peak * 2.0 * xj
            })
            .collect();
        (int_la, rhs)
    } else {
        let q = 2.0 * alpha / (2.0 - alpha);
        let weight: Vec<f64> = d2.iter().map(|d| (1.0 + d).powf(q)).collect();
        let int_w = cumulative(&t, &weight);
        let rhs = x
            .iter()
            .zip(&int_w)
            .map(|(xj, w)| (2.0 * xj).powf(alpha / 2.0) * w.powf((2.0 - alpha) / 2.0))
            .collect();
        (int_la, rhs)
    };
    let scale = rhs.iter().chain(&lhs).fold(0.0f64, |m, v| m.max(v.abs()));
    let tolerance = tolerances(traj).energy_rel * scale;
    let name = if arctan_form { "ds_arctan" } else { "ds_holder" };

    Ok(InequalityReport::from_series(name, t, lhs, rhs, tolerance)
        .with_note(format!("int L^{alpha} = {final_lhs:.16e}")))
}

/// `d/dt D^2 + L^2 + |v_t|^2 <= S^2 D^2` at interior samples, with `d/dt D^2`
/// from centered differences. Slack `max(floor, C h^2 max|(D^2)'''|)`.
pub fn ddn_residual(traj: &Trajectory) -> Result<InequalityReport> {
    need(traj, 3)?;
    let tol = tolerances(traj);
    let t = traj.times();
    let d2 = traj.series(|n| n.dirichlet * n.dirichlet);
    let rate = centered_derivative(&t, &d2);
    let mut times = Vec::new();
    let (mut lhs, mut rhs) = (Vec::new(), Vec::new());
    let mut magnitude = 0.0f64;
    for (j, s) in traj.samples.iter().enumerate() {
        let Some(r) = rate[j] else { continue };
        let n = &s.norms;
        let vt = n.vt_l2.ok_or(Error::MissingFields)?;
        let l = r + n.laplacian_l2.powi(2) + vt * vt;
        let g = n.sup_upper().powi(2) * d2[j];
        magnitude = magnitude.max(r.abs()).max(n.laplacian_l2.powi(2)).max(vt * vt).max(g);
        times.push(t[j]);
        lhs.push(l);
        rhs.push(g);
    }
    let h = traj.spacing();
    let tolerance = (tol.ddn_floor_rel * magnitude).max(tol.ddn_c * h * h * third_derivative_bound(&t, &d2));
    Ok(InequalityReport::from_series("ddn", times, lhs, rhs, tolerance))
}

/// The Dirichlet-inequality residual `d/dt D^2 + L^2 + |v_t|^2 - S^2 D^2` at a
/// single sample, with the exact rate taken from the equation.
pub fn ddn_pointwise(sample: &Sample) -> Option<f64> {
    let n = &sample.norms;
    let rate = sample.dirichlet_rate?;
    let vt = n.vt_l2?;
    Some(rate + n.laplacian_l2.powi(2) + vt * vt - n.sup_upper().powi(2) * n.dirichlet.powi(2))
}

/// `sup |g| / (L^(1/2) D^(1/2))` with the grid sup, `None` for degenerate fields.
pub fn agmon_ratio(norms: &NormBundle) -> Option<f64> {
    let denom = (norms.laplacian_l2 * norms.dirichlet).sqrt();
    if denom > 0.0 && denom.is_finite() {
        Some(norms.sup / denom)
    } else {
        None
    }
}

/// `sup |v| <= c L^(1/2) D^(1/2)` at every sample.
pub fn agmon_check(traj: &Trajectory, c: f64) -> Result<InequalityReport> {
    need(traj, 1)?;
    let lhs = traj.series(|n| n.sup);
    let rhs = traj.series(|n| c * (n.laplacian_l2 * n.dirichlet).sqrt());
    let scale = lhs.iter().fold(0.0f64, |m, v| m.max(*v));
    Ok(InequalityReport::from_series("agmon", traj.times(), lhs, rhs, 1e-12 * scale))
}

/// Largest Agmon ratio over `trials` random divergence-free fields at
/// resolution `n`. Half of the trials use random phases, half are
/// phase-coherent (all modes in phase at the origin), which concentrates the
/// field and pushes the ratio up.
pub fn estimate_agmon_constant(n: usize, trials: usize, seed: u64) -> Result<f64> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let mut used = 0usize;
    for trial in 0..trials {
        let slope: f64 = rng.random_range(0.5..4.0);
        let f = random_field(n, slope, trial % 2 == 1, &mut rng)?;
        if let Some(r) = agmon_ratio(&f.norms(0.0, None)) {
            best = best.max(r);
            used += 1;
        }
    }
    if used == 0 {
        return Err(invalid("trials", "every sampled field was degenerate"));
    }
    log::debug!("agmon estimate {best} from {used} fields at N = {n}");
    Ok(best)
}

/// Largest Agmon ratio over a set of fields (degenerate ones skipped).
pub fn agmon_max<'a>(fields: impl IntoIterator<Item = &'a SpectralField>) -> Option<f64> {
    fields
        .into_iter()
        .filter_map(|f| agmon_ratio(&f.norms(0.0, None)))
        .reduce(f64::max)
}

fn random_field(n: usize, slope: f64, coherent: bool, rng: &mut ChaCha8Rng) -> Result<SpectralField> {
    let mut f = FourierField::zeros(n)?;
    let e: [f64; 3] = {
        let v: [f64; 3] = [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
        let s = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        v.map(|x| x / s)
    };
    for i in 0..n * n * n {
        let k = f.mode_of(i);
        let ns = norm_sq(k);
        if ns == 0 {
            continue;
        }
        let amp = (ns as f64).powf(-slope / 2.0) * rng.random_range(0.5..1.5);
        let v = if coherent {
            e.map(|x| Complex64::new(amp * x, 0.0))
        } else {
            [(); 3].map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)) * amp)
        };
        f.put(i, v);
    }
    project_in_place(&mut f);
    f.symmetrize();
    Ok(SpectralField::from_raw(f))
}

/// Constants derived from the calibrated Agmon constant `c_a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    /// `c_a = c_hat (1 + margin)`.
    pub agmon: f64,
    /// Constant of the arctan form: `c_a^4 / 2`.
    pub ds: f64,
    /// Constant of the global Riccati bound: `c_a^4 / 8`.
    pub riccati: f64,
    /// Constant of the local existence interval: `2 / c_a^4`.
    pub local: f64,
}

impl DerivedConstants {
    pub fn from_agmon(agmon: f64) -> Self {
        let a4 = agmon.powi(4);
        Self {
            agmon,
            ds: a4 / 2.0,
            riccati: a4 / 8.0,
            local: 2.0 / a4,
        }
    }

    pub fn calibrated(c_hat: f64, margin: f64) -> Self {
        Self::from_agmon(c_hat * (1.0 + margin))
    }
}

/// Time window of a weak-form test function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    /// `sin^2(pi (t - t0) / (t1 - t0))` on `[t0, t1]`, zero elsewhere.
    Bump { t0: f64, t1: f64 },
    /// `cos^2(pi t / (2 t1))` on `[0, t1]`, zero after; `psi(0) = 1`.
    RampDown { t1: f64 },
}

impl Window {
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Window::Bump { t0, t1 } => (t0, t1),
            Window::RampDown { t1 } => (0.0, t1),
        }
    }

    /// `(psi(t), psi'(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let (a, b) = self.support();
        if t < a || t > b {
            return (0.0, 0.0);
        }
        match *self {
            Window::Bump { t0, t1 } => {
                let w = std::f64::consts::PI / (t1 - t0);
                let x = w * (t - t0);
                (x.sin().powi(2), w * (2.0 * x).sin())
            }
            Window::RampDown { t1 } => {
                let w = std::f64::consts::PI / (2.0 * t1);
                let x = w * t;
                (x.cos().powi(2), -w * (2.0 * x).sin())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Cos,
    Sin,
}

/// Test function `psi(t) a_k(x)` with `a_k = p cos(k.x)` or `p sin(k.x)`, `p . k = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTest {
    pub mode: Mode,
    pub phase: Phase,
    pub polarization: [f64; 3],
    pub window: Window,
}

impl WeakTest {
    /// Divergence-free test with a polarization built from `hint`.
    pub fn new(mode: Mode, phase: Phase, hint: [f64; 3], window: Window) -> Result<Self> {
        let k = mode.map(|c| c as f64);
        let kk: f64 = k.iter().map(|x| x * x).sum();
        if kk == 0.0 {
            return Err(invalid("mode", "test mode must be nonzero"));
        }
        let dot: f64 = (0..3).map(|i| k[i] * hint[i]).sum();
        let p: [f64; 3] = std::array::from_fn(|i| hint[i] - dot / kk * k[i]);
        let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(invalid("polarization", "parallel to the test mode"));
        }
        Ok(Self {
            mode,
            phase,
            polarization: p.map(|x| x / norm),
            window,
        })
    }

    /// `(f, a_k)` in `L^2` of the torus.
    fn pair(&self, f: &FourierField) -> f64 {
        let c = f.get(self.mode);
        let dot: Complex64 = (0..3).map(|i| c[i] * self.polarization[i]).sum();
        match self.phase {
            Phase::Cos => VOLUME * dot.re,
            Phase::Sin => -VOLUME * dot.im,
        }
    }
}

/// Random divergence-free test functions with modes in `|k_i| <= kmax`, each
/// paired with a bump window inside `[0, horizon]` whose endpoints lie on the
/// grid `spacing * j`.
pub fn random_weak_tests(count: usize, kmax: i64, horizon: f64, spacing: f64, seed: u64) -> Result<Vec<WeakTest>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (horizon / spacing).round() as i64;
    if cells < 4 || kmax < 1 {
        return Err(invalid("horizon", "too short for weak-form tests"));
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let mode: Mode = [(); 3].map(|_| rng.random_range(-kmax..=kmax));
        if mode == [0, 0, 0] {
            continue;
        }
        let phase = if rng.random_bool(0.5) { Phase::Cos } else { Phase::Sin };
        let hint: [f64; 3] = [(); 3].map(|_| rng.sample(StandardNormal));
        let a = rng.random_range(0..cells / 2);
        let b = rng.random_range(a + cells / 4..=cells);
        let window = if rng.random_bool(0.3) {
            Window::RampDown { t1: b as f64 * spacing }
        } else {
            Window::Bump {
                t0: a as f64 * spacing,
                t1: b as f64 * spacing,
            }
        };
        if let Ok(t) = WeakTest::new(mode, phase, hint, window) {
            out.push(t);
        }
    }
    Ok(out)
}

/// Residual of the integral identity
/// `int_s^t [(v, phi_t) - (grad v, grad phi) + (v . grad phi, v)] + (v(s), phi(s)) = (v(t), phi(t))`
/// for each test function, relative to the sum of the magnitudes of its
/// terms. The convective term uses the advecting field of the trajectory's
/// scheme. Reported as `lhs = relative residual <= rhs = 0` with tolerance
/// `tol_weak`.
pub fn weak_form_residual(traj: &Trajectory, tests: &[WeakTest]) -> Result<InequalityReport> {
    need(traj, 2)?;
    let scheme = traj.scheme();
    let fields: Vec<&SpectralField> = traj
        .samples
        .iter()
        .map(|s| s.field.as_ref().ok_or(Error::MissingFields))
        .collect::<Result<_>>()?;
    let n = fields[0].resolution();
    for t in tests {
        let fits = t.mode.iter().all(|c| (c.unsigned_abs() as usize) < n / 2);
        let inside = match scheme {
            Some(Scheme::Galerkin { cutoff }) => norm_sq(t.mode) as f64 <= cutoff * cutoff,
            _ => true,
        };
        if !fits || !inside {
            return Err(Error::ModeOutOfRange {
                mode: t.mode,
                resolution: n,
            });
        }
    }
    let times = traj.times();
    let (s_end, t_end) = (times[0], times[times.len() - 1]);
    let needed: Vec<bool> = times
        .iter()
        .map(|&tau| tests.iter().any(|w| {
            let (a, b) = w.window.support();
            tau >= a - 1e-12 && tau <= b + 1e-12
        }))
        .collect();
    let system = scheme.map(|s| System::new(n, s)).transpose()?;
    let mut convective = Vec::with_capacity(fields.len());
    for (f, need) in fields.iter().zip(&needed) {
        if !*need {
            convective.push(None);
            continue;
        }
        let b = match &system {
            Some(sys) => sys.nonlinear(f)?,
            None => {
                let mut b = crate::nonlinear::nonlinear_term(f, f)?;
                b.raw_mut().scale(-1.0);
                b
            }
        };
        convective.push(Some(b));
    }

    let mut lhs = Vec::with_capacity(tests.len());
    for test in tests {
        let (a, b) = test.window.support();
        let idx: Vec<usize> = (0..times.len())
            .filter(|&j| times[j] >= a - 1e-12 && times[j] <= b + 1e-12)
            .collect();
        let kk = norm_sq(test.mode) as f64;
        let mut terms = [Vec::new(), Vec::new(), Vec::new()];
        let mut ts = Vec::new();
        for &j in &idx {
            let (psi, dpsi) = test.window.eval(times[j]);
            let g = test.pair(fields[j]);
            // nonlinear() returns -P[(a . grad) v], so (v . grad phi, v) = psi (B, a_k)
            let nl = convective[j].as_ref().map_or(0.0, |b| test.pair(b));
            ts.push(times[j]);
            terms[0].push(dpsi * g);
            terms[1].push(-psi * kk * g);
            terms[2].push(psi * nl);
        }
        let ints: Vec<f64> = if ts.len() >= 2 {
            terms.iter().map(|f| integrate(&ts, f)).collect()
        } else {
            vec![0.0; 3]
        };
        let start = test.window.eval(s_end).0 * test.pair(fields[0]);
        let end = test.window.eval(t_end).0 * test.pair(fields[fields.len() - 1]);
        let residual = ints.iter().sum::<f64>() + start - end;
        let abs_ints: Vec<f64> = terms
            .iter()
            .map(|f| if ts.len() >= 2 { integrate(&ts, &f.iter().map(|x| x.abs()).collect::<Vec<_>>()) } else { 0.0 })
            .collect();
        let scale = abs_ints.iter().sum::<f64>() + start.abs() + end.abs();
        lhs.push(if scale > 0.0 { residual.abs() / scale } else { 0.0 });
    }
    let rhs = vec![0.0; tests.len()];
    let index: Vec<f64> = (0..tests.len()).map(|i| i as f64).collect();
    Ok(InequalityReport::from_series("weak_form", index, lhs, rhs, tolerances(traj).weak_rel))
}
