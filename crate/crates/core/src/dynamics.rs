//! Semi-discrete Galerkin and mollified Navier-Stokes systems (unit
//! viscosity) and their time integration.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{
    make_field, mollify, norm_sq, project_in_place, Datum, FourierField, MollifierSymbol,
    NormBundle, SpectralField, VOLUME,
};
use crate::nonlinear::Convection;

/// Which approximating system to integrate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    /// Spectral Galerkin truncation to the ball `|k| <= cutoff`.
    Galerkin { cutoff: f64 },
    /// Full-band system whose advecting velocity is mollified with index `m`.
    Mollified {
        m: f64,
        #[serde(default)]
        symbol: MollifierSymbol,
    },
}

impl Scheme {
    pub fn galerkin(cutoff: f64) -> Self {
        Scheme::Galerkin { cutoff }
    }

    pub fn mollified(m: f64) -> Self {
        Scheme::Mollified {
            m,
            symbol: MollifierSymbol::Gaussian,
        }
    }

    /// Short tag such as `galerkin:10` or `mollified:4:gaussian`.
    pub fn tag(&self) -> String {
        match self {
            Scheme::Galerkin { cutoff } => format!("galerkin:{cutoff}"),
            Scheme::Mollified { m, symbol } => format!("mollified:{m}:{}", symbol.name()),
        }
    }

    pub fn parse_tag(tag: &str) -> Result<Self> {
        let parts: Vec<&str> = tag.split(':').collect();
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad scheme tag `{tag}`")))
        };
        match parts.as_slice() {
            ["galerkin", k] => Ok(Scheme::galerkin(num(k)?)),
            ["mollified", m] => Ok(Scheme::mollified(num(m)?)),
            ["mollified", m, s] => Ok(Scheme::Mollified {
                m: num(m)?,
                symbol: MollifierSymbol::parse(s)
                    .ok_or_else(|| Error::Parse(format!("unknown mollifier `{s}`")))?,
            }),
            _ => Err(Error::Parse(format!("bad scheme tag `{tag}`"))),
        }
    }

    /// Same scheme at a different level (cutoff or mollification index).
    pub fn with_level(&self, level: f64) -> Self {
        match *self {
            Scheme::Galerkin { .. } => Scheme::Galerkin { cutoff: level },
            Scheme::Mollified { symbol, .. } => Scheme::Mollified { m: level, symbol },
        }
    }

    pub fn level(&self) -> f64 {
        match *self {
            Scheme::Galerkin { cutoff } => cutoff,
            Scheme::Mollified { m, .. } => m,
        }
    }
}

/// Cutoff radius whose ball holds at least `count` real Stokes
/// eigenfunctions (two per wavevector), taken in eigenvalue order.
pub fn cutoff_for_mode_count(count: usize) -> f64 {
    if count == 0 {
        return 0.0;
    }
    let mut held = 0usize;
    let mut shell = 0i64;
    loop {
        shell += 1;
        let r = (shell as f64).sqrt().ceil() as i64;
        let mut in_shell = 0usize;
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    if norm_sq([a, b, c]) == shell {
                        in_shell += 1;
                    }
                }
            }
        }
        held += 2 * in_shell;
        if held >= count {
            return (shell as f64).sqrt();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Energy-relation slack, relative to `|v0|^2`.
    pub energy_rel: f64,
    /// Round-off floor of the DDN residual, relative to its largest term.
    pub ddn_floor_rel: f64,
    /// Constant in `C dt^2 max|d^3/dt^3 |grad v|^2|`.
    pub ddn_c: f64,
    /// Weak-form residual, relative to the magnitude of its terms.
    pub weak_rel: f64,
    /// Cross-level convergence threshold, relative to `|grad v0|`.
    pub conv_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            energy_rel: 1e-6,
            ddn_floor_rel: 1e-9,
            ddn_c: 1.0,
            weak_rel: 1e-6,
            conv_rel: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n: usize,
    pub scheme: Scheme,
    pub dt: f64,
    pub horizon: f64,
    pub datum: Datum,
    pub sample_every: usize,
    pub eta: f64,
    /// Calibrated Agmon constant, when known.
    pub agmon_c: Option<f64>,
    pub tolerances: Tolerances,
    /// Trajectories whose sup-norm bound exceeds this are truncated.
    pub guard: f64,
    /// Keep the velocity field of every sample.
    pub keep_fields: bool,
    /// Times at which full-resolution snapshots are kept.
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn new(n: usize, scheme: Scheme, datum: Datum, dt: f64, horizon: f64) -> Self {
        Self {
            n,
            scheme,
            dt,
            horizon,
            datum,
            sample_every: 1,
            eta: 1.0,
            agmon_c: None,
            tolerances: Tolerances::default(),
            guard: 1e8,
            keep_fields: false,
            snapshot_times: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidResolution(self.n));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(invalid("T", format!("must be positive, got {}", self.horizon)));
        }
        if self.sample_every == 0 {
            return Err(invalid("sample_every", "must be at least 1"));
        }
        if !(self.eta > 0.0) {
            return Err(invalid("eta", format!("must be positive, got {}", self.eta)));
        }
        if !(self.guard > 0.0) {
            return Err(invalid("guard", "must be positive"));
        }
        match self.scheme {
            Scheme::Galerkin { cutoff } => {
                if !(cutoff >= 1.0) {
                    return Err(invalid("cutoff", format!("must be >= 1, got {cutoff}")));
                }
                if 3.0 * cutoff > self.n as f64 {
                    return Err(invalid(
                        "cutoff",
                        format!("must be <= N/3 = {}, got {cutoff}", self.n as f64 / 3.0),
                    ));
                }
            }
            Scheme::Mollified { m, .. } => {
                if !(m >= 1.0) {
                    return Err(invalid("m", format!("must be >= 1, got {m}")));
                }
            }
        }
        Ok(())
    }

    /// Number of steps and the uniform step actually used (`<= dt`).
    pub fn time_grid(&self) -> (usize, f64) {
        let steps = ((self.horizon / self.dt) - 1e-9).ceil().max(1.0) as usize;
        (steps, self.horizon / steps as f64)
    }
}

/// Right-hand side of one semi-discrete system at a fixed resolution.
#[derive(Debug)]
pub struct System {
    scheme: Scheme,
    n: usize,
    convection: Convection,
}

impl System {
    pub fn new(n: usize, scheme: Scheme) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidResolution(n));
        }
        let convection = match scheme {
            Scheme::Galerkin { cutoff } => {
                if !(cutoff > 0.0) {
                    return Err(invalid("cutoff", "must be positive"));
                }
                Convection::spherical(n, cutoff)
            }
            Scheme::Mollified { m, .. } => {
                if !(m >= 1.0) {
                    return Err(invalid("m", format!("mollification index must be >= 1, got {m}")));
                }
                Convection::full(n)
            }
        };
        Ok(Self {
            scheme,
            n,
            convection,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Initial condition of the system: Galerkin projection of the datum, or
    /// the datum itself.
    pub fn initial_state(&self, v0: &SpectralField) -> SpectralField {
        match self.scheme {
            Scheme::Galerkin { cutoff } => v0.truncate_sphere(cutoff),
            Scheme::Mollified { .. } => v0.clone(),
        }
    }

    fn check_support(&self, v: &SpectralField) -> Result<()> {
        if v.resolution() != self.n {
            return Err(Error::ResolutionMismatch(v.resolution(), self.n));
        }
        if let Scheme::Galerkin { cutoff } = self.scheme {
            let r2 = cutoff * cutoff;
            for (i, k) in v.modes() {
                let ns = norm_sq(k);
                if ns as f64 > r2 && v.at(i).iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
                    return Err(Error::OutsideCutoff {
                        mode: k,
                        norm_sq: ns,
                        cutoff_sq: r2,
                    });
                }
            }
        }
        Ok(())
    }

    /// The explicit part `-P[(a . grad) v]`, `a = v` or `a = J_m v`.
    pub fn nonlinear(&self, v: &SpectralField) -> Result<SpectralField> {
        let mut out = match self.scheme {
            Scheme::Galerkin { .. } => self.convection.apply(v, v)?,
            Scheme::Mollified { m, symbol } => {
                let a = mollify(v, m, symbol)?;
                self.convection.apply(&a, v)?
            }
        };
        out.raw_mut().scale(-1.0);
        Ok(out)
    }

    /// `v_t = Delta v - P[(a . grad) v]`.
    pub fn rhs(&self, v: &SpectralField) -> Result<SpectralField> {
        self.check_support(v)?;
        let nl = self.nonlinear(v)?;
        Ok(add_laplacian(v, nl))
    }
}

fn add_laplacian(v: &SpectralField, mut nl: SpectralField) -> SpectralField {
    let raw = nl.raw_mut();
    for i in 0..v.resolution().pow(3) {
        let w = norm_sq(v.mode_of(i)) as f64;
        if w == 0.0 {
            continue;
        }
        let a = v.at(i);
        let b = raw.at(i);
        raw.put(i, [b[0] - a[0] * w, b[1] - a[1] * w, b[2] - a[2] * w]);
    }
    nl
}

/// Right-hand side of the Galerkin system with spherical cutoff.
pub fn galerkin_rhs(u: &SpectralField, cutoff: f64) -> Result<SpectralField> {
    System::new(u.resolution(), Scheme::galerkin(cutoff))?.rhs(u)
}

/// Right-hand side of the mollified system with the Gaussian symbol.
pub fn mollified_rhs(v: &SpectralField, m: f64) -> Result<SpectralField> {
    System::new(v.resolution(), Scheme::mollified(m))?.rhs(v)
}

/// `d/dt |grad v|^2 = 2 (grad v, grad v_t)`.
pub fn dirichlet_rate(v: &SpectralField, vt: &SpectralField) -> f64 {
    let mut acc = 0.0;
    for i in 0..v.resolution().pow(3) {
        let w = norm_sq(v.mode_of(i)) as f64;
        if w == 0.0 {
            continue;
        }
        let (a, b) = (v.at(i), vt.at(i));
        for c in 0..3 {
            acc += w * (a[c].re * b[c].re + a[c].im * b[c].im);
        }
    }
    2.0 * VOLUME * acc
}

/// Integrating-factor classical Runge-Kutta stepper: the viscous factor
/// `exp(-|k|^2 dt)` is applied exactly, the nonlinearity explicitly.
#[derive(Debug)]
pub struct Stepper {
    system: System,
    dt: f64,
    full: Vec<f64>,
    half: Vec<f64>,
}

impl Stepper {
    pub fn new(system: System, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid("dt", format!("must be positive, got {dt}")));
        }
        let n = system.n;
        let probe = FourierField::zeros(n)?;
        let (mut full, mut half) = (Vec::with_capacity(n * n * n), Vec::with_capacity(n * n * n));
        for i in 0..n * n * n {
            let w = norm_sq(probe.mode_of(i)) as f64;
            full.push((-w * dt).exp());
            half.push((-w * dt * 0.5).exp());
        }
        Ok(Self {
            system,
            dt,
            full,
            half,
        })
    }

    pub fn system(&self) -> &System {
        &self.system
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, v: &SpectralField, t: f64) -> Result<SpectralField> {
        self.system.check_support(v)?;
        let nv = self.system.nonlinear(v)?;
        self.step_from(v, &nv, t)
    }

    /// Advance one step given the nonlinear term `nv` at the current state.
    pub fn step_from(&self, v: &SpectralField, a: &SpectralField, t: f64) -> Result<SpectralField> {
        let dt = self.dt;
        let len = self.full.len();
        let combine = |f: &dyn Fn(usize, usize) -> Complex64| -> SpectralField {
            let data = [0, 1, 2].map(|c| (0..len).map(|i| f(c, i)).collect::<Vec<_>>());
            SpectralField::from_raw(FourierField::from_components(v.resolution(), data))
        };
        let (e, e2) = (&self.full, &self.half);
        let vc = |c: usize, i: usize| v.component(c)[i];

        let x2 = combine(&|c, i| e2[i] * (vc(c, i) + a.component(c)[i] * (0.5 * dt)));
        let b = self.system.nonlinear(&x2)?;
        let x3 = combine(&|c, i| e2[i] * vc(c, i) + b.component(c)[i] * (0.5 * dt));
        let cc = self.system.nonlinear(&x3)?;
        let x4 = combine(&|c, i| e[i] * vc(c, i) + cc.component(c)[i] * (dt * e2[i]));
        let d = self.system.nonlinear(&x4)?;
        let mut next = combine(&|c, i| {
            e[i] * vc(c, i)
                + (a.component(c)[i] * e[i]
                    + (b.component(c)[i] + cc.component(c)[i]) * (2.0 * e2[i])
                    + d.component(c)[i])
                    * (dt / 6.0)
        });
        let raw = next.raw_mut();
        project_in_place(raw);
        raw.symmetrize();
        let finite = (0..3).all(|c| raw.component(c).iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        if !finite {
            return Err(Error::NonFinite { time: t + dt });
        }
        Ok(next)
    }
}

/// One integrating-factor RK4 step of the given system.
pub fn step(state: &SpectralField, t: f64, dt: f64, scheme: Scheme) -> Result<SpectralField> {
    Stepper::new(System::new(state.resolution(), scheme)?, dt)?.step(state, t)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub norms: NormBundle,
    /// `d/dt |grad v|^2` from the equation, when known.
    pub dirichlet_rate: Option<f64>,
    pub field: Option<SpectralField>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowUp {
    pub time: f64,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trajectory {
    pub config: Option<SolverConfig>,
    pub samples: Vec<Sample>,
    pub blowup: Option<BlowUp>,
    /// Full-resolution fields at the requested snapshot times.
    pub snapshots: Vec<(f64, SpectralField)>,
}

impl Trajectory {
    /// A trajectory known only through its norms (e.g. read from CSV).
    pub fn from_norms(norms: Vec<NormBundle>) -> Self {
        Self {
            samples: norms
                .into_iter()
                .map(|norms| Sample {
                    norms,
                    dirichlet_rate: None,
                    field: None,
                })
                .collect(),
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.norms.t).collect()
    }

    pub fn series(&self, f: impl Fn(&NormBundle) -> f64) -> Vec<f64> {
        self.samples.iter().map(|s| f(&s.norms)).collect()
    }

    pub fn end_time(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.norms.t)
    }

    pub fn scheme(&self) -> Option<Scheme> {
        self.config.as_ref().map(|c| c.scheme)
    }

    /// Sample spacing (largest gap).
    pub fn spacing(&self) -> f64 {
        self.times().windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

/// Integrate `config` to its horizon, recording a sample every
/// `sample_every` steps and at the final time.
pub fn run(config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    let system = System::new(config.n, config.scheme)?;
    let datum = make_field(&config.datum, config.n)?;
    let mut v = system.initial_state(&datum);
    let (steps, dt) = config.time_grid();
    let stepper = Stepper::new(system, dt)?;
    let store_n = match config.scheme {
        Scheme::Galerkin { cutoff } => (2 * cutoff.floor() as usize + 2).max(4).min(config.n),
        Scheme::Mollified { .. } => config.n,
    };

    let mut traj = Trajectory {
        config: Some(config.clone()),
        ..Trajectory::default()
    };
    let mut pending_snapshots: Vec<f64> = config.snapshot_times.clone();
    pending_snapshots.sort_by(f64::total_cmp);
    pending_snapshots.reverse();

    for s in 0..=steps {
        let t = s as f64 * dt;
        while let Some(&ts) = pending_snapshots.last() {
            if ts <= t + 0.5 * dt {
                if ts >= t - 0.5 * dt {
                    traj.snapshots.push((t, v.clone()));
                }
                pending_snapshots.pop();
            } else {
                break;
            }
        }
        let sample_here = s % config.sample_every == 0 || s == steps;
        let mut nv = None;
        if sample_here {
            let n_term = stepper.system().nonlinear(&v)?;
            let vt = add_laplacian(&v, n_term.clone());
            let norms = v.norms(t, Some(&vt));
            traj.samples.push(Sample {
                norms,
                dirichlet_rate: Some(dirichlet_rate(&v, &vt)),
                field: if config.keep_fields {
                    Some(v.resample(store_n)?)
                } else {
                    None
                },
            });
            nv = Some(n_term);
        }
        if s == steps {
            break;
        }
        let next = match nv {
            Some(a) => stepper.step_from(&v, &a, t),
            None => stepper.step(&v, t),
        };
        match next {
            Ok(w) => {
                let bound = w.l1_coefficients();
                if bound > config.guard {
                    traj.blowup = Some(BlowUp {
                        time: t + dt,
                        reason: format!("sup-norm bound {bound:.3e} exceeds guard {:.3e}", config.guard),
                    });
                    break;
                }
                v = w;
            }
            Err(Error::NonFinite { time }) => {
                traj.blowup = Some(BlowUp {
                    time,
                    reason: "non-finite coefficients".into(),
                });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(b) = &traj.blowup {
        log::warn!("trajectory truncated at t = {}: {}", b.time, b.reason);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn kolmogorov(n: usize) -> SpectralField {
        make_field(&Datum::Kolmogorov { amplitude: 1.0 }, n).unwrap()
    }

    #[test]
    fn rhs_examples() {
        let z = SpectralField::zeros(8).unwrap();
        assert_eq!(galerkin_rhs(&z, 2.0).unwrap().l2(), 0.0);
        assert_eq!(mollified_rhs(&z, 3.0).unwrap().l2(), 0.0);
        let k = kolmogorov(8);
        for r in [galerkin_rhs(&k, 1.0).unwrap(), mollified_rhs(&k, 1.0).unwrap(), mollified_rhs(&k, 7.0).unwrap()] {
            let mut sum = r.into_fourier();
            sum.axpy(1.0, &k);
            assert!(sum.l2() < 1e-14);
        }
        assert!(mollified_rhs(&k, 0.0).is_err());
    }

    #[test]
    fn galerkin_rejects_outside_support() {
        let tg = make_field(&Datum::TaylorGreen { amplitude: 1.0 }, 8).unwrap();
        assert!(matches!(galerkin_rhs(&tg, 1.0), Err(Error::OutsideCutoff { .. })));
        assert!(galerkin_rhs(&tg, 2.0).is_ok());
    }

    #[test]
    fn kolmogorov_step_is_exact_heat_flow() {
        let k = kolmogorov(8);
        for scheme in [Scheme::galerkin(2.0), Scheme::mollified(4.0)] {
            let next = step(&k, 0.0, 1e-3, scheme).unwrap();
            let expect = (-1e-3f64).exp();
            for (i, _) in k.modes() {
                for c in 0..3 {
                    let (a, b) = (next.at(i)[c], k.at(i)[c] * expect);
                    assert!((a - b).norm() <= 1e-12 * 0.5);
                }
            }
        }
        let z = SpectralField::zeros(8).unwrap();
        assert_eq!(step(&z, 0.0, 0.1, Scheme::mollified(2.0)).unwrap().l2(), 0.0);
        assert!(step(&z, 0.0, 0.0, Scheme::mollified(2.0)).is_err());
    }

    #[test]
    fn mode_count_cutoffs() {
        // |k|^2 = 1 holds 6 wavevectors, 12 real eigenfunctions
        assert_eq!(cutoff_for_mode_count(1), 1.0);
        assert_eq!(cutoff_for_mode_count(12), 1.0);
        assert_eq!(cutoff_for_mode_count(13), 2f64.sqrt());
    }

    #[test]
    fn config_validation_names_keys() {
        let mut c = SolverConfig::new(16, Scheme::galerkin(5.0), Datum::Zero, 0.0, 1.0);
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("`dt`"), "{msg}");
        c.dt = 1e-2;
        c.scheme = Scheme::galerkin(6.0);
        assert!(c.validate().unwrap_err().to_string().contains("cutoff"));
        c.scheme = Scheme::galerkin(5.0);
        assert!(c.validate().is_ok());
        assert_eq!(c.time_grid(), (100, 0.01));
    }

    #[test]
    fn zero_datum_stays_zero() {
        let mut c = SolverConfig::new(8, Scheme::mollified(2.0), Datum::Zero, 0.05, 0.5);
        c.keep_fields = true;
        let traj = run(&c).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.samples.iter().all(|s| s.norms.l2 == 0.0 && s.norms.vt_l2 == Some(0.0)));
    }

    #[test]
    fn kolmogorov_decay() {
        let mut c = SolverConfig::new(8, Scheme::galerkin(2.0), Datum::Kolmogorov { amplitude: 1.0 }, 1e-2, 1.0);
        c.sample_every = 10;
        let traj = run(&c).unwrap();
        let last = traj.samples.last().unwrap().norms;
        assert_relative_eq!(last.t, 1.0);
        assert_relative_eq!(last.l2.powi(2), (-2.0f64).exp() * VOLUME / 2.0, max_relative = 1e-12);
        assert_relative_eq!(last.vt_l2.unwrap(), last.l2, max_relative = 1e-12);
        let rate = traj.samples[0].dirichlet_rate.unwrap();
        assert_relative_eq!(rate, -VOLUME, max_relative = 1e-12);
    }

    #[test]
    fn guard_truncates() {
        let mut c = SolverConfig::new(8, Scheme::galerkin(2.0), Datum::TaylorGreen { amplitude: 1e6 }, 1e-3, 1.0);
        c.sample_every = 10;
        let traj = run(&c).unwrap();
        let b = traj.blowup.clone().expect("must blow up");
        assert!(b.time < 1.0);
        assert!(traj.end_time() < b.time);
    }

    #[test]
    fn step_halving_is_fourth_order() {
        let n = 8;
        let scheme = Scheme::galerkin(2.0);
        let v0 = make_field(&Datum::Random { seed: 3, slope: 1.0, amplitude: 5.0 }, n)
            .unwrap()
            .truncate_sphere(2.0);
        let err = |dt: f64| {
            let full = step(&v0, 0.0, dt, scheme).unwrap();
            let h = step(&v0, 0.0, dt / 2.0, scheme).unwrap();
            let hh = step(&h, dt / 2.0, dt / 2.0, scheme).unwrap();
            full.difference(&hh).unwrap().l2()
        };
        let (e1, e2) = (err(0.02), err(0.01));
        // local error O(dt^5)
        let ratio = e1 / e2;
        assert!(ratio > 25.0 && ratio < 40.0, "{ratio}");
    }
}
