//! Regularity epochs: the pigeonhole time `t^m`, the global Riccati bound
//! past `theta`, local existence intervals and the interval cover of
//! `[0, theta]` with its uncovered measure.
//!
//! `y = |grad v|_2^2` throughout.

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{invalid, Error, Result};
use crate::estimates::{DerivedConstants, InequalityReport};
use crate::quadrature::{cumulative, integrate_between};

/// `theta = eta^-2 |v0|^4`.
pub fn theta(v0_l2: f64, eta: f64) -> Result<f64> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(invalid("eta", format!("must be positive, got {eta}")));
    }
    if !(v0_l2 >= 0.0) {
        return Err(invalid("v0_l2", "must be nonnegative"));
    }
    Ok(v0_l2.powi(4) / (eta * eta))
}

/// Earliest sample `t < theta` with `|v0| |grad v(t)| <= eta` (`t = 0` when
/// `theta = 0`).
pub fn find_small_dirichlet_time(traj: &Trajectory, eta: f64) -> Result<f64> {
    let first = traj.samples.first().ok_or(Error::TooFewSamples { needed: 1, found: 0 })?;
    let v0 = first.norms.l2;
    let th = theta(v0, eta)?;
    let t0 = first.norms.t;
    for s in &traj.samples {
        let n = &s.norms;
        let before = n.t < t0 + th || (th == 0.0 && n.t == t0);
        if !before {
            break;
        }
        if v0 * n.dirichlet <= eta {
            return Ok(n.t);
        }
    }
    let end = traj.end_time();
    if end < t0 + th {
        return Err(Error::HorizonTooShort { end, required: t0 + th });
    }
    let t = traj.times();
    let y = traj.series(|n| n.dirichlet * n.dirichlet);
    Err(Error::PigeonholeContradiction {
        theta: th,
        eta,
        dissipation: 2.0 * integrate_between(&t, &y, t0, t0 + th),
        energy: v0 * v0,
    })
}

/// `eta^2 |v0|^-2 (1 - 2 c eta^2)^-1`, or `None` when `2 c eta^2 >= 1`.
pub fn global_bound_value(v0_l2: f64, eta: f64, c: f64) -> Option<f64> {
    let bracket = 1.0 - 2.0 * c * eta * eta;
    if bracket <= 0.0 {
        return None;
    }
    if v0_l2 == 0.0 {
        return Some(f64::INFINITY);
    }
    Some(eta * eta / (v0_l2 * v0_l2 * bracket))
}

/// Global bound `y(t) <= eta^2 |v0|^-2 (1 - 2 c eta^2)^-1` at every sample
/// `t >= from`, together with the intermediate form
/// `y(t) <= y(t_m) (1 - c y(t_m) |v(t_m)|^2)^-1` for `t >= t_m`.
///
/// [`riccati_global_bound`] uses `from = theta`.
pub fn riccati_bound_from(traj: &Trajectory, t_m: f64, eta: f64, c: f64, from: f64) -> Result<InequalityReport> {
    let first = traj.samples.first().ok_or(Error::TooFewSamples { needed: 1, found: 0 })?;
    let v0 = first.norms.l2;
    let Some(value) = global_bound_value(v0, eta, c) else {
        return Ok(InequalityReport::not_applicable(
            "riccati_global",
            format!("2 c eta^2 = {} >= 1", 2.0 * c * eta * eta),
        ));
    };
    let tol = traj.config.as_ref().map(|c| c.tolerances.energy_rel).unwrap_or(1e-6);
    let later: Vec<_> = traj.samples.iter().filter(|s| s.norms.t >= from).collect();
    let y = |s: &&crate::dynamics::Sample| s.norms.dirichlet.powi(2);
    let global = InequalityReport::from_series(
        "riccati_global",
        later.iter().map(|s| s.norms.t).collect(),
        later.iter().map(y).collect(),
        vec![value; later.len()],
        if value.is_finite() { tol * value } else { 0.0 },
    );

    let m = traj
        .samples
        .iter()
        .find(|s| s.norms.t >= t_m)
        .ok_or(Error::HorizonTooShort { end: traj.end_time(), required: t_m })?;
    let (ym, em) = (m.norms.dirichlet.powi(2), m.norms.l2.powi(2));
    let bracket = 1.0 - c * ym * em;
    if bracket <= 0.0 {
        return Ok(global);
    }
    let bound = ym / bracket;
    let after: Vec<_> = traj.samples.iter().filter(|s| s.norms.t >= t_m).collect();
    let intermediate = InequalityReport::from_series(
        "riccati_intermediate",
        after.iter().map(|s| s.norms.t).collect(),
        after.iter().map(y).collect(),
        vec![bound; after.len()],
        tol * bound.max(f64::MIN_POSITIVE),
    );
    Ok(merge_reports("riccati_global", global, intermediate))
}

fn merge_reports(name: &str, a: InequalityReport, b: InequalityReport) -> InequalityReport {
    let mut times = a.times.clone();
    times.extend(&b.times);
    let mut lhs = a.lhs.clone();
    let mut rhs = a.rhs.clone();
    // rescale the second series so one tolerance serves both
    let scale = if b.tolerance > 0.0 && a.tolerance > 0.0 { a.tolerance / b.tolerance } else { 1.0 };
    lhs.extend(b.lhs.iter().map(|v| v * scale));
    rhs.extend(b.rhs.iter().map(|v| v * scale));
    let tol = if a.tolerance > 0.0 { a.tolerance } else { b.tolerance };
    InequalityReport::from_series(name, times, lhs, rhs, tol)
}

pub fn riccati_global_bound(traj: &Trajectory, t_m: f64, eta: f64, c: f64) -> Result<InequalityReport> {
    let v0 = traj.samples.first().map_or(0.0, |s| s.norms.l2);
    let th = theta(v0, eta)?;
    riccati_bound_from(traj, t_m, eta, c, traj.samples.first().map_or(0.0, |s| s.norms.t) + th)
}

/// Guaranteed regularity interval `c (y + 1)^-2`.
pub fn local_interval(grad_l2_sq: f64, c: f64) -> Result<f64> {
    if !(grad_l2_sq >= 0.0) {
        return Err(invalid("grad_l2_sq", format!("must be nonnegative, got {grad_l2_sq}")));
    }
    if !(c > 0.0) {
        return Err(invalid("c", format!("must be positive, got {c}")));
    }
    Ok(c / (grad_l2_sq + 1.0).powi(2))
}

/// Local Riccati majorant `y_t (1 - s y_t^2 / c)^-1/2` at elapsed time `s`,
/// infinite past its blow-up time.
pub fn riccati_local_bound(y_t: f64, elapsed: f64, c: f64) -> f64 {
    let q = 1.0 - elapsed * y_t * y_t / c;
    if q <= 0.0 {
        f64::INFINITY
    } else {
        y_t / q.sqrt()
    }
}

/// Sample times with their Dirichlet values and a validity flag (a sample is
/// valid when the cross-level diagnostics mark it converged).
#[derive(Clone, Debug, PartialEq)]
pub struct SampledSet {
    pub times: Vec<f64>,
    /// `|grad v|_2` per sample.
    pub dirichlet: Vec<f64>,
    pub valid: Vec<bool>,
    /// `|P Delta v|_2^2` and `|v_t|_2^2` per sample, when known.
    pub laplacian_sq: Option<Vec<f64>>,
    pub vt_sq: Option<Vec<f64>>,
}

impl SampledSet {
    pub fn new(times: Vec<f64>, dirichlet: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        if times.len() != dirichlet.len() || times.len() != valid.len() {
            return Err(Error::GridMismatch("series lengths differ".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::GridMismatch("times must be strictly increasing".into()));
        }
        Ok(Self {
            times,
            dirichlet,
            valid,
            laplacian_sq: None,
            vt_sq: None,
        })
    }

    /// All samples valid unless `valid` is given (one flag per sample).
    pub fn from_trajectory(traj: &Trajectory, valid: Option<&[bool]>) -> Result<Self> {
        let valid = match valid {
            Some(v) if v.len() != traj.len() => {
                return Err(Error::GridMismatch(format!(
                    "{} flags for {} samples",
                    v.len(),
                    traj.len()
                )))
            }
            Some(v) => v.to_vec(),
            None => vec![true; traj.len()],
        };
        let mut set = Self::new(traj.times(), traj.series(|n| n.dirichlet), valid)?;
        set.laplacian_sq = Some(traj.series(|n| n.laplacian_l2.powi(2)));
        if traj.samples.iter().all(|s| s.norms.vt_l2.is_some()) {
            set.vt_sq = Some(traj.series(|n| n.vt_l2.unwrap_or(0.0).powi(2)));
        }
        Ok(set)
    }

    fn integrals(&self, a: f64, b: f64) -> (Option<f64>, Option<f64>) {
        let f = |s: &Option<Vec<f64>>| s.as_ref().map(|v| integrate_between(&self.times, v, a, b));
        (f(&self.laplacian_sq), f(&self.vt_sq))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Epoch {
    pub start: f64,
    pub end: f64,
    pub integral_laplacian: Option<f64>,
    pub integral_vt: Option<f64>,
    /// Sample time that opened the epoch.
    pub seed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochCover {
    pub epochs: Vec<Epoch>,
    pub uncovered_measure: f64,
}

/// Cover of `[t_0, theta]` by regularity intervals.
///
/// Valid samples seed intervals in increasing time order. A seed at `t` with
/// `y = y(t)` yields `(t, t + max(c (y+1)^-2, r))`, where `r` is the reach of
/// the following samples that stay below the local Riccati majorant
/// [`riccati_local_bound`] before its blow-up time. A
/// seed outside the current epoch opens a new one; a seed inside it, or at
/// its right end, prolongs it. Ends are clipped to `theta`. The uncovered
/// measure is the total length of grid cells of `[t_0, theta]` not contained
/// in the closure of the cover.
pub fn build_epoch_cover(set: &SampledSet, theta: f64, c: f64) -> Result<EpochCover> {
    if set.times.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, found: 0 });
    }
    if !(c > 0.0) {
        return Err(invalid("c", format!("must be positive, got {c}")));
    }
    let t = &set.times;
    let t0 = t[0];
    let limit = t0 + theta;
    let mut spans: Vec<(f64, f64, f64)> = Vec::new();
    for j in 0..t.len() {
        if t[j] > limit {
            break;
        }
        if !set.valid[j] || !set.dirichlet[j].is_finite() {
            continue;
        }
        let y = set.dirichlet[j].powi(2);
        let mut end = t[j] + local_interval(y, c)?;
        for i in j + 1..t.len() {
            let yi = set.dirichlet[i].powi(2);
            let bound = riccati_local_bound(y, t[i] - t[j], c);
            if !yi.is_finite() || !bound.is_finite() || yi > bound {
                break;
            }
            end = end.max(t[i]);
        }
        let end = end.min(limit);
        match spans.last_mut() {
            Some(last) if t[j] <= last.1 => last.1 = last.1.max(end),
            _ => spans.push((t[j], end, t[j])),
        }
    }
    spans.retain(|s| s.1 > s.0);

    let mut uncovered = 0.0;
    let mut k = 0;
    for w in t.windows(2) {
        let (a, b) = (w[0], w[1].min(limit));
        if a >= limit {
            break;
        }
        while k < spans.len() && spans[k].1 < b {
            k += 1;
        }
        let covered = k < spans.len() && spans[k].0 <= a && spans[k].1 >= b;
        if !covered {
            uncovered += b - a;
        }
    }

    let epochs = spans
        .into_iter()
        .map(|(start, end, seed)| {
            let (il, iv) = set.integrals(start, end);
            Epoch {
                start,
                end,
                integral_laplacian: il,
                integral_vt: iv,
                seed,
            }
        })
        .collect();
    Ok(EpochCover {
        epochs,
        uncovered_measure: uncovered,
    })
}

/// `(int |P Delta v|^2, int |v_t|^2)` over `[a, b]`.
pub fn regularity_integrals(traj: &Trajectory, a: f64, b: f64) -> Result<(f64, f64)> {
    let t = traj.times();
    let (lo, hi) = match (t.first(), t.last()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Err(Error::TooFewSamples { needed: 2, found: t.len() }),
    };
    let slack = 1e-9 * (hi - lo).abs().max(1.0);
    if a < lo - slack || b > hi + slack || b < a {
        return Err(Error::IntervalOutsideSpan {
            start: a,
            end: b,
            span_start: lo,
            span_end: hi,
        });
    }
    let lap = traj.series(|n| n.laplacian_l2.powi(2));
    if traj.samples.iter().any(|s| s.norms.vt_l2.is_none()) {
        return Err(Error::MissingFields);
    }
    let vt = traj.series(|n| n.vt_l2.unwrap_or(0.0).powi(2));
    Ok((integrate_between(&t, &lap, a, b), integrate_between(&t, &vt, a, b)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalBound {
    pub holds: bool,
    /// `None` when `2 c eta^2 >= 1`.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochReport {
    pub eta: f64,
    pub theta: f64,
    pub t_m: Option<f64>,
    pub global_bound: GlobalBound,
    pub epochs: Vec<Epoch>,
    pub uncovered_measure: f64,
    /// Constants used: Riccati global and local-interval forms.
    pub c_riccati: f64,
    pub c_local: f64,
}

impl EpochReport {
    /// Plain-text epoch table.
    pub fn table(&self) -> String {
        let mut s = format!(
            "eta = {}  theta = {}  t_m = {}\nglobal bound: {} ({})\n",
            self.eta,
            self.theta,
            self.t_m.map_or("-".into(), |t| t.to_string()),
            if self.global_bound.holds { "holds" } else { "not established" },
            self.global_bound.value.map_or("n/a".into(), |v| format!("{v:.6e}")),
        );
        s.push_str(&format!(
            "{:>4}  {:>14}  {:>14}  {:>14}  {:>14}  {:>14}\n",
            "#", "start", "end", "seed", "int |PDv|^2", "int |v_t|^2"
        ));
        let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6e}"));
        for (i, e) in self.epochs.iter().enumerate() {
            s.push_str(&format!(
                "{:>4}  {:>14.6e}  {:>14.6e}  {:>14.6e}  {:>14}  {:>14}\n",
                i,
                e.start,
                e.end,
                e.seed,
                opt(e.integral_laplacian),
                opt(e.integral_vt)
            ));
        }
        s.push_str(&format!("uncovered measure: {:.6e}\n", self.uncovered_measure));
        s
    }
}

/// Full pipeline on one trajectory: `theta`, `t^m`, the global bound, the
/// cover of `[0, theta]` and the terminal epoch `(theta, T]` when the global
/// bound holds.
pub fn epoch_report(traj: &Trajectory, valid: Option<&[bool]>, eta: f64, constants: &DerivedConstants) -> Result<EpochReport> {
    let first = traj.samples.first().ok_or(Error::TooFewSamples { needed: 1, found: 0 })?;
    let (t0, v0) = (first.norms.t, first.norms.l2);
    let th = theta(v0, eta)?;
    let end = traj.end_time();
    if end < t0 + th {
        return Err(Error::HorizonTooShort { end, required: t0 + th });
    }
    let t_m = find_small_dirichlet_time(traj, eta)?;
    let global = riccati_global_bound(traj, t_m, eta, constants.riccati)?;
    let value = global_bound_value(v0, eta, constants.riccati);
    let holds = value.is_some() && global.pass;

    let set = SampledSet::from_trajectory(traj, valid)?;
    let cover = build_epoch_cover(&set, th, constants.local)?;
    let mut epochs = cover.epochs;
    if holds && end > t0 + th {
        let (il, iv) = set.integrals(t0 + th, end);
        epochs.push(Epoch {
            start: t0 + th,
            end,
            integral_laplacian: il,
            integral_vt: iv,
            seed: t_m,
        });
    }
    Ok(EpochReport {
        eta,
        theta: th,
        t_m: Some(t_m),
        global_bound: GlobalBound { holds, value },
        epochs,
        uncovered_measure: cover.uncovered_measure,
        c_riccati: constants.riccati,
        c_local: constants.local,
    })
}

/// `2 int_0^t |grad v|^2` at every sample.
pub fn dissipation(traj: &Trajectory) -> Vec<f64> {
    let y = traj.series(|n| n.dirichlet * n.dirichlet);
    cumulative(&traj.times(), &y).into_iter().map(|v| 2.0 * v).collect()
}
