//! Cross-level Cauchy diagnostics: distances between approximations at
//! successive cutoffs (or mollification indices) in the time-integrated
//! gradient norm, bounded through `|grad d|^2 <= |P Delta d| |d|`.

use serde::{Deserialize, Serialize};

use crate::dynamics::{run, BlowUp, SolverConfig, Trajectory};
use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::quadrature::integrate;

/// Per-time norms of the difference `d = u^a - u^b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDiagnostic {
    pub a: f64,
    pub b: f64,
    /// `int |grad d|_2`.
    pub lhs: f64,
    /// `int |P Delta d|_2^(1/2) |d|_2^(1/2)`.
    pub rhs: f64,
    #[serde(skip)]
    pub times: Vec<f64>,
    /// `|grad d(t)|_2` per sample.
    #[serde(skip)]
    pub distance: Vec<f64>,
    /// Worst per-time value of `|grad d|^2 - |P Delta d| |d|`, relative to
    /// `|P Delta d| |d|`.
    #[serde(skip)]
    pub worst_pointwise: f64,
}

impl PairDiagnostic {
    /// `lhs <= rhs` up to quadrature slack.
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-9) + 1e-300
    }
}

fn fields(traj: &Trajectory) -> Result<Vec<&SpectralField>> {
    traj.samples
        .iter()
        .map(|s| s.field.as_ref().ok_or(Error::MissingFields))
        .collect()
}

/// Difference norms of two trajectories on a shared sample grid, compared
/// after zero-padding to the finer resolution.
pub fn cauchy_diagnostic(a: &Trajectory, b: &Trajectory) -> Result<PairDiagnostic> {
    let (ta, tb) = (a.times(), b.times());
    if ta.len() != tb.len() || ta.iter().zip(&tb).any(|(x, y)| (x - y).abs() > 1e-12 * (1.0 + x.abs())) {
        return Err(Error::GridMismatch(format!("{} vs {} samples", ta.len(), tb.len())));
    }
    let (fa, fb) = (fields(a)?, fields(b)?);
    let mut distance = Vec::with_capacity(ta.len());
    let mut bound = Vec::with_capacity(ta.len());
    let mut worst = f64::NEG_INFINITY;
    for (x, y) in fa.iter().zip(&fb) {
        let n = x.resolution().max(y.resolution());
        let d = x.resample(n)?.difference(&y.resample(n)?)?;
        let (g, l, e) = (d.dirichlet(), d.laplacian_l2(), d.l2());
        let prod = l * e;
        if prod > 0.0 {
            worst = worst.max((g * g - prod) / prod);
        }
        distance.push(g);
        bound.push(prod.sqrt());
    }
    let level = |t: &Trajectory| t.scheme().map_or(f64::NAN, |s| s.level());
    Ok(PairDiagnostic {
        a: level(a),
        b: level(b),
        lhs: integrate(&ta, &distance),
        rhs: integrate(&ta, &bound),
        times: ta,
        distance,
        worst_pointwise: if worst.is_finite() { worst } else { 0.0 },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeFlag {
    pub t: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub levels: Vec<f64>,
    pub pairs: Vec<PairDiagnostic>,
    pub per_time: Vec<TimeFlag>,
    /// Every pair satisfies `lhs <= rhs`.
    pub interpolation_holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup: Option<BlowUp>,
}

impl ConvergenceReport {
    pub fn flags(&self) -> Vec<bool> {
        self.per_time.iter().map(|f| f.converged).collect()
    }
}

/// Per-time flags: `t` is converged when the last pair distance is below
/// `tol * |grad v0|` and no larger than the one before it. Distances under
/// the round-off floor `1e-12 |grad v0|` carry no trend and count as
/// decreasing.
pub fn convergence_flags(pairs: &[PairDiagnostic], grad_v0: f64, tol: f64) -> Vec<TimeFlag> {
    let Some(last) = pairs.last() else {
        return Vec::new();
    };
    let prev = pairs.len().checked_sub(2).map(|i| &pairs[i]);
    last.times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let d = last.distance[j];
            let trend = prev.is_none_or(|p| d <= p.distance[j].max(1e-12 * grad_v0));
            TimeFlag {
                t,
                converged: trend && d <= tol * grad_v0,
            }
        })
        .collect()
}

/// Run `base` at each level (in parallel when enabled) and compare
/// consecutive levels. Blow-up of any level truncates every trajectory to
/// the common valid prefix and is recorded in the report.
pub fn convergence_sweep(base: &SolverConfig, levels: &[f64]) -> Result<ConvergenceReport> {
    if levels.len() < 3 {
        return Err(invalid("levels", format!("need at least 3 levels, got {}", levels.len())));
    }
    if levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("levels", "must be strictly increasing"));
    }
    let configs: Vec<SolverConfig> = levels
        .iter()
        .map(|&l| {
            let mut c = base.clone();
            c.scheme = base.scheme.with_level(l);
            c.keep_fields = true;
            c
        })
        .collect();
    for c in &configs {
        c.validate()?;
    }
    let mut trajs = run_all(&configs)?;

    let blowup = trajs
        .iter()
        .filter_map(|t| t.blowup.clone())
        .min_by(|a, b| a.time.total_cmp(&b.time));
    let common = trajs.iter().map(|t| t.len()).min().unwrap_or(0);
    for t in &mut trajs {
        t.samples.truncate(common);
    }
    if common < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: common });
    }

    let pairs = trajs
        .windows(2)
        .map(|w| cauchy_diagnostic(&w[0], &w[1]))
        .collect::<Result<Vec<_>>>()?;
    let finest = trajs.last().expect("at least three levels");
    let grad_v0 = finest.samples[0].norms.dirichlet;
    let per_time = convergence_flags(&pairs, grad_v0, base.tolerances.conv_rel);
    Ok(ConvergenceReport {
        levels: levels.to_vec(),
        interpolation_holds: pairs.iter().all(PairDiagnostic::holds),
        pairs,
        per_time,
        blowup,
    })
}

#[cfg(feature = "parallel")]
fn run_all(configs: &[SolverConfig]) -> Result<Vec<Trajectory>> {
    use rayon::prelude::*;
    configs.par_iter().map(run).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_all(configs: &[SolverConfig]) -> Result<Vec<Trajectory>> {
    configs.iter().map(run).collect()
}
