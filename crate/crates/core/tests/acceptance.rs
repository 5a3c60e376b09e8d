//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use nslab::convergence::convergence_sweep;
use nslab::epochs::{build_epoch_cover, find_small_dirichlet_time, local_interval, riccati_bound_from, theta, SampledSet};
use nslab::estimates::{ddn_pointwise, ddn_residual, ds_bound_check, energy_check, estimate_agmon_constant};
use nslab::io::{aux_csv, trajectory_csv};
use nslab::{
    leray_project, make_field, Error, nonlinear_term, run, Datum, DerivedConstants, FourierField, Scheme, SolverConfig,
    SpectralField, Trajectory, VOLUME,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MARGIN: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Member {
    label: String,
    traj: Trajectory,
    elapsed: std::time::Duration,
}

fn solve(label: &str, n: usize, scheme: Scheme, datum: Datum, dt: f64, horizon: f64) -> Member {
    let clock = Instant::now();
    let traj = run(&SolverConfig::new(n, scheme, datum, dt, horizon)).expect("solver run");
    let elapsed = clock.elapsed();
    eprintln!("  ran {label} in {elapsed:.1?}");
    Member {
        label: label.to_string(),
        traj,
        elapsed,
    }
}

fn random_datum(seed: u64) -> Datum {
    Datum::Random {
        seed,
        slope: 2.0,
        amplitude: 0.2,
    }
}

/// zero, kolmogorov, taylor_green under both schemes, five random seeds.
fn build_suite() -> Vec<Member> {
    let mut suite = vec![
        solve("zero", 16, Scheme::galerkin(5.0), Datum::Zero, 1e-3, 1.0),
        solve("kolmogorov", 16, Scheme::galerkin(5.0), Datum::Kolmogorov { amplitude: 1.0 }, 1e-3, 1.0),
        solve("taylor_green/galerkin", 32, Scheme::galerkin(10.0), Datum::TaylorGreen { amplitude: 1.0 }, 1e-3, 1.0),
        solve("taylor_green/mollified", 32, Scheme::mollified(4.0), Datum::TaylorGreen { amplitude: 1.0 }, 1e-3, 1.0),
    ];
    for seed in 1..=5 {
        suite.push(solve(&format!("random/{seed}"), 32, Scheme::galerkin(10.0), random_datum(seed), 1e-3, 1.0));
    }
    suite
}

fn energy_deficit(traj: &Trajectory) -> f64 {
    let r = energy_check(traj).expect("energy check");
    let e0 = traj.samples[0].norms.l2.powi(2);
    let worst = r.lhs.iter().map(|l| (l - e0).abs()).fold(0.0, f64::max);
    if e0 > 0.0 {
        worst / e0
    } else {
        worst
    }
}

fn c1_energy(suite: &[Member]) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for m in suite.iter().filter(|m| m.label.starts_with("taylor_green")) {
        let deficit = energy_deficit(&m.traj);
        let ok = deficit <= 1e-6 && energy_check(&m.traj).unwrap().pass;
        pass &= ok;
        parts.push(format!("{} deficit {deficit:.2e} ({:.0?})", m.label, m.elapsed));
    }
    outcome(pass, parts.join(", "))
}

fn c2_linear_flow(suite: &[Member]) -> Outcome {
    let k = &suite.iter().find(|m| m.label == "kolmogorov").unwrap().traj;
    let e1 = k.samples.last().unwrap().norms.l2.powi(2);
    let expect = (-2.0f64).exp() * VOLUME / 2.0;
    let err_e = (e1 - expect).abs() / expect;
    let r0 = ddn_pointwise(&k.samples[0]).unwrap();
    let err_r = (r0 + VOLUME / 2.0).abs() / (VOLUME / 2.0);
    outcome(
        err_e <= 1e-8 && err_r <= 1e-6,
        format!("|v(1)|^2 = {e1:.10} (rel err {err_e:.1e}), DDN(0) = {r0:.6} (rel err {err_r:.1e})"),
    )
}

fn c3_ds(suite: &[Member], consts: &DerivedConstants) -> Outcome {
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for m in suite {
        let r = ds_bound_check(&m.traj, 2.0 / 3.0, consts.ds).unwrap();
        pass &= r.pass;
        let rel = r
            .lhs
            .iter()
            .zip(&r.rhs)
            .filter(|(_, rh)| **rh > 0.0)
            .map(|(l, rh)| 1.0 - l / rh)
            .fold(f64::INFINITY, f64::min);
        worst = worst.min(rel);
    }
    outcome(pass, format!("{} trajectories, c = {:.4e}, smallest relative margin {worst:.3}", suite.len(), consts.ds))
}

fn c4_ddn(suite: &[Member]) -> Outcome {
    let mut pass = true;
    let mut worst = f64::INFINITY;
    for m in suite {
        let r = ddn_residual(&m.traj).unwrap();
        pass &= r.pass;
        if r.tolerance > 0.0 {
            worst = worst.min(r.max_violation / r.tolerance);
        }
    }
    // tolerance under step halving
    let tol = |dt: f64| {
        let t = run(&SolverConfig::new(16, Scheme::galerkin(5.0), Datum::TaylorGreen { amplitude: 1.0 }, dt, 0.5)).unwrap();
        ddn_residual(&t).unwrap().tolerance
    };
    let ratio = tol(2e-3) / tol(1e-3);
    let shrinks = (3.5..=4.5).contains(&ratio);
    outcome(
        pass && shrinks,
        format!("min (rhs - lhs)/tol = {worst:.3e}; tol(dt)/tol(dt/2) = {ratio:.3}"),
    )
}

fn c5_pigeonhole(suite: &[Member]) -> Outcome {
    let mut pass = true;
    let mut count = 0;
    for m in suite {
        let v0 = m.traj.samples[0].norms.l2;
        let horizon = m.traj.end_time();
        let base = if v0 > 0.0 { v0 * v0 / horizon.sqrt() } else { 1.0 };
        let energy_ok = energy_check(&m.traj).unwrap().pass;
        for scale in [1.0, 10f64.sqrt(), 10.0] {
            let eta = base * scale;
            let th = theta(v0, eta).unwrap();
            match find_small_dirichlet_time(&m.traj, eta) {
                Ok(tm) => pass &= energy_ok && tm <= th,
                Err(e) => {
                    eprintln!("  {} eta = {eta}: {e}", m.label);
                    pass = false;
                }
            }
            count += 1;
        }
    }
    outcome(pass, format!("{count} (trajectory, eta) pairs, eta spanning one decade"))
}

fn c6_riccati(suite: &[Member], consts: &DerivedConstants) -> Outcome {
    let c = consts.riccati;
    let eta = 0.9 / (2.0 * c).sqrt();
    let mut members: Vec<&Member> = suite.iter().collect();
    let long = [
        solve("kolmogorov/long", 8, Scheme::galerkin(2.0), Datum::Kolmogorov { amplitude: 1.0 }, 0.1, 100.0),
        solve("taylor_green/long", 16, Scheme::galerkin(5.0), Datum::TaylorGreen { amplitude: 1.0 }, 1e-2, 25.0),
    ];
    members.extend(long.iter());
    let mut pass = true;
    let (mut past_theta, mut past_tm, mut unreached) = (0usize, 0usize, 0usize);
    for m in members {
        let v0 = m.traj.samples[0].norms.l2;
        let th = theta(v0, eta).unwrap();
        let tm = match find_small_dirichlet_time(&m.traj, eta) {
            Ok(t) => t,
            Err(Error::HorizonTooShort { .. }) => {
                unreached += 1;
                continue;
            }
            Err(e) => {
                eprintln!("  {}: {e}", m.label);
                pass = false;
                continue;
            }
        };
        let from_theta = riccati_bound_from(&m.traj, tm, eta, c, th).unwrap();
        let from_tm = riccati_bound_from(&m.traj, tm, eta, c, tm).unwrap();
        pass &= from_theta.pass && from_tm.pass;
        past_theta += m.traj.samples.iter().filter(|s| s.norms.t >= th).count();
        past_tm += m.traj.samples.iter().filter(|s| s.norms.t >= tm).count();
        if !(from_theta.pass && from_tm.pass) {
            eprintln!("  {}: violation {:.3e}", m.label, from_tm.max_violation.min(from_theta.max_violation));
        }
    }
    outcome(
        pass && past_theta > 0,
        format!(
            "eta = {eta:.4} (2 c eta^2 = {:.2}); {past_theta} samples past theta, {past_tm} past t_m; \
             {unreached} trajectories end before t_m",
            2.0 * c * eta * eta
        ),
    )
}

fn c7_interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..100 {
        let mk = |rng: &mut ChaCha8Rng| {
            let datum = Datum::Random {
                seed: rng.random(),
                slope: rng.random_range(0.0..4.0),
                amplitude: rng.random_range(0.1..2.0),
            };
            make_field(&datum, 16).unwrap()
        };
        let (a, b) = (mk(&mut rng), mk(&mut rng));
        let d = a.difference(&b).unwrap();
        let (g, l, e) = (d.dirichlet(), d.laplacian_l2(), d.l2());
        worst = worst.max((g * g - l * e) / (l * e));
    }
    let pointwise = worst <= 1e-11;

    let mut pairs_ok = true;
    let mut detail = Vec::new();
    let sweeps = [
        ("zero", SolverConfig::new(12, Scheme::galerkin(1.0), Datum::Zero, 1e-2, 0.5), vec![1.0, 2.0, 4.0]),
        (
            "kolmogorov",
            SolverConfig::new(12, Scheme::galerkin(1.0), Datum::Kolmogorov { amplitude: 1.0 }, 1e-2, 0.5),
            vec![1.0, 2.0, 4.0],
        ),
        (
            "taylor_green",
            SolverConfig::new(48, Scheme::galerkin(4.0), Datum::TaylorGreen { amplitude: 1.0 }, 2e-3, 0.5),
            vec![4.0, 8.0, 16.0],
        ),
    ];
    let mut decreasing = false;
    for (label, mut base, levels) in sweeps {
        base.sample_every = 5;
        let clock = Instant::now();
        let r = convergence_sweep(&base, &levels).unwrap();
        eprintln!("  swept {label} in {:.1?}", clock.elapsed());
        pairs_ok &= r.interpolation_holds;
        if label == "taylor_green" {
            decreasing = r.pairs.windows(2).all(|w| w[1].lhs < w[0].lhs) && r.pairs.iter().all(|p| p.lhs > 0.0);
            detail.push(format!(
                "TG lhs {}",
                r.pairs.iter().map(|p| format!("{:.3e}", p.lhs)).collect::<Vec<_>>().join(" > ")
            ));
        }
    }
    outcome(
        pointwise && pairs_ok && decreasing,
        format!("worst per-time (|grad d|^2 - |Dd||d|)/(|Dd||d|) = {worst:.1e}; {}", detail.join("")),
    )
}

fn c8_cover() -> Outcome {
    // bounded series: y <= G^2 = 4 with spacing below c (G^2 + 1)^-2
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bounded_ok = true;
    for _ in 0..50 {
        let c: f64 = rng.random_range(0.1..2.0);
        let h = 0.99 * local_interval(4.0, c).unwrap();
        let len = rng.random_range(10..400);
        let y: Vec<f64> = (0..len).map(|_| rng.random_range(0.0..4.0)).collect();
        let times: Vec<f64> = (0..len).map(|j| j as f64 * h).collect();
        let th = times[len - 1] * rng.random_range(0.2..1.0);
        let set = SampledSet::new(times, y.iter().map(|v| v.sqrt()).collect(), vec![true; len]).unwrap();
        bounded_ok &= build_epoch_cover(&set, th, c).unwrap().uncovered_measure == 0.0;
    }

    // spike: y = 3 outside [0.4, 0.6], 1e6 inside, c = 1, theta = 1
    let h = 1e-3;
    let times: Vec<f64> = (0..=1000).map(|j| j as f64 * h).collect();
    let y: Vec<f64> = times
        .iter()
        .map(|&t| if (0.4 - 1e-12..=0.6 + 1e-12).contains(&t) { 1e6 } else { 3.0 })
        .collect();
    let set = SampledSet::new(times.clone(), y.iter().map(|v| v.sqrt()).collect(), vec![true; y.len()]).unwrap();
    let got = build_epoch_cover(&set, 1.0, 1.0).unwrap().uncovered_measure;
    let expect = brute_force_uncovered(&times, &y, 1.0, 1.0);
    let spike_ok = got == expect && got > 0.1;
    outcome(
        bounded_ok && spike_ok,
        format!("50 bounded series fully covered: {bounded_ok}; spike uncovered {got:.6} vs oracle {expect:.6}"),
    )
}

/// Mark every grid cell lying inside some seed's guaranteed interval
/// `[t_s, t_s + c (y_s + 1)^-2]`, or inside a union of such intervals, by
/// dense point sampling; sum the unmarked cells.
fn brute_force_uncovered(times: &[f64], y: &[f64], theta: f64, c: f64) -> f64 {
    let intervals: Vec<(f64, f64)> = times
        .iter()
        .zip(y)
        .filter(|(t, _)| **t <= theta)
        .map(|(&t, &v)| (t, (t + c / (v + 1.0).powi(2)).min(theta)))
        .collect();
    let covered = |x: f64| intervals.iter().any(|&(a, b)| a <= x && x <= b);
    let mut total = 0.0;
    for w in times.windows(2) {
        if w[0] >= theta {
            break;
        }
        let (a, b) = (w[0], w[1].min(theta));
        let inside = (0..=64).all(|i| covered(a + (b - a) * i as f64 / 64.0));
        if !inside {
            total += b - a;
        }
    }
    total
}

fn convolution(a: &SpectralField, u: &SpectralField) -> FourierField {
    let n = a.resolution();
    let h = (n / 2 - 1) as i64;
    let modes: Vec<[i64; 3]> = (-h..=h)
        .flat_map(|x| (-h..=h).flat_map(move |y| (-h..=h).map(move |z| [x, y, z])))
        .collect();
    let mut out = FourierField::zeros(n).unwrap();
    for &k in &modes {
        let mut acc = [Complex64::new(0.0, 0.0); 3];
        for &p in &modes {
            let q = [k[0] - p[0], k[1] - p[1], k[2] - p[2]];
            if q.iter().any(|c| c.abs() > h) {
                continue;
            }
            let (ap, uq) = (a.get(p), u.get(q));
            let adv: Complex64 = (0..3).map(|j| ap[j] * Complex64::new(0.0, q[j] as f64)).sum();
            for c in 0..3 {
                acc[c] += adv * uq[c];
            }
        }
        out.set(k, acc).unwrap();
    }
    out
}

fn c9_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for seed in 0..20u64 {
        let a = make_field(&Datum::Random { seed, slope: 1.5, amplitude: 1.0 }, 8).unwrap();
        let u = make_field(&Datum::Random { seed: seed + 1000, slope: 1.5, amplitude: 1.0 }, 8).unwrap();
        let fast = nonlinear_term(&a, &u).unwrap().into_fourier();
        let slow = leray_project(&convolution(&a, &u)).into_fourier();
        let mut d = fast;
        d.axpy(-1.0, &slow);
        worst = worst.max(d.l2() / slow.l2());
    }
    outcome(worst <= 1e-12, format!("worst relative difference {worst:.2e} over 20 field pairs at N = 8"))
}

fn c10_determinism() -> Outcome {
    let artifacts = || {
        let mut c = SolverConfig::new(16, Scheme::mollified(3.0), random_datum(11), 5e-3, 0.25);
        c.sample_every = 2;
        let t = run(&c).unwrap();
        let mut base = SolverConfig::new(16, Scheme::galerkin(2.0), random_datum(12), 1e-2, 0.2);
        base.sample_every = 2;
        let conv = convergence_sweep(&base, &[2.0, 3.0, 5.0]).unwrap();
        let consts = DerivedConstants::calibrated(estimate_agmon_constant(8, 20, 3).unwrap(), MARGIN);
        (
            trajectory_csv(&t),
            aux_csv(&t),
            serde_json::to_string(&conv).unwrap(),
            serde_json::to_string(&consts).unwrap(),
        )
    };
    let (a, b) = (artifacts(), artifacts());
    outcome(a == b, "trajectory CSV, aux CSV, convergence JSON and constants identical across two runs")
}

fn main() -> ExitCode {
    let clock = Instant::now();
    let c_hat = estimate_agmon_constant(16, 200, 1).expect("agmon estimate");
    let consts = DerivedConstants::calibrated(c_hat, MARGIN);
    eprintln!("calibrated Agmon constant {c_hat:.6} -> c_a = {:.6}", consts.agmon);
    let suite = build_suite();

    let results: Vec<(u32, &str, Outcome)> = vec![
        (1, "energy relation", c1_energy(&suite)),
        (2, "exact linear flow", c2_linear_flow(&suite)),
        (3, "fractional D2 bound (alpha = 2/3)", c3_ds(&suite, &consts)),
        (4, "Dirichlet differential inequality", c4_ddn(&suite)),
        (5, "pigeonhole time", c5_pigeonhole(&suite)),
        (6, "Riccati global bound", c6_riccati(&suite, &consts)),
        (7, "interpolation inequality and Cauchy trend", c7_interpolation()),
        (8, "epoch cover", c8_cover()),
        (9, "nonlinear term vs convolution oracle", c9_oracle()),
        (10, "determinism", c10_determinism()),
    ];
    let mut failed = 0;
    for (id, name, o) in &results {
        println!("criterion {id:>2} {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {}/{} passed in {:.0?}",
        results.len() - failed,
        results.len(),
        clock.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
