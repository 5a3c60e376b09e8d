use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use nslab::estimates::random_weak_tests;
use nslab::io::{
    align_flags, decode_snapshot, encode_snapshot, flags_csv, parse_flags_csv, read_trajectory, write_atomic,
    write_trajectory,
};
use nslab::{
    agmon_check, convergence_sweep, ddn_residual, ds_bound_check, energy_check, epoch_report, estimate_agmon_constant,
    run, weak_form_residual, Datum, DerivedConstants, InequalityReport, Scheme, SolverConfig, Trajectory,
};

use crate::config::{self, RunConfig};
use crate::{CliError, EXIT_BLOWUP, EXIT_CONTRADICTION, EXIT_OK};

pub const DEFAULT_OUT: &str = "nslab_out";
pub const CHECKS: [&str; 5] = ["energy", "ds", "ddn", "agmon", "weak"];
/// Safety margin applied to a calibrated Agmon constant.
pub const AGMON_MARGIN: f64 = 0.5;
const CALIBRATION_N: usize = 16;
const CALIBRATION_TRIALS: usize = 200;
const WEAK_TESTS: usize = 8;

type Outcome = Result<u8, CliError>;

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read `{}`: {e}", path.display())))?;
    config::parse(&text)
}

fn out_dir(flag: Option<&Path>, config: Option<&RunConfig>) -> Result<PathBuf, CliError> {
    let dir = flag
        .map(Path::to_path_buf)
        .or_else(|| config.and_then(|c| c.out.clone()))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    fs::create_dir_all(&dir).map_err(nslab::Error::from)?;
    Ok(dir)
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(nslab::Error::from)?;
    text.push('\n');
    Ok(write_atomic(path, text.as_bytes())?)
}

/// Deterministic run record plus a separate `timings.json`.
struct Manifest {
    command: &'static str,
    inputs: Value,
    artifacts: Vec<String>,
    details: Value,
    clock: Instant,
}

impl Manifest {
    fn new(command: &'static str, inputs: Value) -> Self {
        Self {
            command,
            inputs,
            artifacts: Vec::new(),
            details: json!({}),
            clock: Instant::now(),
        }
    }

    fn artifact(&mut self, dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_atomic(&dir.join(name), bytes)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn json_artifact(&mut self, dir: &Path, name: &str, value: &impl serde::Serialize) -> Result<(), CliError> {
        write_json(&dir.join(name), value)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    fn finish(self, dir: &Path, pass: bool) -> Result<(), CliError> {
        let manifest = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": self.inputs,
            "artifacts": self.artifacts,
            "pass": pass,
            "details": self.details,
        });
        write_json(&dir.join("manifest.json"), &manifest)?;
        write_json(
            &dir.join("timings.json"),
            &json!({ "command": self.command, "wall_seconds": self.clock.elapsed().as_secs_f64() }),
        )
    }
}

fn config_echo(cfg: &RunConfig) -> Value {
    Value::Array(cfg.entries.iter().map(|(k, v)| json!([k, v])).collect())
}

pub fn simulate(config_path: &Path, out: Option<&Path>) -> Outcome {
    let cfg = load_config(config_path)?;
    let dir = out_dir(out, Some(&cfg))?;
    let mut manifest = Manifest::new(
        "simulate",
        json!({ "config": config_path.display().to_string(), "entries": config_echo(&cfg) }),
    );
    let traj = run(&cfg.solver)?;

    write_trajectory(&dir.join("trajectory.csv"), &traj)?;
    manifest.artifacts.push("trajectory.csv".into());
    manifest.artifacts.push("trajectory.aux.csv".into());
    let tag = cfg.solver.scheme.tag();
    for (i, (t, field)) in traj.snapshots.iter().enumerate() {
        manifest.artifact(&dir, &format!("snapshot_{i:03}.nslf"), &encode_snapshot(field, *t, &tag))?;
    }
    if cfg.solver.keep_fields {
        fs::create_dir_all(dir.join("fields")).map_err(nslab::Error::from)?;
        for (i, s) in traj.samples.iter().enumerate() {
            if let Some(f) = &s.field {
                manifest.artifact(&dir, &format!("fields/{i:06}.nslf"), &encode_snapshot(f, s.norms.t, &tag))?;
            }
        }
    }

    let last = traj.samples.last().map(|s| s.norms);
    manifest.details = json!({
        "scheme": tag,
        "datum": cfg.solver.datum.name(),
        "samples": traj.len(),
        "end_time": traj.end_time(),
        "final_l2": last.as_ref().map(|n| n.l2),
        "final_dirichlet": last.as_ref().map(|n| n.dirichlet),
        "blowup": traj.blowup,
    });
    println!("{tag}: {} samples, t in [0, {}]", traj.len(), traj.end_time());
    let pass = traj.blowup.is_none();
    if let Some(b) = &traj.blowup {
        eprintln!("blow-up at t = {}: {}", b.time, b.reason);
    }
    manifest.finish(&dir, pass)?;
    Ok(if pass { EXIT_OK } else { EXIT_BLOWUP })
}

pub fn parse_checks(list: &str) -> Result<Vec<&'static str>, CliError> {
    if list.trim() == "all" {
        return Ok(CHECKS.to_vec());
    }
    let mut out = Vec::new();
    let mut unknown = Vec::new();
    for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match CHECKS.iter().find(|c| **c == name) {
            Some(c) if !out.contains(c) => out.push(*c),
            Some(_) => {}
            None => unknown.push(name),
        }
    }
    if !unknown.is_empty() {
        return Err(CliError::Usage(format!(
            "unknown checks: {} (known: {}, all)",
            unknown.join(", "),
            CHECKS.join(", ")
        )));
    }
    if out.is_empty() {
        return Err(CliError::Usage("no checks selected".into()));
    }
    Ok(out)
}

fn constants(c: Option<f64>, seed: u64) -> Result<DerivedConstants, CliError> {
    match c {
        Some(c) if c > 0.0 && c.is_finite() => Ok(DerivedConstants::from_agmon(c)),
        Some(c) => Err(CliError::Usage(format!("--c must be positive, got {c}"))),
        None => Ok(DerivedConstants::calibrated(
            estimate_agmon_constant(CALIBRATION_N, CALIBRATION_TRIALS, seed)?,
            AGMON_MARGIN,
        )),
    }
}

fn load_trajectory(path: &Path) -> Result<Trajectory, CliError> {
    if !path.exists() {
        return Err(CliError::Usage(format!("trajectory `{}` does not exist", path.display())));
    }
    Ok(read_trajectory(path)?)
}

/// Attach per-sample fields from a sibling `fields/` directory, when present
/// and matching the sample grid. The scheme is recovered from the snapshot tag.
fn attach_fields(traj: &mut Trajectory, path: &Path) -> Result<bool, CliError> {
    let dir = path.parent().unwrap_or(Path::new(".")).join("fields");
    if !dir.is_dir() {
        return Ok(false);
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&dir)
        .map_err(nslab::Error::from)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "nslf"))
        .collect();
    files.sort();
    if files.len() != traj.len() {
        return Ok(false);
    }
    let mut tag = String::new();
    for (sample, file) in traj.samples.iter_mut().zip(&files) {
        let (field, t, scheme) = decode_snapshot(&fs::read(file).map_err(nslab::Error::from)?)?;
        if (t - sample.norms.t).abs() > 1e-12 * (1.0 + t.abs()) {
            return Ok(false);
        }
        sample.field = Some(field);
        tag = scheme;
    }
    let n = traj.samples[0].field.as_ref().map_or(4, |f| f.resolution());
    let scheme = Scheme::parse_tag(&tag)?;
    traj.config = Some(SolverConfig::new(n, scheme, Datum::Zero, traj.spacing(), traj.end_time()));
    Ok(true)
}

pub fn verify(traj_path: &Path, checks: &str, c: Option<f64>, seed: u64, out: Option<&Path>) -> Outcome {
    let checks = parse_checks(checks)?;
    let mut traj = load_trajectory(traj_path)?;
    let has_fields = checks.contains(&"weak") && attach_fields(&mut traj, traj_path)?;
    let needs_constants = checks.iter().any(|c| matches!(*c, "ds" | "agmon"));
    let consts = if needs_constants { Some(constants(c, seed)?) } else { None };
    let dir = out_dir(out, None)?;
    let mut manifest = Manifest::new(
        "verify",
        json!({
            "trajectory": traj_path.display().to_string(),
            "checks": checks,
            "c": c,
            "seed": seed,
        }),
    );

    let mut reports: Vec<InequalityReport> = Vec::new();
    for &name in &checks {
        let report = match name {
            "energy" => energy_check(&traj)?,
            "ds" => ds_bound_check(&traj, 2.0 / 3.0, consts.as_ref().expect("constants").ds)?,
            "ddn" => ddn_residual(&traj)?,
            "agmon" => agmon_check(&traj, consts.as_ref().expect("constants").agmon)?,
            "weak" if has_fields => {
                let tests = random_weak_tests(WEAK_TESTS, 1, traj.end_time(), traj.spacing(), seed)?;
                weak_form_residual(&traj, &tests)?
            }
            "weak" => InequalityReport::not_applicable("weak_form", "trajectory has no stored fields"),
            _ => unreachable!("validated by parse_checks"),
        };
        reports.push(report);
    }

    let mut summaries = Vec::new();
    for r in &reports {
        let series = format!("{}.csv", r.name);
        manifest.artifact(&dir, &series, r.series_csv().as_bytes())?;
        let mut s = r.summary(Some(&series));
        s["verdict"] = json!(r.verdict);
        summaries.push(s);
        println!(
            "{:<16} {:<5} max_violation = {:+.3e}  tolerance = {:.3e}",
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.max_violation,
            r.tolerance
        );
    }
    let pass = reports.iter().all(|r| r.pass);
    manifest.json_artifact(&dir, "verify.json", &summaries)?;
    manifest.details = json!({ "constants": consts });
    manifest.finish(&dir, pass)?;
    Ok(if pass { EXIT_OK } else { EXIT_CONTRADICTION })
}

pub fn epochs(traj_path: &Path, flags: Option<&Path>, eta: f64, c: Option<f64>, seed: u64, out: Option<&Path>) -> Outcome {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(CliError::Usage(format!("--eta must be positive, got {eta}")));
    }
    let traj = load_trajectory(traj_path)?;
    let valid = match flags {
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read flags `{}`: {e}", p.display())))?;
            let (times, flags) = parse_flags_csv(&text)?;
            Some(align_flags(&traj, &times, &flags))
        }
        None => None,
    };
    let consts = constants(c, seed)?;
    let report = epoch_report(&traj, valid.as_deref(), eta, &consts)?;
    let dir = out_dir(out, None)?;
    let mut manifest = Manifest::new(
        "epochs",
        json!({
            "trajectory": traj_path.display().to_string(),
            "flags": flags.map(|p| p.display().to_string()),
            "eta": eta,
            "c": c,
            "seed": seed,
        }),
    );
    let table = report.table();
    print!("{table}");
    manifest.json_artifact(&dir, "epochs.json", &report)?;
    manifest.artifact(&dir, "epochs.txt", table.as_bytes())?;
    manifest.details = json!({ "constants": consts });
    manifest.finish(&dir, true)?;
    Ok(EXIT_OK)
}

pub fn parse_levels(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Usage(format!("--levels: cannot parse `{s}`")))
        })
        .collect()
}

pub fn converge(config_path: &Path, levels: &str, out: Option<&Path>) -> Outcome {
    let levels = parse_levels(levels)?;
    if levels.len() < 3 {
        return Err(CliError::Usage(format!(
            "converge needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    let cfg = load_config(config_path)?;
    let report = convergence_sweep(&cfg.solver, &levels)?;
    let dir = out_dir(out, Some(&cfg))?;
    let mut manifest = Manifest::new(
        "converge",
        json!({
            "config": config_path.display().to_string(),
            "entries": config_echo(&cfg),
            "levels": levels,
        }),
    );
    let times: Vec<f64> = report.per_time.iter().map(|f| f.t).collect();
    manifest.json_artifact(&dir, "convergence.json", &report)?;
    manifest.artifact(&dir, "flags.csv", flags_csv(&times, &report.flags()).as_bytes())?;
    for p in &report.pairs {
        println!(
            "levels {} -> {}: int |grad d| = {:.6e} <= {:.6e} {}",
            p.a,
            p.b,
            p.lhs,
            p.rhs,
            if p.holds() { "ok" } else { "VIOLATED" }
        );
    }
    let converged = report.per_time.iter().filter(|f| f.converged).count();
    println!("converged at {converged} of {} times", report.per_time.len());
    manifest.details = json!({ "blowup": report.blowup, "converged_times": converged });
    let code = if report.blowup.is_some() {
        EXIT_BLOWUP
    } else if !report.interpolation_holds {
        EXIT_CONTRADICTION
    } else {
        EXIT_OK
    };
    manifest.finish(&dir, code == EXIT_OK)?;
    Ok(code)
}

pub fn estimate_constant(n: usize, trials: usize, seed: u64, out: Option<&Path>) -> Outcome {
    let c_hat = estimate_agmon_constant(n, trials, seed)?;
    let consts = DerivedConstants::calibrated(c_hat, AGMON_MARGIN);
    let dir = out_dir(out, None)?;
    let mut manifest = Manifest::new("estimate-constant", json!({ "N": n, "trials": trials, "seed": seed }));
    println!("estimated Agmon constant: {c_hat:.6}");
    println!("with margin {AGMON_MARGIN}: c_a = {:.6}", consts.agmon);
    println!(
        "derived: ds = {:.6e}, riccati = {:.6e}, local = {:.6e}",
        consts.ds, consts.riccati, consts.local
    );
    manifest.json_artifact(
        &dir,
        "constants.json",
        &json!({ "estimate": c_hat, "margin": AGMON_MARGIN, "constants": consts }),
    )?;
    manifest.finish(&dir, true)?;
    Ok(EXIT_OK)
}
