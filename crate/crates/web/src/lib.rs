//! Browser bindings: each export returns a JSON string.

use serde_json::json;
use wasm_bindgen::prelude::*;

use nslab::{
    energy_check, epoch_report, estimate_agmon_constant, run, Datum, DerivedConstants, Scheme, SolverConfig, Trajectory,
};

fn js(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn integrate(datum: &str, amplitude: f64, n: usize, cutoff: f64, dt: f64, horizon: f64, seed: u64) -> Result<Trajectory, JsValue> {
    let datum = Datum::from_name(datum, amplitude, seed, 2.0).map_err(js)?;
    run(&SolverConfig::new(n, Scheme::galerkin(cutoff), datum, dt, horizon)).map_err(js)
}

/// Galerkin run: norm curves and the energy budget `|v|^2 + 2 int D^2`.
#[wasm_bindgen]
pub fn simulate(datum: &str, amplitude: f64, n: usize, cutoff: f64, dt: f64, horizon: f64, seed: u64) -> Result<String, JsValue> {
    let traj = integrate(datum, amplitude, n, cutoff, dt, horizon, seed)?;
    let energy = energy_check(&traj).map_err(js)?;
    Ok(json!({
        "t": traj.times(),
        "l2": traj.series(|s| s.l2),
        "dirichlet": traj.series(|s| s.dirichlet),
        "laplacian_l2": traj.series(|s| s.laplacian_l2),
        "budget": energy.lhs,
        "energy_pass": energy.pass,
        "blowup": traj.blowup.as_ref().map(|b| b.time),
    })
    .to_string())
}

/// Epoch report of a Galerkin run for threshold `eta` and Agmon constant `c`.
#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn epoch_cover(
    datum: &str,
    amplitude: f64,
    n: usize,
    cutoff: f64,
    dt: f64,
    horizon: f64,
    eta: f64,
    c: f64,
) -> Result<String, JsValue> {
    let traj = integrate(datum, amplitude, n, cutoff, dt, horizon, 1)?;
    let report = epoch_report(&traj, None, eta, &DerivedConstants::from_agmon(c)).map_err(js)?;
    Ok(json!({
        "t": traj.times(),
        "dirichlet": traj.series(|s| s.dirichlet),
        "report": report,
    })
    .to_string())
}

/// Random-field estimate of the Agmon-type constant with derived constants.
#[wasm_bindgen]
pub fn agmon_estimate(n: usize, trials: usize, seed: u64, margin: f64) -> Result<String, JsValue> {
    let c_hat = estimate_agmon_constant(n, trials, seed).map_err(js)?;
    Ok(json!({
        "estimate": c_hat,
        "constants": DerivedConstants::calibrated(c_hat, margin),
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn exports_return_json() {
        let v: Value = serde_json::from_str(&simulate("kolmogorov", 1.0, 8, 2.0, 0.05, 0.5, 0).unwrap()).unwrap();
        assert_eq!(v["t"].as_array().unwrap().len(), 11);
        assert_eq!(v["energy_pass"], true);

        let v: Value = serde_json::from_str(&epoch_cover("zero", 1.0, 8, 2.0, 0.05, 0.5, 1.0, 0.4).unwrap()).unwrap();
        assert_eq!(v["report"]["theta"], 0.0);

        let v: Value = serde_json::from_str(&agmon_estimate(8, 5, 1, 0.5).unwrap()).unwrap();
        assert!(v["estimate"].as_f64().unwrap() > 0.0);
    }
}
