//! Browser bindings. Every export returns a JSON string; errors surface as
//! JavaScript exceptions carrying the message.

use mfc_core::controller::{ControllerConfig, ControllerKind, LambdaProfile};
use mfc_core::metrics::{compute_metrics, DEFAULT_BAND_PCT};
use mfc_core::plant::{builtin_catalog, PlantRuntime};
use mfc_core::scenario::{builtin_catalog_scenarios, builtin_scenario, run_closed_loop, ScenarioConfig, SimTrace};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Samples drawn per curve; longer traces are decimated.
const MAX_POINTS: usize = 1500;
const STEP_SAMPLES: usize = 1000;

#[derive(Serialize)]
struct Series {
    t: Vec<f64>,
    y_ref: Vec<f64>,
    y: Vec<f64>,
    u: Vec<f64>,
    switches: Vec<f64>,
}

fn series(trace: &SimTrace, switches: Vec<f64>) -> Series {
    let stride = trace.rows.len().div_ceil(MAX_POINTS).max(1);
    let rows: Vec<_> = trace.rows.iter().step_by(stride).collect();
    Series {
        t: rows.iter().map(|r| r.t).collect(),
        y_ref: rows.iter().map(|r| r.y_ref).collect(),
        y: rows.iter().map(|r| r.y).collect(),
        u: rows.iter().map(|r| r.u).collect(),
        switches,
    }
}

fn scenario_config(name: &str, kind: ControllerKind) -> Result<ScenarioConfig, String> {
    builtin_scenario(name)
        .map(|s| s.config(kind))
        .ok_or_else(|| format!("unknown scenario `{name}`"))
}

fn run(config: &ScenarioConfig) -> Result<Value, String> {
    let trace = run_closed_loop(config).map_err(|e| e.to_string())?;
    let metrics = compute_metrics(&trace, DEFAULT_BAND_PCT).map_err(|e| e.to_string())?;
    Ok(json!({
        "controller": config.controller.kind().name(),
        "series": series(&trace, config.schedule.switch_times()),
        "metrics": metrics,
    }))
}

pub fn scenarios_json() -> String {
    let list: Vec<Value> = builtin_catalog_scenarios()
        .iter()
        .map(|s| json!({ "name": s.name, "description": s.description, "horizon": s.horizon, "ts": s.ts }))
        .collect();
    Value::Array(list).to_string()
}

/// One closed-loop run. `lambda` and `k_i` override the i*-PI tuning when given.
pub fn simulate_json(scenario: &str, controller: &str, lambda: Option<f64>, k_i: Option<f64>) -> Result<String, String> {
    let kind: ControllerKind = controller.parse().map_err(|e: mfc_core::Error| e.to_string())?;
    let mut config = scenario_config(scenario, kind)?;
    if let ControllerConfig::IstarPi(c) = &mut config.controller {
        if let Some(value) = lambda {
            c.lambda = LambdaProfile::Constant { value };
        }
        if let Some(k) = k_i {
            let g0 = c.gain.k_i * c.gain.accumulator_init;
            c.gain.k_i = k;
            c.gain.accumulator_init = g0 / k;
        }
    }
    config.validate().map_err(|e| e.to_string())?;
    run(&config).map(|v| v.to_string())
}

/// All three controllers on one scenario with their default tunings.
pub fn compare_json(scenario: &str) -> Result<String, String> {
    let runs = ControllerKind::ALL
        .iter()
        .map(|&k| run(&scenario_config(scenario, k)?))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Value::Array(runs).to_string())
}

/// Open-loop unit step of one bank plant over ten dominant time constants.
pub fn step_response_json(index: usize) -> Result<String, String> {
    let catalog = builtin_catalog();
    let entry = catalog.get(index).ok_or_else(|| format!("no plant at index {index}"))?;
    let bank = [entry.system.clone()];
    let horizon = 10.0 * entry.dominant_time_constant;
    let ts = horizon / STEP_SAMPLES as f64;
    let mut rt = PlantRuntime::new(&bank, 0, None, horizon).map_err(|e| e.to_string())?;
    let mut t = vec![0.0];
    let mut y = vec![rt.measure(&bank).map_err(|e| e.to_string())?];
    for k in 1..=STEP_SAMPLES {
        y.push(rt.zoh_step(&bank, 1.0, ts).map_err(|e| e.to_string())?);
        t.push(k as f64 * ts);
    }
    Ok(json!({
        "label": entry.system.label(),
        "transfer_function": entry.transfer_function,
        "signature": entry.signature,
        "t": t,
        "y": y,
    })
    .to_string())
}

pub fn plants_json() -> String {
    let list: Vec<Value> = builtin_catalog()
        .iter()
        .map(|e| json!({ "label": e.system.label(), "transfer_function": e.transfer_function, "signature": e.signature }))
        .collect();
    Value::Array(list).to_string()
}

#[wasm_bindgen]
pub fn scenarios() -> String {
    scenarios_json()
}

#[wasm_bindgen]
pub fn plants() -> String {
    plants_json()
}

#[wasm_bindgen]
pub fn simulate(scenario: &str, controller: &str, lambda: Option<f64>, k_i: Option<f64>) -> Result<String, JsError> {
    simulate_json(scenario, controller, lambda, k_i).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn compare(scenario: &str) -> Result<String, JsError> {
    compare_json(scenario).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn step_response(index: usize) -> Result<String, JsError> {
    step_response_json(index).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn lists_every_scenario_and_plant() {
        assert_eq!(parse(&scenarios_json()).as_array().unwrap().len(), builtin_catalog_scenarios().len());
        assert_eq!(parse(&plants_json()).as_array().unwrap().len(), builtin_catalog().len());
    }

    #[test]
    fn simulate_returns_decimated_series() {
        let v = parse(&simulate_json("fig1", "istar_pi", None, None).unwrap());
        let t = v["series"]["t"].as_array().unwrap();
        assert!(t.len() <= MAX_POINTS && t.len() > 100);
        assert_eq!(v["metrics"]["diverged"], false);
        assert_eq!(v["series"]["switches"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn overrides_change_the_run() {
        let base = simulate_json("fig1", "istar_pi", None, None).unwrap();
        assert_eq!(simulate_json("fig1", "istar_pi", Some(-0.04), Some(2.0)).unwrap(), base);
        assert_ne!(simulate_json("fig1", "istar_pi", Some(-0.02), None).unwrap(), base);
    }

    #[test]
    fn bad_input_is_an_error() {
        assert!(simulate_json("nope", "pi", None, None).is_err());
        assert!(simulate_json("fig1", "pid", None, None).is_err());
        assert!(simulate_json("fig1", "istar_pi", None, Some(0.0)).is_err());
        assert!(step_response_json(99).is_err());
    }

    #[test]
    fn compare_runs_all_controllers() {
        let v = parse(&compare_json("fig2").unwrap());
        let names: Vec<_> = v.as_array().unwrap().iter().map(|r| r["controller"].as_str().unwrap().to_string()).collect();
        assert_eq!(names, ["pi", "ipi", "istar_pi"]);
    }

    #[test]
    fn step_response_shows_undershoot_for_s2() {
        let v = parse(&step_response_json(1).unwrap());
        let y: Vec<f64> = v["y"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
        assert!(y.iter().cloned().fold(f64::INFINITY, f64::min) < 0.0);
        assert!((y.last().unwrap() - 1.0).abs() < 1e-3);
    }
}
