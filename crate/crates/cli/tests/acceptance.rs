//! Acceptance suite: one PASS/FAIL line per criterion, each under its runtime limit.
//!
//! Runs without the libtest harness so the report is always printed.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::*;
use mfc_core::controller::*;
use mfc_core::export::{trace_to_csv, CSV_HEADER};
use mfc_core::metrics::{compute_metrics, DEFAULT_BAND_PCT};
use mfc_core::plant::{builtin_catalog, Signature, StateSpaceSystem, S1TD, S2TD};
use mfc_core::scenario::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0)
}

fn integration_fidelity() -> Check {
    let mut worst: f64 = 0.0;
    for tau_c in [1.0, 0.02, 1e-3] {
        worst = worst.max(first_order_step_error(tau_c, 1e-4, 10.0 * tau_c));
    }
    ensure(worst < 1e-6, format!("max error {worst:.3e} >= 1e-6"))?;
    let points: Vec<(f64, f64)> = [1e-3, 5e-4, 2.5e-4, 1e-4]
        .iter()
        .map(|&ts| (ts, first_order_step_error(5e-3, ts, 0.05)))
        .collect();
    let slope = log_log_slope(&points);
    ensure(slope >= 3.5, format!("convergence slope {slope:.3} < 3.5"))?;
    Ok(format!("max error {worst:.2e}, slope {slope:.2}"))
}

fn delay_correctness() -> Check {
    let scalar = StateSpaceSystem::first_order("dde", 1.0, 1.0)
        .and_then(|s| s.with_state_delay(DMatrix::from_element(1, 1, -0.5), 0.1))
        .map_err(|e| e.to_string())?;
    let cat = builtin_catalog();
    let mut report = Vec::new();
    for sys in [&scalar, &cat[S1TD].system, &cat[S2TD].system] {
        let (ts, steps) = (1e-3, 1000);
        let sim = simulate(sys, None, 1.0, ts, steps);
        let fine = dde_response(sys, &DVector::zeros(sys.order()), 1.0, ts / 100.0, steps * 100);
        let oracle: Vec<f64> = fine.iter().step_by(100).copied().collect();
        let err = max_abs_diff(&sim, &oracle);
        ensure(err < 1e-4, format!("{}: max error {err:.3e} >= 1e-4", sys.label()))?;
        report.push(format!("{} {err:.1e}", sys.label()));
    }
    Ok(report.join(", "))
}

fn controller_algebra() -> Check {
    let mut failures = Vec::new();
    let mut check = |name: &str, got: f64, want: f64| {
        if !same(got, want) {
            failures.push(format!("{name}: got {got}, want {want}"));
        }
    };

    check("derivative of constant", estimate_derivative(&[3.0, 3.0], 1, 0.1).value, 0.0);
    for ts in [0.5, 0.25, 0.1, 1e-3] {
        let w = [5.0 * ts, 5.0 * 2.0 * ts];
        check("derivative of ramp", estimate_derivative(&w, 1, ts).value, 5.0);
    }
    check("F(0, 1, 0)", estimate_f(0.0, 1.0, 0.0), 0.0);
    check("F(5, 1, 2)", estimate_f(5.0, 1.0, 2.0), 3.0);

    let ipi = |u_prev: f64| IPi::new(UltraLocalConfig { alpha: 2.0, order_n: 1 }, PiGains::new(0.0, 0.0)).with_u_prev(u_prev);
    check("i-PI matched derivatives", ipi(0.7).ipi_update(1.3, 1.3, 0.0, 0.01).map_or(f64::NAN, |o| o.u), 0.7);
    check("i-PI substitution", ipi(1.0).ipi_update(4.0, 2.0, 0.0, 0.01).map_or(f64::NAN, |o| o.u), 0.0);

    let mut g = GainFunction::integrator(1.0);
    let zero = (0..20).map(|_| g.eval(0.0, 0.01)).fold(0.0, |_, v| v);
    check("G of zero error", zero, 0.0);
    let mut g = GainFunction::integrator(2.0);
    let three = (0..3).map(|_| g.eval(1.0, 0.5)).fold(0.0, |_, v| v);
    check("G rectangular rule", three, 3.0);
    let mut g = GainFunction::pure(0.7);
    check("pure gain", g.eval(123.0, 0.1), 0.7);

    check("constant lambda", LambdaProfile::Constant { value: 0.4 }.eval(7.0), 0.4);
    check("exp lambda at 0", LambdaProfile::ExpDecay { initial: 1.0, time_constant: 1.0 }.eval(0.0), 1.0);

    let mut hold = IStarConfig::new(GainFunction::pure(1.0), LambdaProfile::Constant { value: 0.0 }).with_u_prev(0.42);
    for k in 0..10 {
        check("i*-PI with zero lambda", hold.update(0.1 * k as f64, 1.0, k as f64 * 0.01, 0.01).map_or(f64::NAN, |o| o.u), 0.42);
    }
    let mut scale = IStarConfig::new(GainFunction::pure(1.7), LambdaProfile::Constant { value: 0.3 })
        .with_deltas(0.8, 0.8)
        .with_u_prev(2.0);
    check("i*-PI on target", scale.update(0.6, 0.6, 0.0, 0.01).map_or(f64::NAN, |o| o.u), 1.7 * 2.0);
    let mut subst = IStarConfig::new(GainFunction::pure(1.0), LambdaProfile::Constant { value: 0.5 })
        .with_deltas(1.0, 1.0)
        .with_u_prev(2.0);
    check("i*-PI substitution", subst.update(0.0, 1.0, 0.0, 0.01).map_or(f64::NAN, |o| o.u), 1.5);

    check("PI zero error", PiGains::new(2.0, 3.0).update(0.0, 0.1), 0.0);
    check("PI proportional", PiGains::new(2.0, 0.0).update(1.5, 0.1), 3.0);
    let mut pi = PiGains::new(0.0, 1.0);
    let one = (0..10).map(|_| pi.update(1.0, 0.1)).fold(0.0, |_, v| v);
    check("PI rectangular integral", one, 1.0);

    if !failures.is_empty() {
        return Err(failures.join("; "));
    }

    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut runner = TestRunner::new_with_rng(Config { failure_persistence: None, ..Config::with_cases(1000) }, rng);
    runner
        .run(
            &(-1e3f64..1e3, -10.0f64..10.0, -5.0f64..5.0, -100.0f64..100.0, 1e-6f64..0.1),
            |(u_prev, lambda, delta, y, ts)| {
                let mut c = IStarConfig::new(GainFunction::pure(1.0), LambdaProfile::Constant { value: lambda })
                    .with_deltas(delta, delta)
                    .with_u_prev(u_prev);
                prop_assert_eq!(c.update(y, y, 0.0, ts).unwrap().u, u_prev);
                Ok(())
            },
        )
        .map_err(|e| format!("i*-PI fixed point: {e}"))?;

    let rng = TestRng::deterministic_rng(RngAlgorithm::ChaCha);
    let mut runner = TestRunner::new_with_rng(Config { failure_persistence: None, ..Config::with_cases(1000) }, rng);
    runner
        .run(
            &(
                -1e3f64..1e3,
                prop::sample::select(vec![-50.0, -1.0, 0.5, 2.0, 1e4]),
                prop::collection::vec((-1e3f64..1e3, -10.0f64..10.0), 1..20),
                1e-6f64..0.1,
            ),
            |(u0, alpha, steps, ts)| {
                let mut c = IPi::new(UltraLocalConfig { alpha, order_n: 1 }, PiGains::new(0.0, 0.0)).with_u_prev(u0);
                for (d, eps) in steps {
                    prop_assert_eq!(c.ipi_update(d, d, eps, ts).unwrap().u, u0);
                }
                Ok(())
            },
        )
        .map_err(|e| format!("i-PI reduction: {e}"))?;
    Ok("all examples exact; fixed point and reduction hold over 1000 random states each".into())
}

fn regulation() -> Check {
    let mut report = Vec::new();
    for (idx, entry) in builtin_catalog().iter().enumerate() {
        if entry.signature != Signature::MinimumPhase {
            continue;
        }
        for kind in [ControllerKind::Ipi, ControllerKind::Pi] {
            let cfg = regulation_scenario(idx, kind).ok_or("no regulation tuning")?;
            let trace = run_closed_loop(&cfg).map_err(|e| e.to_string())?;
            let last = trace.rows.last().ok_or("empty trace")?;
            ensure(!trace.diverged(), format!("{} {kind}: diverged", cfg.name))?;
            ensure(
                (last.t - 10.0 * entry.dominant_time_constant).abs() < cfg.ts,
                format!("{}: horizon is not ten time constants", cfg.name),
            )?;
            ensure(
                last.eps.abs() < 0.01,
                format!("{} {kind}: final |eps| = {:.3e}", cfg.name, last.eps.abs()),
            )?;
            report.push(last.eps.abs());
        }
    }
    let worst = report.iter().copied().fold(0.0, f64::max);
    Ok(format!("{} runs, worst final |eps| {worst:.2e}", report.len()))
}

fn switching_robustness() -> Check {
    let configs = builtin_scenarios();
    let mut events = 0;
    for (cfg, trace) in configs.iter().zip(run_many(&configs)) {
        let trace = trace.map_err(|e| e.to_string())?;
        let m = compute_metrics(&trace, DEFAULT_BAND_PCT).map_err(|e| e.to_string())?;
        ensure(!m.diverged, format!("{}: diverged", cfg.name))?;
        ensure(
            m.post_switch_recovery.len() == cfg.schedule.events.len(),
            format!("{}: recovery count", cfg.name),
        )?;
        ensure(
            m.post_switch_recovery.iter().all(Option::is_some),
            format!("{}: recovery {:?}", cfg.name, m.post_switch_recovery),
        )?;
        events += m.post_switch_recovery.len();
    }
    Ok(format!("{} scenarios, {events} switch events recovered", configs.len()))
}

fn delay_change_robustness() -> Check {
    let mut report = Vec::new();
    for name in ["fig1td", "fig2td"] {
        let cfg = builtin_scenario(name).ok_or("missing scenario")?.config(ControllerKind::IstarPi);
        let trace = run_closed_loop(&cfg).map_err(|e| e.to_string())?;
        ensure(!trace.diverged(), format!("{name}: diverged"))?;
        let before = trace.rows.iter().rfind(|r| r.t < DELAY_CHANGE_TIME - 1e-9).ok_or("no rows")?;
        let after = trace.rows.iter().find(|r| r.t >= DELAY_CHANGE_TIME - 1e-9).ok_or("no rows")?;
        ensure(
            before.tau == LOOP_DELAY_BEFORE && after.tau == LOOP_DELAY_AFTER,
            format!("{name}: delay column {} -> {}", before.tau, after.tau),
        )?;
        let band = mfc_core::metrics::band_width(&trace, DEFAULT_BAND_PCT);
        let tail: Vec<_> = trace.rows.iter().filter(|r| r.t >= DELAY_CHANGE_TIME - 1e-9).collect();
        let settled_from = tail
            .iter()
            .rposition(|r| r.eps.abs() > band)
            .map_or(Some(0), |i| (i + 1 < tail.len()).then_some(i + 1))
            .ok_or(format!("{name}: not back in the 2% band"))?;
        report.push(format!("{name} in band from t = {:.4}", tail[settled_from].t));
    }
    Ok(report.join(", "))
}

fn exponential_tracking() -> Check {
    let scenario = builtin_scenario("fig5td").ok_or("missing scenario")?;
    let amplitude = match scenario.reference {
        ReferenceTrajectory::ExponentialApproach { amplitude, .. } => amplitude,
        _ => return Err("fig5td reference is not an exponential approach".into()),
    };
    let cfg = scenario.config(ControllerKind::IstarPi);
    ensure(
        cfg.bank[cfg.schedule.initial.plant].state_delay().is_some(),
        "fig5td plant has no state delay",
    )?;
    let trace = run_closed_loop(&cfg).map_err(|e| e.to_string())?;
    ensure(!trace.diverged(), "diverged")?;
    let last = trace.rows.last().ok_or("empty trace")?;
    let rel = last.eps.abs() / amplitude.abs();
    ensure(rel < 0.05, format!("final |eps| = {rel:.3e} of the amplitude"))?;
    // The transient is over by half the horizon; from there |eps| may only shrink.
    let half = cfg.horizon / 2.0;
    let tail: Vec<f64> = trace.rows.iter().filter(|r| r.t >= half).map(|r| r.eps.abs()).collect();
    if let Some(i) = tail.windows(2).position(|w| w[1] > w[0]) {
        return Err(format!("|eps| increases at t = {:.3}", half + i as f64 * cfg.ts));
    }
    Ok(format!("final |eps| {:.2e} of amplitude, non-increasing from t = {half}", rel))
}

fn determinism_and_format() -> Check {
    let cfg = builtin_scenario("fig1").ok_or("missing scenario")?.config(ControllerKind::IstarPi);
    let a = trace_to_csv(&run_closed_loop(&cfg).map_err(|e| e.to_string())?);
    let b = trace_to_csv(&run_closed_loop(&cfg).map_err(|e| e.to_string())?);
    ensure(a == b, "in-process CSVs differ")?;

    let dir = std::env::temp_dir().join(format!("mfc-acceptance-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    let bin = env!("CARGO_BIN_EXE_mfc-lab");
    let run = |args: &[&str]| -> Result<i32, String> {
        let out = Command::new(bin)
            .args(args)
            .env_remove("MFC_LAB_OUT")
            .output()
            .map_err(|e| e.to_string())?;
        out.status.code().ok_or_else(|| "killed by signal".to_string())
    };
    let mut files = Vec::new();
    for sub in ["a", "b"] {
        let out = dir.join(sub);
        let code = run(&["run", "--scenario", "fig1", "--controller", "istar_pi", "--out", out.to_str().unwrap()])?;
        ensure(code == 0, format!("run exited {code}"))?;
        files.push(fs::read(out.join("trace.csv")).map_err(|e| e.to_string())?);
    }
    ensure(files[0] == files[1], "CLI CSVs differ")?;
    ensure(files[0] == a.as_bytes(), "CLI CSV differs from the library CSV")?;
    let text = String::from_utf8(files[0].clone()).map_err(|e| e.to_string())?;
    ensure(text.starts_with(&format!("{CSV_HEADER}\n")), "header")?;
    ensure(CSV_HEADER == "t,y_ref,y,u,eps,p,tau,gain_value", "header literal")?;
    ensure(!text.contains('\r'), "CR in CSV")?;

    let code = run(&["run", "--scenario", "fig1", "--ts", "0", "--out", dir.join("c").to_str().unwrap()])?;
    ensure(code == 2, format!("config error exited {code}"))?;
    let unstable = dir.join("unstable.json");
    fs::write(&unstable, r#"{"scenario": "fig1", "controller": {"kind": "pi", "kp": -40.0, "ki": 0.0}}"#)
        .map_err(|e| e.to_string())?;
    let out = dir.join("d");
    let code = run(&["run", "--config", unstable.to_str().unwrap(), "--out", out.to_str().unwrap()])?;
    ensure(code == 3, format!("diverged run exited {code}"))?;
    ensure(out.join("trace.csv").is_file(), "diverged run left no trace")?;
    let _ = fs::remove_dir_all(&dir);
    Ok(format!("{} bytes identical across runs; exit codes 0/2/3", files[0].len()))
}

fn non_minimum_phase_signature() -> Check {
    let mut report = Vec::new();
    for entry in builtin_catalog() {
        if entry.signature != Signature::NonMinimumPhase {
            continue;
        }
        let ts = entry.dominant_time_constant / 200.0;
        let y = simulate(&entry.system, None, 1.0, ts, 4000);
        let (i_min, min) = y
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
        let last = *y.last().ok_or("empty response")?;
        ensure(min < 0.0, format!("{}: no undershoot", entry.system.label()))?;
        ensure(last > 0.0 && (last - 1.0).abs() < 0.01, format!("{}: settles at {last}", entry.system.label()))?;
        ensure(i_min < y.len() / 2, format!("{}: minimum not in the initial transient", entry.system.label()))?;
        report.push(format!("{} min {min:.3}", entry.system.label()));
    }
    ensure(report.len() >= 2, "fewer than two non-minimum-phase entries")?;
    Ok(report.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Check); 9] = [
        ("integration fidelity", Duration::from_secs(1), integration_fidelity),
        ("delay correctness", Duration::from_secs(5), delay_correctness),
        ("controller algebra", Duration::from_secs(30), controller_algebra),
        ("regulation", Duration::from_secs(5), regulation),
        ("switching robustness", Duration::from_secs(30), switching_robustness),
        ("delay-change robustness", Duration::from_secs(5), delay_change_robustness),
        ("exponential tracking", Duration::from_secs(5), exponential_tracking),
        ("determinism and format", Duration::from_secs(60), determinism_and_format),
        ("non-minimum-phase signature", Duration::from_secs(5), non_minimum_phase_signature),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = run();
        let elapsed = started.elapsed();
        let result = match result {
            Ok(detail) if elapsed > *limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({elapsed:.2?})", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{}] {name}: {why} ({elapsed:.2?})", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
