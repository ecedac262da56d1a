use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::reference::ReferenceTrajectory;
use super::schedule::{SwitchingSchedule, TIME_EPS};
use crate::controller::ControllerConfig;
use crate::error::{Error, Result};
use crate::plant::{PlantRuntime, StateSpaceSystem};

/// Largest accepted `horizon / ts`.
pub const MAX_SAMPLES: f64 = 1e8;

/// A closed-loop experiment, fully deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub bank: Vec<StateSpaceSystem>,
    pub schedule: SwitchingSchedule,
    pub reference: ReferenceTrajectory,
    pub controller: ControllerConfig,
    pub ts: f64,
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actuator_limit: Option<f64>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ts > 0.0) || !self.ts.is_finite() {
            return Err(Error::field("ts", "must be > 0"));
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(Error::field("horizon", "must be > 0"));
        }
        if self.horizon / self.ts > MAX_SAMPLES {
            return Err(Error::field("horizon", "horizon / ts must not exceed 1e8 samples"));
        }
        if self.bank.is_empty() {
            return Err(Error::field("bank", "must contain at least one plant"));
        }
        if let Some(limit) = self.actuator_limit {
            if !(limit > 0.0) {
                return Err(Error::field("actuator_limit", "must be > 0"));
            }
        }
        self.schedule.validate(self.bank.len())?;
        self.reference.validate()?;
        self.controller.validate()
    }

    /// `floor(horizon / ts) + 1`, tolerant of rounding in the quotient.
    pub fn sample_count(&self) -> usize {
        (self.horizon / self.ts + 1e-9).floor() as usize + 1
    }

    /// History span needed to serve every delay the bank and schedule request.
    pub fn history_capacity(&self) -> f64 {
        let bank_max = self
            .bank
            .iter()
            .flat_map(|s| [Some(s.output_delay()), s.state_delay().map(|d| d.tau)])
            .flatten()
            .fold(0.0, f64::max);
        bank_max.max(self.schedule.max_delay())
    }

    /// SHA-256 of the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// One sample of a closed-loop run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: f64,
    pub y_ref: f64,
    pub y: f64,
    pub u: f64,
    pub eps: f64,
    pub p: usize,
    /// State delay of the active plant if it has one, else its output delay.
    pub tau: f64,
    pub gain_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    /// Trace truncated at the last finite sample.
    Diverged { time: f64, reason: String },
}

#[derive(Debug, Clone)]
pub struct SimTrace {
    pub scenario: String,
    pub rows: Vec<TraceRow>,
    pub switch_times: Vec<f64>,
    pub outcome: Outcome,
    pub ts: f64,
    pub horizon: f64,
    pub config_digest: String,
    pub wall_time: Duration,
}

impl SimTrace {
    pub fn diverged(&self) -> bool {
        matches!(self.outcome, Outcome::Diverged { .. })
    }

    pub fn column(&self, f: impl Fn(&TraceRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

/// Runs the loop measure -> control -> actuate -> integrate for every sample.
///
/// Plant divergence or a controller fault truncates the trace and marks it
/// diverged. Only configuration problems return `Err`.
pub fn run_closed_loop(config: &ScenarioConfig) -> Result<SimTrace> {
    config.validate()?;
    let started = Instant::now();
    let bank = &config.bank;
    let ts = config.ts;
    let samples = config.sample_count();
    let events = &config.schedule.events;

    let mut controller = config.controller.clone();
    controller.reset();
    let initial = config.schedule.initial;
    let mut plant = PlantRuntime::new(bank, initial.plant, None, config.history_capacity())?;
    plant.set_delays(initial.output_delay, initial.state_delay);

    let mut rows = Vec::with_capacity(samples);
    let mut outcome = Outcome::Completed;
    let mut cursor = 0;
    for k in 0..samples {
        let t = k as f64 * ts;
        while cursor < events.len() && events[cursor].time <= t + TIME_EPS {
            let ev = &events[cursor];
            plant.switch_active(bank, ev.plant)?;
            plant.set_delays(ev.output_delay, ev.state_delay);
            cursor += 1;
        }

        let y = plant.measure(bank)?;
        let y_ref = config.reference.eval(t);
        let eps = y_ref - y;
        let out = match controller.update(t, y, y_ref, ts) {
            Ok(out) => out,
            Err(fault) => {
                outcome = Outcome::Diverged {
                    time: t,
                    reason: format!("controller fault: {fault}"),
                };
                break;
            }
        };
        let u = match config.actuator_limit {
            Some(limit) => out.u.clamp(-limit, limit),
            None => out.u,
        };
        let tau = plant
            .effective_state_delay(bank)
            .unwrap_or_else(|| plant.effective_output_delay(bank));
        rows.push(TraceRow {
            t,
            y_ref,
            y,
            u,
            eps,
            p: plant.active_index(),
            tau,
            gain_value: out.gain_value,
        });

        if k + 1 < samples {
            match plant.zoh_step(bank, u, ts) {
                Ok(_) => {}
                Err(Error::Diverged { time }) => {
                    outcome = Outcome::Diverged {
                        time,
                        reason: "plant state diverged".into(),
                    };
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }

    Ok(SimTrace {
        scenario: config.name.clone(),
        rows,
        switch_times: config.schedule.switch_times(),
        outcome,
        ts,
        horizon: config.horizon,
        config_digest: config.digest(),
        wall_time: started.elapsed(),
    })
}

/// Runs independent configurations on separate threads, preserving order.
pub fn run_many(configs: &[ScenarioConfig]) -> Vec<Result<SimTrace>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || run_closed_loop(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    })
}
