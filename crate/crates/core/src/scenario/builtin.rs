//! Builtin experiments: the switching sequences and switching instants of the
//! reference experiments, driven over the builtin bank.
//!
//! The setpoint is a unit step at `t = 0` unless noted. Each scenario carries a
//! tuning for every controller kind; the i*-PI tunings use an integrator gain
//! function started at `G = 1`.

use super::reference::ReferenceTrajectory;
use super::run::ScenarioConfig;
use super::schedule::{Mode, SwitchingSchedule};
use crate::controller::{
    ControllerConfig, ControllerKind, GainFunction, IPi, IStarConfig, LambdaProfile, PiGains,
    UltraLocalConfig,
};
use crate::plant::{
    builtin_bank, S1, S1TD, S2, S2TD, S3, S4, S5, S6, S7, S8, TAU1, TAU2, TAU3,
};

/// Output delays used by the delay-change scenarios, before and after `t = 0.06 s`.
pub const LOOP_DELAY_BEFORE: f64 = 0.0005;
pub const LOOP_DELAY_AFTER: f64 = 0.001;
pub const DELAY_CHANGE_TIME: f64 = 0.06;

#[derive(Debug, Clone)]
pub struct Tunings {
    pub pi: PiGains,
    pub ipi: IPi,
    pub istar: IStarConfig,
}

impl Tunings {
    pub fn controller(&self, kind: ControllerKind) -> ControllerConfig {
        match kind {
            ControllerKind::Pi => ControllerConfig::Pi(self.pi.clone()),
            ControllerKind::Ipi => ControllerConfig::Ipi(self.ipi.clone()),
            ControllerKind::IstarPi => ControllerConfig::IstarPi(self.istar.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuiltinScenario {
    pub name: &'static str,
    pub description: &'static str,
    pub schedule: SwitchingSchedule,
    pub reference: ReferenceTrajectory,
    pub ts: f64,
    pub horizon: f64,
    pub tunings: Tunings,
}

impl BuiltinScenario {
    pub fn config(&self, kind: ControllerKind) -> ScenarioConfig {
        ScenarioConfig {
            name: self.name.to_string(),
            bank: builtin_bank(),
            schedule: self.schedule.clone(),
            reference: self.reference.clone(),
            controller: self.tunings.controller(kind),
            ts: self.ts,
            horizon: self.horizon,
            actuator_limit: None,
        }
    }
}

fn istar(lambda: f64, k_i: f64) -> IStarConfig {
    IStarConfig::new(
        GainFunction::integrator_from(k_i, 1.0),
        LambdaProfile::Constant { value: lambda },
    )
}

fn ipi(alpha: f64, kp: f64, ki: f64) -> IPi {
    IPi::new(UltraLocalConfig { alpha, order_n: 1 }, PiGains::new(kp, ki))
}

fn fast_tunings() -> Tunings {
    Tunings {
        pi: PiGains::new(0.3, 600.0),
        ipi: ipi(1.0e4, 0.03, 0.0),
        istar: istar(-0.04, 2.0),
    }
}

fn delayed_tunings() -> Tunings {
    Tunings {
        pi: PiGains::new(0.2, 400.0),
        ipi: ipi(2.0e4, 0.02, 0.0),
        istar: istar(-0.025, 2.0),
    }
}

fn slow_tunings() -> Tunings {
    Tunings {
        pi: PiGains::new(0.2, 15.0),
        ipi: ipi(2.0e3, 0.02, 0.0),
        istar: istar(-0.02, 0.002),
    }
}

fn state_delay_tunings() -> Tunings {
    Tunings {
        istar: istar(-0.04, 0.08),
        ..slow_tunings()
    }
}

fn step_schedule(initial: usize, events: &[(f64, usize)]) -> SwitchingSchedule {
    SwitchingSchedule::new(
        Mode::plant(initial),
        events.iter().map(|&(t, p)| (t, Mode::plant(p))).collect(),
    )
}

/// Switching `S2 -> S4 -> S1` plus a loop-delay change at `t = 0.06 s`.
fn delay_change_schedule(t1: f64, t2: f64) -> SwitchingSchedule {
    let delay = |t: f64| {
        if t >= DELAY_CHANGE_TIME {
            LOOP_DELAY_AFTER
        } else {
            LOOP_DELAY_BEFORE
        }
    };
    let active_at_change = if t2 <= DELAY_CHANGE_TIME { S1 } else { S4 };
    let mut events = vec![(t1, S4), (t2, S1), (DELAY_CHANGE_TIME, active_at_change)];
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    SwitchingSchedule::new(
        Mode::plant(S2).with_output_delay(LOOP_DELAY_BEFORE),
        events
            .into_iter()
            .map(|(t, p)| (t, Mode::plant(p).with_output_delay(delay(t))))
            .collect(),
    )
}

pub fn builtin_catalog_scenarios() -> Vec<BuiltinScenario> {
    let unit = ReferenceTrajectory::unit_step;
    vec![
        BuiltinScenario {
            name: "fig1",
            description: "S2 -> S4 -> S1, switches at 0.01 s and 0.05 s",
            schedule: step_schedule(S2, &[(0.01, S4), (0.05, S1)]),
            reference: unit(),
            ts: 1e-4,
            horizon: 0.1,
            tunings: fast_tunings(),
        },
        BuiltinScenario {
            name: "fig2",
            description: "S2 -> S3 -> S5, switches at 0.025 s and 0.072 s",
            schedule: step_schedule(S2, &[(0.025, S3), (0.072, S5)]),
            reference: unit(),
            ts: 1e-4,
            horizon: 0.12,
            tunings: fast_tunings(),
        },
        BuiltinScenario {
            name: "fig3",
            description: "S1 -> S2 -> S4 -> S5, switches at 0.018 s, 0.035 s and 0.072 s",
            schedule: step_schedule(S1, &[(0.018, S2), (0.035, S4), (0.072, S5)]),
            reference: unit(),
            ts: 1e-4,
            horizon: 0.12,
            tunings: fast_tunings(),
        },
        BuiltinScenario {
            name: "fig4",
            description: "S6 -> S8 -> S7, switches at 0.35 s and 0.58 s",
            schedule: step_schedule(S6, &[(0.35, S8), (0.58, S7)]),
            reference: unit(),
            ts: 1e-3,
            horizon: 1.2,
            tunings: slow_tunings(),
        },
        BuiltinScenario {
            name: "fig1td",
            description: "S2 -> S4 -> S1, switches at 0.015 s and 0.055 s, loop delay 0.5 ms -> 1 ms at 0.06 s",
            schedule: delay_change_schedule(0.015, 0.055),
            reference: unit(),
            ts: 1e-4,
            horizon: 0.12,
            tunings: delayed_tunings(),
        },
        BuiltinScenario {
            name: "fig2td",
            description: "S2 -> S4 -> S1, switches at 0.025 s and 0.072 s, loop delay 0.5 ms -> 1 ms at 0.06 s",
            schedule: delay_change_schedule(0.025, 0.072),
            reference: unit(),
            ts: 1e-4,
            horizon: 0.14,
            tunings: delayed_tunings(),
        },
        BuiltinScenario {
            name: "fig5td",
            description: "exponential tracking of S1TD(tau1), y* = 1 - exp(-t / 0.1)",
            schedule: SwitchingSchedule::fixed(Mode::plant(S1TD).with_state_delay(TAU1)),
            reference: ReferenceTrajectory::ExponentialApproach {
                amplitude: 1.0,
                time_constant: 0.1,
            },
            ts: 1e-3,
            horizon: 1.0,
            tunings: state_delay_tunings(),
        },
        BuiltinScenario {
            name: "fig6td",
            description: "S2TD(tau3) -> S1TD(tau1) -> S1TD(tau2) -> S1TD(tau3), switches at 0.2 s, 0.6 s and 0.8 s",
            schedule: SwitchingSchedule::new(
                Mode::plant(S2TD).with_state_delay(TAU3),
                vec![
                    (0.2, Mode::plant(S1TD).with_state_delay(TAU1)),
                    (0.6, Mode::plant(S1TD).with_state_delay(TAU2)),
                    (0.8, Mode::plant(S1TD).with_state_delay(TAU3)),
                ],
            ),
            reference: unit(),
            ts: 1e-3,
            horizon: 1.2,
            tunings: state_delay_tunings(),
        },
    ]
}

pub fn builtin_scenario(name: &str) -> Option<BuiltinScenario> {
    builtin_catalog_scenarios().into_iter().find(|s| s.name == name)
}

/// Every builtin scenario configured with its i*-PI tuning.
pub fn builtin_scenarios() -> Vec<ScenarioConfig> {
    builtin_catalog_scenarios()
        .iter()
        .map(|s| s.config(ControllerKind::IstarPi))
        .collect()
}

/// Unit-step regulation of a single bank plant over ten dominant time constants.
pub fn regulation_scenario(plant: usize, kind: ControllerKind) -> Option<ScenarioConfig> {
    let entry = crate::plant::builtin_catalog().into_iter().nth(plant)?;
    let tau = entry.dominant_time_constant;
    let (tunings, ts) = regulation_tunings(plant)?;
    Some(ScenarioConfig {
        name: format!("regulate-{}", entry.system.label()),
        bank: builtin_bank(),
        schedule: SwitchingSchedule::fixed(Mode::plant(plant)),
        reference: ReferenceTrajectory::unit_step(),
        controller: tunings.controller(kind),
        ts,
        horizon: 10.0 * tau,
        actuator_limit: None,
    })
}

/// Tuning and sample time for single-plant regulation.
fn regulation_tunings(plant: usize) -> Option<(Tunings, f64)> {
    let t = match plant {
        S1 => Tunings {
            pi: PiGains::new(1.2, 1500.0),
            ipi: ipi(1.0e4, 0.2, 0.0),
            istar: istar(-0.01, 0.002),
        },
        S3 => Tunings {
            pi: PiGains::new(0.05, 480.0),
            ipi: ipi(1.2e4, 0.1, 0.0),
            istar: istar(-0.005, 0.002),
        },
        S5 => Tunings {
            pi: PiGains::new(0.1, 560.0),
            ipi: ipi(8000.0, 0.1, 0.0),
            istar: istar(-0.005, 0.002),
        },
        S6 => Tunings {
            pi: PiGains::new(1.2, 75.0),
            ipi: ipi(500.0, 0.2, 0.0),
            istar: istar(-0.01, 0.01),
        },
        S8 => Tunings {
            pi: PiGains::new(0.8, 42.0),
            ipi: ipi(420.0, 0.1, 0.0),
            istar: istar(-0.002, 0.0005),
        },
        S2 | S4 => return Some((fast_tunings(), 1e-4)),
        S7 => return Some((slow_tunings(), 1e-3)),
        S1TD | S2TD => return Some((state_delay_tunings(), 1e-3)),
        _ => return None,
    };
    let ts = if matches!(plant, S6 | S8) { 1e-4 } else { 1e-5 };
    Some((t, ts))
}
