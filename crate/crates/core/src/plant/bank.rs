//! Builtin plant bank.
//!
//! Eight switching plants (`S1`..`S8`) and two state-delay plants (`S1TD`,
//! `S2TD`). `S1`..`S5` are fast (millisecond time constants) and serve the
//! scenarios with switching instants below 0.1 s; `S6`..`S8` and the delay
//! plants run on a one-second horizon. Every entry has unit DC gain.
//!
//! Second-order entries share one scaled observable form with `y = x1`, so a
//! switch between two of them keeps the output continuous:
//! `x1' = -a1 x1 + w x2 + b1 u`, `x2' = -w x1 + w u` for
//! `(b1 s + w^2) / (s^2 + a1 s + w^2)`.

use nalgebra::{DMatrix, DVector, RowDVector};
use serde::Serialize;

use super::system::StateSpaceSystem;

/// Delay values selectable for the state-delay plants.
pub const TAU1: f64 = 0.01;
pub const TAU2: f64 = 0.025;
pub const TAU3: f64 = 0.05;

pub const S1: usize = 0;
pub const S2: usize = 1;
pub const S3: usize = 2;
pub const S4: usize = 3;
pub const S5: usize = 4;
pub const S6: usize = 5;
pub const S7: usize = 6;
pub const S8: usize = 7;
pub const S1TD: usize = 8;
pub const S2TD: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Signature {
    MinimumPhase,
    NonMinimumPhase,
    StateDelay,
}

impl Signature {
    /// Expected shape of the unit-step response.
    pub fn step_response(self) -> &'static str {
        match self {
            Signature::MinimumPhase => "monotone or damped rise to the DC gain",
            Signature::NonMinimumPhase => "initial undershoot below zero, then rise to the DC gain",
            Signature::StateDelay => "rise with a kink where the delayed state feedback arrives",
        }
    }
}

/// A bank plant together with its documentation.
#[derive(Debug, Clone)]
pub struct BankEntry {
    pub system: StateSpaceSystem,
    pub transfer_function: String,
    pub signature: Signature,
    /// Slowest decay time constant of the free response, in seconds.
    pub dominant_time_constant: f64,
}

fn first_order(label: &str, a: f64) -> BankEntry {
    BankEntry {
        system: StateSpaceSystem::first_order(label, a, a).expect("valid plant"),
        transfer_function: format!("{a}/(s+{a})"),
        signature: Signature::MinimumPhase,
        dominant_time_constant: 1.0 / a,
    }
}

/// `(b1 s + w^2) / (s^2 + a1 s + w^2)` in the scaled observable form.
fn observable(label: &str, a1: f64, w: f64, b1: f64) -> StateSpaceSystem {
    let a = DMatrix::from_row_slice(2, 2, &[-a1, w, -w, 0.0]);
    let b = DVector::from_vec(vec![b1, w]);
    let c = RowDVector::from_vec(vec![1.0, 0.0]);
    StateSpaceSystem::new(label, a, b, c).expect("valid plant")
}

fn second_order(label: &str, wn: f64, zeta: f64) -> BankEntry {
    let decay = if zeta < 1.0 {
        zeta * wn
    } else {
        wn * (zeta - (zeta * zeta - 1.0).sqrt())
    };
    BankEntry {
        system: observable(label, 2.0 * zeta * wn, wn, 0.0),
        transfer_function: format!("{}/(s^2+{}s+{})", wn * wn, 2.0 * zeta * wn, wn * wn),
        signature: Signature::MinimumPhase,
        dominant_time_constant: 1.0 / decay,
    }
}

/// `ab (1 - s/z) / ((s+a)(s+b))`, `0 < a < b`, `z > 0`.
fn non_minimum_phase(label: &str, z: f64, a: f64, b: f64) -> BankEntry {
    BankEntry {
        system: observable(label, a + b, (a * b).sqrt(), -a * b / z),
        transfer_function: format!("{}(1-s/{z})/((s+{a})(s+{b}))", a * b),
        signature: Signature::NonMinimumPhase,
        dominant_time_constant: 1.0 / a,
    }
}

fn scalar_state_delay(label: &str, a: f64, a_tau: f64, tau: f64) -> BankEntry {
    let b = a + a_tau;
    let sys = StateSpaceSystem::first_order(label, a, b)
        .and_then(|s| s.with_state_delay(DMatrix::from_element(1, 1, -a_tau), tau))
        .expect("valid plant");
    BankEntry {
        system: sys,
        transfer_function: format!("{b}/(s+{a}+{a_tau}e^(-s tau))"),
        signature: Signature::StateDelay,
        dominant_time_constant: 1.0 / (a - a_tau),
    }
}

/// `x1' = wn x2`, `x2' = -wn x1 - 2 zeta wn x2 - k wn x1(t-tau) + (1+k) wn u`.
fn second_order_state_delay(label: &str, wn: f64, zeta: f64, k: f64, tau: f64) -> BankEntry {
    let a = DMatrix::from_row_slice(2, 2, &[0.0, wn, -wn, -2.0 * zeta * wn]);
    let a_tau = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, -k * wn, 0.0]);
    let b = DVector::from_vec(vec![0.0, (1.0 + k) * wn]);
    let c = RowDVector::from_vec(vec![1.0, 0.0]);
    let sys = StateSpaceSystem::new(label, a, b, c)
        .and_then(|s| s.with_state_delay(a_tau, tau))
        .expect("valid plant");
    BankEntry {
        system: sys,
        transfer_function: format!(
            "{}/(s^2+{}s+{}+{}e^(-s tau))",
            (1.0 + k) * wn * wn,
            2.0 * zeta * wn,
            wn * wn,
            k * wn * wn
        ),
        signature: Signature::StateDelay,
        dominant_time_constant: 1.0 / (zeta * wn * (1.0 - k)),
    }
}

/// The builtin plants with their documentation, in bank order.
pub fn builtin_catalog() -> Vec<BankEntry> {
    vec![
        first_order("S1", 1000.0),
        non_minimum_phase("S2", 3000.0, 800.0, 2500.0),
        second_order("S3", 1500.0, 0.8),
        non_minimum_phase("S4", 2000.0, 1000.0, 1500.0),
        second_order("S5", 2000.0, 0.4),
        first_order("S6", 50.0),
        non_minimum_phase("S7", 60.0, 40.0, 100.0),
        second_order("S8", 60.0, 0.7),
        scalar_state_delay("S1TD", 20.0, 10.0, TAU1),
        second_order_state_delay("S2TD", 20.0, 1.0, 0.25, TAU3),
    ]
}

/// The builtin plants in bank order.
pub fn builtin_bank() -> Vec<StateSpaceSystem> {
    builtin_catalog().into_iter().map(|e| e.system).collect()
}
