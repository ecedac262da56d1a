//! Discrete controllers: classic PI, i-PI, and i*-PI.
//!
//! Controller configurations also carry their run state (previous input,
//! integrators, derivative windows). That state is never serialized, and
//! [`ControllerConfig::reset`] returns a controller to its initial conditions:
//! `u_0 = 0` and all integrators at their initial values.

mod derivative;
mod ipi;
mod istar;
mod pi;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use derivative::{estimate_derivative, estimate_f, Derivative};
pub use ipi::{IPi, IPiOutput, UltraLocalConfig};
pub use istar::{
    Breakpoint, Composition, GainFunction, GainMode, IStarConfig, IStarOutput, LambdaProfile,
};
pub use pi::{Integral, IntegrationRule, PiGains};

use crate::error::{Error, Result};

/// A controller produced or received a non-finite value.
#[derive(Debug, Clone, Error, PartialEq)]
#[error("{0}")]
pub struct ControllerFault(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    Pi,
    Ipi,
    IstarPi,
}

impl ControllerKind {
    pub const ALL: [ControllerKind; 3] = [ControllerKind::Pi, ControllerKind::Ipi, ControllerKind::IstarPi];

    pub fn name(self) -> &'static str {
        match self {
            ControllerKind::Pi => "pi",
            ControllerKind::Ipi => "ipi",
            ControllerKind::IstarPi => "istar_pi",
        }
    }
}

impl fmt::Display for ControllerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ControllerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "pi" => Ok(ControllerKind::Pi),
            "ipi" => Ok(ControllerKind::Ipi),
            "istar_pi" => Ok(ControllerKind::IstarPi),
            other => Err(Error::field(
                "controller",
                format!("unknown controller `{other}` (expected pi, ipi or istar_pi)"),
            )),
        }
    }
}

/// Output of one controller sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub u: f64,
    /// `G_k` for i*-PI, `C(eps)|_k` for i-PI and PI.
    pub gain_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ControllerConfig {
    Pi(PiGains),
    Ipi(IPi),
    IstarPi(IStarConfig),
}

impl ControllerConfig {
    pub fn kind(&self) -> ControllerKind {
        match self {
            ControllerConfig::Pi(_) => ControllerKind::Pi,
            ControllerConfig::Ipi(_) => ControllerKind::Ipi,
            ControllerConfig::IstarPi(_) => ControllerKind::IstarPi,
        }
    }

    /// Default parameters for `kind`.
    pub fn default_for(kind: ControllerKind) -> Self {
        match kind {
            ControllerKind::Pi => ControllerConfig::Pi(PiGains::default()),
            ControllerKind::Ipi => ControllerConfig::Ipi(IPi::default()),
            ControllerKind::IstarPi => ControllerConfig::IstarPi(IStarConfig::default()),
        }
    }

    pub fn reset(&mut self) {
        match self {
            ControllerConfig::Pi(c) => c.reset(),
            ControllerConfig::Ipi(c) => c.reset(),
            ControllerConfig::IstarPi(c) => c.reset(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let key = "controller";
        let check_pi = |pi: &PiGains, key: &str| -> Result<()> {
            if !pi.kp.is_finite() || !pi.ki.is_finite() {
                return Err(Error::field(format!("{key}.kp/ki"), "must be finite"));
            }
            match pi.windup_limit {
                Some(l) if !(l > 0.0) => {
                    Err(Error::field(format!("{key}.windup_limit"), "must be > 0"))
                }
                _ => Ok(()),
            }
        };
        match self {
            ControllerConfig::Pi(pi) => check_pi(pi, key),
            ControllerConfig::Ipi(c) => {
                if c.ultra.alpha == 0.0 || !c.ultra.alpha.is_finite() {
                    return Err(Error::field("controller.ultra.alpha", "must be finite and non-zero"));
                }
                if !matches!(c.ultra.order_n, 1 | 2) {
                    return Err(Error::field("controller.ultra.order_n", "must be 1 or 2"));
                }
                if let Some(tc) = c.derivative_filter {
                    if !(tc > 0.0) {
                        return Err(Error::field("controller.derivative_filter", "must be > 0"));
                    }
                }
                check_pi(&c.corrector, "controller.corrector")
            }
            ControllerConfig::IstarPi(c) => c.validate(key),
        }
    }

    /// Computes `u_k` from the sample at `t_k`.
    pub fn update(
        &mut self,
        t_k: f64,
        y_k: f64,
        yref_k: f64,
        ts: f64,
    ) -> Result<ControlOutput, ControllerFault> {
        match self {
            ControllerConfig::Pi(pi) => {
                let eps = yref_k - y_k;
                if !eps.is_finite() {
                    return Err(ControllerFault(format!("non-finite tracking error {eps}")));
                }
                let u = pi.update(eps, ts);
                Ok(ControlOutput { u, gain_value: u })
            }
            ControllerConfig::Ipi(c) => {
                let out = c.step(y_k, yref_k, ts)?;
                Ok(ControlOutput {
                    u: out.u,
                    gain_value: out.corrector,
                })
            }
            ControllerConfig::IstarPi(c) => {
                let out = c.update(y_k, yref_k, t_k, ts)?;
                Ok(ControlOutput {
                    u: out.u,
                    gain_value: out.gain,
                })
            }
        }
    }
}
