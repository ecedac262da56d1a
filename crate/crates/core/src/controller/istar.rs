use serde::{Deserialize, Serialize};

use super::pi::{Integral, IntegrationRule};
use super::ControllerFault;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainMode {
    PureGain,
    #[default]
    Integrator,
}

/// Gain function `G(eps)`: a pure gain, or `K_i \int eps dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainFunction {
    #[serde(default)]
    pub mode: GainMode,
    /// Value returned in pure-gain mode.
    #[serde(default = "one")]
    pub k_gain: f64,
    #[serde(default = "one")]
    pub k_i: f64,
    /// Integrator value at `t = 0`. Setting it to `1 / k_i` starts `G` at 1.
    #[serde(default)]
    pub accumulator_init: f64,
    #[serde(default)]
    pub rule: IntegrationRule,
    #[serde(skip)]
    accumulated: Integral,
}

fn one() -> f64 {
    1.0
}

impl Default for GainFunction {
    fn default() -> Self {
        Self::integrator(1.0)
    }
}

impl GainFunction {
    pub fn pure(k_gain: f64) -> Self {
        Self {
            mode: GainMode::PureGain,
            k_gain,
            k_i: 1.0,
            accumulator_init: 0.0,
            rule: IntegrationRule::Rectangular,
            accumulated: Integral::default(),
        }
    }

    pub fn integrator(k_i: f64) -> Self {
        Self {
            mode: GainMode::Integrator,
            k_gain: 1.0,
            k_i,
            accumulator_init: 0.0,
            rule: IntegrationRule::Rectangular,
            accumulated: Integral::default(),
        }
    }

    /// Integrator whose output starts at `g0` instead of zero.
    pub fn integrator_from(k_i: f64, g0: f64) -> Self {
        Self {
            accumulator_init: g0 / k_i,
            ..Self::integrator(k_i)
        }
    }

    /// Current `\int eps dt`, including the initial value.
    pub fn accumulator(&self) -> f64 {
        self.accumulator_init + self.accumulated.value()
    }

    pub fn reset(&mut self) {
        self.accumulated = Integral::default();
    }

    /// Integrates `eps_k` (integrator mode) and returns `G_k`.
    pub fn eval(&mut self, eps_k: f64, ts: f64) -> f64 {
        match self.mode {
            GainMode::PureGain => self.k_gain,
            GainMode::Integrator => {
                self.accumulated.update(eps_k, ts, self.rule);
                self.k_i * self.accumulator()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Breakpoint {
    pub time: f64,
    pub value: f64,
}

/// Time-varying gain `Lambda(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaProfile {
    Constant { value: f64 },
    /// `initial e^(-t / time_constant)`
    ExpDecay { initial: f64, time_constant: f64 },
    /// Value of the last breakpoint at or before `t`; the first value before that.
    PiecewiseConstant { breakpoints: Vec<Breakpoint> },
}

impl Default for LambdaProfile {
    fn default() -> Self {
        LambdaProfile::Constant { value: -0.01 }
    }
}

impl LambdaProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            LambdaProfile::Constant { value } => *value,
            LambdaProfile::ExpDecay {
                initial,
                time_constant,
            } => initial * (-t / time_constant).exp(),
            LambdaProfile::PiecewiseConstant { breakpoints } => {
                let i = breakpoints.partition_point(|b| b.time <= t);
                breakpoints[i.saturating_sub(1)].value
            }
        }
    }

    pub fn validate(&self, key: &str) -> Result<()> {
        match self {
            LambdaProfile::Constant { value } if !value.is_finite() => {
                Err(Error::field(format!("{key}.value"), "must be finite"))
            }
            LambdaProfile::ExpDecay {
                initial,
                time_constant,
            } => {
                if !initial.is_finite() {
                    Err(Error::field(format!("{key}.initial"), "must be finite"))
                } else if !(*time_constant > 0.0) || !time_constant.is_finite() {
                    Err(Error::field(format!("{key}.time_constant"), "must be > 0"))
                } else {
                    Ok(())
                }
            }
            LambdaProfile::PiecewiseConstant { breakpoints } => {
                if breakpoints.is_empty() {
                    return Err(Error::field(
                        format!("{key}.breakpoints"),
                        "needs at least one breakpoint",
                    ));
                }
                if breakpoints.windows(2).any(|w| !(w[1].time > w[0].time)) {
                    return Err(Error::field(
                        format!("{key}.breakpoints"),
                        "times must increase strictly",
                    ));
                }
                if breakpoints
                    .iter()
                    .any(|b| !b.time.is_finite() || !b.value.is_finite())
                {
                    return Err(Error::field(format!("{key}.breakpoints"), "must be finite"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// How `G(eps)` acts on the bracket `u_{k-1} - Lambda (delta1 y* - delta2 y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Composition {
    /// `u_k = G_k * bracket_k`
    #[default]
    Multiplicative,
    /// `u_k = K_i \sum_j bracket_j ts`
    Cascade,
}

/// One sample of i*-PI output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IStarOutput {
    pub u: f64,
    pub gain: f64,
}

/// The i*-PI law `u_k = G(eps) { u_{k-1} - Lambda(t) (delta1 y* - delta2 y) }`.
///
/// No derivative of `y` or `y*` is used. With `Lambda < 0`, `delta1 = delta2`
/// and a unit gain function this reduces to a discrete integral controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IStarConfig {
    #[serde(default)]
    pub gain: GainFunction,
    #[serde(default)]
    pub lambda: LambdaProfile,
    #[serde(default = "one")]
    pub delta1: f64,
    #[serde(default = "one")]
    pub delta2: f64,
    #[serde(default)]
    pub composition: Composition,
    #[serde(skip)]
    u_prev: f64,
    #[serde(skip)]
    cascade: Integral,
}

impl Default for IStarConfig {
    fn default() -> Self {
        Self::new(GainFunction::default(), LambdaProfile::default())
    }
}

impl IStarConfig {
    pub fn new(gain: GainFunction, lambda: LambdaProfile) -> Self {
        Self {
            gain,
            lambda,
            delta1: 1.0,
            delta2: 1.0,
            composition: Composition::Multiplicative,
            u_prev: 0.0,
            cascade: Integral::default(),
        }
    }

    pub fn with_deltas(mut self, delta1: f64, delta2: f64) -> Self {
        self.delta1 = delta1;
        self.delta2 = delta2;
        self
    }

    pub fn with_composition(mut self, composition: Composition) -> Self {
        self.composition = composition;
        self
    }

    pub fn with_u_prev(mut self, u_prev: f64) -> Self {
        self.u_prev = u_prev;
        self
    }

    pub fn u_prev(&self) -> f64 {
        self.u_prev
    }

    pub fn reset(&mut self) {
        self.u_prev = 0.0;
        self.cascade = Integral::default();
        self.gain.reset();
    }

    pub fn validate(&self, key: &str) -> Result<()> {
        for (name, v) in [("delta1", self.delta1), ("delta2", self.delta2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::field(format!("{key}.{name}"), "must be > 0"));
            }
        }
        for (name, v) in [
            ("gain.k_gain", self.gain.k_gain),
            ("gain.k_i", self.gain.k_i),
            ("gain.accumulator_init", self.gain.accumulator_init),
        ] {
            if !v.is_finite() {
                return Err(Error::field(format!("{key}.{name}"), "must be finite"));
            }
        }
        self.lambda.validate(&format!("{key}.lambda"))
    }

    /// Computes `u_k` from `y_k`, `y*_k` at time `t_k`.
    pub fn update(
        &mut self,
        y_k: f64,
        yref_k: f64,
        t_k: f64,
        ts: f64,
    ) -> Result<IStarOutput, ControllerFault> {
        let eps = yref_k - y_k;
        let gain = self.gain.eval(eps, ts);
        let bracket = self.u_prev - self.lambda.eval(t_k) * (self.delta1 * yref_k - self.delta2 * y_k);
        let u = match self.composition {
            Composition::Multiplicative => gain * bracket,
            Composition::Cascade => {
                self.gain.k_i * self.cascade.update(bracket, ts, self.gain.rule)
            }
        };
        if !u.is_finite() {
            return Err(ControllerFault(format!(
                "non-finite i*-PI output (G = {gain}, bracket = {bracket})"
            )));
        }
        self.u_prev = u;
        Ok(IStarOutput { u, gain })
    }
}
