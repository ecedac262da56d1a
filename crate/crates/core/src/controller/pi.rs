use serde::{Deserialize, Serialize};

/// Quadrature rule for sampled integrators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationRule {
    /// `I_k = I_{k-1} + x_k ts`
    #[default]
    Rectangular,
    /// `I_k = I_{k-1} + (x_k + x_{k-1}) ts / 2`, no contribution from the first sample.
    Trapezoidal,
}

/// Running integral of a sampled signal.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Integral {
    value: f64,
    last: Option<f64>,
}

impl Integral {
    pub fn starting_at(value: f64) -> Self {
        Self { value, last: None }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn update(&mut self, x: f64, ts: f64, rule: IntegrationRule) -> f64 {
        let inc = match (rule, self.last) {
            (IntegrationRule::Rectangular, _) => x * ts,
            (IntegrationRule::Trapezoidal, Some(prev)) => 0.5 * (x + prev) * ts,
            (IntegrationRule::Trapezoidal, None) => 0.0,
        };
        self.value += inc;
        self.last = Some(x);
        self.value
    }

    pub fn clamp(&mut self, limit: f64) {
        self.value = self.value.clamp(-limit, limit);
    }
}

/// PI corrector `C(eps) = K_P eps + K_I \int eps`, also usable as a standalone
/// baseline controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiGains {
    pub kp: f64,
    pub ki: f64,
    /// Bound on `|\int eps|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub windup_limit: Option<f64>,
    #[serde(default)]
    pub rule: IntegrationRule,
    #[serde(skip)]
    integral: Integral,
}

impl Default for PiGains {
    fn default() -> Self {
        Self::new(1.0, 1.0)
    }
}

impl PiGains {
    pub fn new(kp: f64, ki: f64) -> Self {
        Self {
            kp,
            ki,
            windup_limit: None,
            rule: IntegrationRule::Rectangular,
            integral: Integral::default(),
        }
    }

    pub fn with_windup_limit(mut self, limit: f64) -> Self {
        self.windup_limit = Some(limit);
        self
    }

    pub fn with_rule(mut self, rule: IntegrationRule) -> Self {
        self.rule = rule;
        self
    }

    pub fn integral_state(&self) -> f64 {
        self.integral.value()
    }

    pub fn reset(&mut self) {
        self.integral = Integral::default();
    }

    /// One sample of the corrector: integrates `eps_k`, applies the windup clamp,
    /// and returns `K_P eps_k + K_I \int eps`.
    pub fn update(&mut self, eps_k: f64, ts: f64) -> f64 {
        self.integral.update(eps_k, ts, self.rule);
        if let Some(limit) = self.windup_limit {
            self.integral.clamp(limit);
        }
        self.kp * eps_k + self.ki * self.integral.value()
    }
}
