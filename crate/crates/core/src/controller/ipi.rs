use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::derivative::{estimate_derivative, estimate_f};
use super::pi::PiGains;
use super::ControllerFault;

/// Ultra-local model `y^(n) = F + alpha u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UltraLocalConfig {
    pub alpha: f64,
    #[serde(default = "default_order")]
    pub order_n: u8,
}

fn default_order() -> u8 {
    1
}

impl Default for UltraLocalConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            order_n: 1,
        }
    }
}

/// One sample of i-PI output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IPiOutput {
    pub u: f64,
    /// `C(eps)|_k`.
    pub corrector: f64,
    /// `F` estimated from the newest derivative and `u_{k-1}`.
    pub f_estimate: f64,
}

/// Discrete intelligent PI:
/// `u_k = u_{k-1} - (y^(n)|_{k-1} - y*^(n)|_k) / alpha + C(eps)|_k`.
///
/// `y^(n)|_{k-1}` is the backward difference ending at `y_k`, i.e. the response
/// produced by `u_{k-1}` over the last sample period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IPi {
    pub ultra: UltraLocalConfig,
    #[serde(default)]
    pub corrector: PiGains,
    /// Time constant of an optional first-order low-pass on the derivative estimate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivative_filter: Option<f64>,
    #[serde(skip)]
    u_prev: f64,
    #[serde(skip)]
    y_window: VecDeque<f64>,
    #[serde(skip)]
    ref_window: VecDeque<f64>,
    #[serde(skip)]
    filtered: Option<f64>,
}

impl Default for IPi {
    fn default() -> Self {
        Self::new(UltraLocalConfig::default(), PiGains::default())
    }
}

impl IPi {
    pub fn new(ultra: UltraLocalConfig, corrector: PiGains) -> Self {
        Self {
            ultra,
            corrector,
            derivative_filter: None,
            u_prev: 0.0,
            y_window: VecDeque::new(),
            ref_window: VecDeque::new(),
            filtered: None,
        }
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
        self.y_window.clear();
        self.ref_window.clear();
        self.filtered = None;
        self.corrector.reset();
    }

    /// The discrete i-PI law with externally supplied derivative estimates.
    pub fn ipi_update(
        &mut self,
        y_deriv_prev: f64,
        yref_deriv_k: f64,
        eps_k: f64,
        ts: f64,
    ) -> Result<IPiOutput, ControllerFault> {
        let alpha = self.ultra.alpha;
        if alpha == 0.0 {
            return Err(ControllerFault("alpha must be non-zero".into()));
        }
        if !(y_deriv_prev.is_finite() && yref_deriv_k.is_finite() && eps_k.is_finite()) {
            return Err(ControllerFault(format!(
                "non-finite i-PI input (y^(n) = {y_deriv_prev}, y*^(n) = {yref_deriv_k}, eps = {eps_k})"
            )));
        }
        let f_estimate = estimate_f(y_deriv_prev, alpha, self.u_prev);
        let corrector = self.corrector.update(eps_k, ts);
        let u = self.u_prev - (y_deriv_prev - yref_deriv_k) / alpha + corrector;
        if !u.is_finite() {
            return Err(ControllerFault(format!("non-finite i-PI output {u}")));
        }
        self.u_prev = u;
        Ok(IPiOutput {
            u,
            corrector,
            f_estimate,
        })
    }

    /// Feeds the newest samples `y_k`, `y*_k` and returns `u_k`.
    pub fn step(&mut self, y_k: f64, yref_k: f64, ts: f64) -> Result<IPiOutput, ControllerFault> {
        let n = self.ultra.order_n;
        push_window(&mut self.y_window, y_k, n as usize + 1);
        push_window(&mut self.ref_window, yref_k, n as usize + 1);
        let raw = estimate_derivative(self.y_window.make_contiguous(), n, ts).value;
        let y_deriv = match self.derivative_filter {
            Some(tc) if tc > 0.0 => {
                let prev = self.filtered.unwrap_or(raw);
                let next = prev + ts / (tc + ts) * (raw - prev);
                self.filtered = Some(next);
                next
            }
            _ => raw,
        };
        let yref_deriv = estimate_derivative(self.ref_window.make_contiguous(), n, ts).value;
        self.ipi_update(y_deriv, yref_deriv, yref_k - y_k, ts)
    }
}

fn push_window(window: &mut VecDeque<f64>, value: f64, len: usize) {
    window.push_back(value);
    while window.len() > len {
        window.pop_front();
    }
}
