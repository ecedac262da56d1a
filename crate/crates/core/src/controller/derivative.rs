//! Backward finite-difference derivative estimates and the ultra-local `F` term.

/// Result of a derivative estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    /// Not enough samples yet; `value` is 0.
    pub warm_up: bool,
}

/// Backward difference of order `order_n` (1 or 2) over the newest samples of
/// `window` (oldest first).
///
/// `n = 1`: `(y_k - y_{k-1}) / ts`; `n = 2`: `(y_k - 2 y_{k-1} + y_{k-2}) / ts^2`.
pub fn estimate_derivative(window: &[f64], order_n: u8, ts: f64) -> Derivative {
    let need = order_n as usize + 1;
    if window.len() < need || ts <= 0.0 {
        return Derivative {
            value: 0.0,
            warm_up: true,
        };
    }
    let w = &window[window.len() - need..];
    let value = match order_n {
        1 => (w[1] - w[0]) / ts,
        2 => (w[2] - 2.0 * w[1] + w[0]) / (ts * ts),
        _ => {
            return Derivative {
                value: 0.0,
                warm_up: true,
            }
        }
    };
    Derivative {
        value,
        warm_up: false,
    }
}

/// `F = y^(n) - alpha u`.
pub fn estimate_f(y_deriv_n: f64, alpha: f64, u: f64) -> f64 {
    y_deriv_n - alpha * u
}
