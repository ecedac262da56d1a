use nalgebra::DVector;

use super::delay_line::DelayLine;
use super::system::StateSpaceSystem;
use crate::error::{Error, Result};

/// States whose norm exceeds this are treated as diverged.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// Mutable state of a switching plant: active bank entry, `x(t)`, and histories.
///
/// The state history feeds both delayed-state terms and the output delay. It is
/// re-seeded when a switch changes the state dimension; the output history (the
/// undelayed output of whichever plant was active) bridges delayed output reads
/// that reach back across such a switch.
#[derive(Debug, Clone)]
pub struct PlantRuntime {
    active: usize,
    state: DVector<f64>,
    state_history: DelayLine,
    output_history: DelayLine,
    time: f64,
    epoch_start: f64,
    output_delay: Option<f64>,
    state_delay: Option<f64>,
}

impl PlantRuntime {
    /// Starts `bank[index]` at `t = 0` with state `x0` (zero when `None`).
    /// Pre-history is `x(t) = x0` for `t < 0`.
    pub fn new(
        bank: &[StateSpaceSystem],
        index: usize,
        x0: Option<DVector<f64>>,
        capacity: f64,
    ) -> Result<Self> {
        let system = lookup(bank, index)?;
        let x0 = x0.unwrap_or_else(|| DVector::zeros(system.order()));
        if x0.len() != system.order() {
            return Err(Error::field(
                "x0",
                format!("length {} does not match state dimension {}", x0.len(), system.order()),
            ));
        }
        let y0 = system.output(&x0);
        let mut state_history = DelayLine::new(capacity, x0.clone())?;
        state_history.push(0.0, x0.clone())?;
        let mut output_history = DelayLine::new(capacity, DVector::from_element(1, y0))?;
        output_history.push(0.0, DVector::from_element(1, y0))?;
        Ok(Self {
            active: index,
            state: x0,
            state_history,
            output_history,
            time: 0.0,
            epoch_start: 0.0,
            output_delay: None,
            state_delay: None,
        })
    }

    pub fn active_index(&self) -> usize {
        self.active
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.state
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn state_history(&self) -> &DelayLine {
        &self.state_history
    }

    pub fn output_history(&self) -> &DelayLine {
        &self.output_history
    }

    /// Overrides the active plant's delays; `None` falls back to the plant's own value.
    pub fn set_delays(&mut self, output_delay: Option<f64>, state_delay: Option<f64>) {
        self.output_delay = output_delay;
        self.state_delay = state_delay;
    }

    pub fn effective_output_delay(&self, bank: &[StateSpaceSystem]) -> f64 {
        self.output_delay
            .unwrap_or_else(|| bank.get(self.active).map_or(0.0, |s| s.output_delay()))
    }

    /// Delay of the `A_tau` term, `None` when the active plant has no delayed state.
    pub fn effective_state_delay(&self, bank: &[StateSpaceSystem]) -> Option<f64> {
        let sd = bank.get(self.active)?.state_delay()?;
        Some(self.state_delay.unwrap_or(sd.tau))
    }

    /// Makes `bank[p]` the active plant. The state carries over when the
    /// dimension matches and resets to zero otherwise.
    pub fn switch_active(&mut self, bank: &[StateSpaceSystem], p: usize) -> Result<()> {
        let system = lookup(bank, p)?;
        if p == self.active {
            return Ok(());
        }
        self.active = p;
        if system.order() != self.state.len() {
            let zero = DVector::zeros(system.order());
            let mut history = DelayLine::new(self.state_history.capacity(), zero.clone())?;
            history.push(self.time, zero.clone())?;
            self.state_history = history;
            self.state = zero;
            self.epoch_start = self.time;
        }
        Ok(())
    }

    /// Measured output at the current time, `C_p x(t - tau_out)`.
    pub fn measure(&self, bank: &[StateSpaceSystem]) -> Result<f64> {
        let system = lookup(bank, self.active)?;
        let tau = self.effective_output_delay(bank);
        if tau == 0.0 {
            return Ok(system.output(&self.state));
        }
        if self.time - tau >= self.epoch_start {
            let x = self.state_history.read(self.time, tau)?;
            Ok(system.output(&x))
        } else {
            Ok(self.output_history.read(self.time, tau)?[0])
        }
    }

    /// Advances one sample of length `ts` with `u` held constant, using classical
    /// RK4. Delayed states are read from history at each stage time. Returns the
    /// measured output at the new time.
    pub fn zoh_step(&mut self, bank: &[StateSpaceSystem], u: f64, ts: f64) -> Result<f64> {
        if !(ts > 0.0) {
            return Err(Error::field("ts", "must be > 0"));
        }
        let system = lookup(bank, self.active)?;
        let tau = self.effective_state_delay(bank);
        let t = self.time;
        let delayed = |s: f64| -> Result<Option<DVector<f64>>> {
            tau.map(|tau| self.state_history.read(s, tau)).transpose()
        };
        let d0 = delayed(t)?;
        let d_half = delayed(t + 0.5 * ts)?;
        let d1 = delayed(t + ts)?;

        let x = &self.state;
        let k1 = system.derivative(x, d0.as_ref(), u);
        let k2 = system.derivative(&(x + &k1 * (0.5 * ts)), d_half.as_ref(), u);
        let k3 = system.derivative(&(x + &k2 * (0.5 * ts)), d_half.as_ref(), u);
        let k4 = system.derivative(&(x + &k3 * ts), d1.as_ref(), u);
        let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (ts / 6.0);

        let t_next = t + ts;
        if next.iter().any(|v| !v.is_finite()) || next.norm() > DIVERGENCE_BOUND {
            return Err(Error::Diverged { time: t_next });
        }
        let y_now = system.output(&next);
        self.state_history.push(t_next, next.clone())?;
        self.output_history
            .push(t_next, DVector::from_element(1, y_now))?;
        self.state = next;
        self.time = t_next;
        self.measure(bank)
    }
}

fn lookup(bank: &[StateSpaceSystem], index: usize) -> Result<&StateSpaceSystem> {
    bank.get(index).ok_or_else(|| {
        Error::field(
            "plant_index",
            format!("{index} is out of range for a bank of {} plants", bank.len()),
        )
    })
}
