use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Events closer than this to a sample time count as reached at that sample.
pub const TIME_EPS: f64 = 1e-9;

/// Active plant and delay overrides. `None` delays fall back to the plant's own.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mode {
    pub plant: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_delay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_delay: Option<f64>,
}

impl Mode {
    pub fn plant(plant: usize) -> Self {
        Self {
            plant,
            output_delay: None,
            state_delay: None,
        }
    }

    pub fn with_output_delay(mut self, tau: f64) -> Self {
        self.output_delay = Some(tau);
        self
    }

    pub fn with_state_delay(mut self, tau: f64) -> Self {
        self.state_delay = Some(tau);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchEvent {
    pub time: f64,
    pub plant: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_delay: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_delay: Option<f64>,
}

impl SwitchEvent {
    pub fn new(time: f64, mode: Mode) -> Self {
        Self {
            time,
            plant: mode.plant,
            output_delay: mode.output_delay,
            state_delay: mode.state_delay,
        }
    }

    pub fn mode(&self) -> Mode {
        Mode {
            plant: self.plant,
            output_delay: self.output_delay,
            state_delay: self.state_delay,
        }
    }
}

/// Ordered switching events. Each event fully specifies the mode that holds from
/// its time (inclusive) until the next event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwitchingSchedule {
    pub initial: Mode,
    #[serde(default)]
    pub events: Vec<SwitchEvent>,
}

impl SwitchingSchedule {
    pub fn fixed(mode: Mode) -> Self {
        Self {
            initial: mode,
            events: Vec::new(),
        }
    }

    pub fn new(initial: Mode, events: Vec<(f64, Mode)>) -> Self {
        Self {
            initial,
            events: events
                .into_iter()
                .map(|(t, m)| SwitchEvent::new(t, m))
                .collect(),
        }
    }

    pub fn switch_times(&self) -> Vec<f64> {
        self.events.iter().map(|e| e.time).collect()
    }

    /// Mode in force at `t`: the latest event with `time <= t`, else the initial mode.
    pub fn apply_schedule(&self, t: f64) -> Mode {
        let reached = self.events.partition_point(|e| e.time <= t + TIME_EPS);
        match reached {
            0 => self.initial,
            i => self.events[i - 1].mode(),
        }
    }

    /// Largest delay any mode requests.
    pub fn max_delay(&self) -> f64 {
        std::iter::once(self.initial)
            .chain(self.events.iter().map(SwitchEvent::mode))
            .flat_map(|m| [m.output_delay, m.state_delay])
            .flatten()
            .fold(0.0, f64::max)
    }

    pub fn validate(&self, bank_len: usize) -> Result<()> {
        let check_mode = |key: String, m: Mode| -> Result<()> {
            if m.plant >= bank_len {
                return Err(Error::field(
                    format!("{key}.plant"),
                    format!("index {} is outside a bank of {bank_len} plants", m.plant),
                ));
            }
            for (name, d) in [("output_delay", m.output_delay), ("state_delay", m.state_delay)] {
                if let Some(d) = d {
                    if !(d >= 0.0) || !d.is_finite() {
                        return Err(Error::field(format!("{key}.{name}"), "must be finite and >= 0"));
                    }
                }
            }
            Ok(())
        };
        check_mode("schedule.initial".into(), self.initial)?;
        for (i, e) in self.events.iter().enumerate() {
            if !(e.time >= 0.0) || !e.time.is_finite() {
                return Err(Error::field(format!("schedule.events[{i}].time"), "must be finite and >= 0"));
            }
            check_mode(format!("schedule.events[{i}]"), e.mode())?;
        }
        if self.events.windows(2).any(|w| !(w[1].time > w[0].time)) {
            return Err(Error::field("schedule.events", "times must increase strictly"));
        }
        Ok(())
    }
}
