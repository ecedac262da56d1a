use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Linear piece of a piecewise reference, from `from` at `start` to `to` at `end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub from: f64,
    pub to: f64,
}

/// Output reference `y*(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceTrajectory {
    Step {
        amplitude: f64,
        #[serde(default)]
        onset: f64,
    },
    Ramp {
        slope: f64,
        #[serde(default)]
        onset: f64,
    },
    /// `amplitude (1 - e^(-t / time_constant))`
    ExponentialApproach { amplitude: f64, time_constant: f64 },
    /// Contiguous linear segments; held at the end values outside their span.
    Piecewise { segments: Vec<Segment> },
}

impl Default for ReferenceTrajectory {
    fn default() -> Self {
        ReferenceTrajectory::unit_step()
    }
}

impl ReferenceTrajectory {
    pub fn unit_step() -> Self {
        ReferenceTrajectory::Step {
            amplitude: 1.0,
            onset: 0.0,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            ReferenceTrajectory::Step { amplitude, onset } => {
                if t >= *onset {
                    *amplitude
                } else {
                    0.0
                }
            }
            ReferenceTrajectory::Ramp { slope, onset } => slope * (t - onset).max(0.0),
            ReferenceTrajectory::ExponentialApproach {
                amplitude,
                time_constant,
            } => amplitude * (1.0 - (-t / time_constant).exp()),
            ReferenceTrajectory::Piecewise { segments } => {
                let first = &segments[0];
                if t < first.start {
                    return first.from;
                }
                let i = segments.partition_point(|s| s.start <= t) - 1;
                let s = &segments[i];
                if t >= s.end {
                    s.to
                } else {
                    s.from + (s.to - s.from) * (t - s.start) / (s.end - s.start)
                }
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |key: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::field(format!("reference.{key}"), "must be finite"))
            }
        };
        match self {
            ReferenceTrajectory::Step { amplitude, onset } => {
                finite("amplitude", *amplitude)?;
                finite("onset", *onset)
            }
            ReferenceTrajectory::Ramp { slope, onset } => {
                finite("slope", *slope)?;
                finite("onset", *onset)
            }
            ReferenceTrajectory::ExponentialApproach {
                amplitude,
                time_constant,
            } => {
                finite("amplitude", *amplitude)?;
                if *time_constant > 0.0 && time_constant.is_finite() {
                    Ok(())
                } else {
                    Err(Error::field("reference.time_constant", "must be > 0"))
                }
            }
            ReferenceTrajectory::Piecewise { segments } => {
                if segments.is_empty() {
                    return Err(Error::field("reference.segments", "needs at least one segment"));
                }
                for (i, s) in segments.iter().enumerate() {
                    if ![s.start, s.end, s.from, s.to].iter().all(|v| v.is_finite()) {
                        return Err(Error::field(format!("reference.segments[{i}]"), "must be finite"));
                    }
                    if !(s.end > s.start) {
                        return Err(Error::field(
                            format!("reference.segments[{i}]"),
                            "end must be after start",
                        ));
                    }
                }
                if segments.windows(2).any(|w| w[1].start != w[0].end) {
                    return Err(Error::field("reference.segments", "segments must be contiguous"));
                }
                Ok(())
            }
        }
    }
}
