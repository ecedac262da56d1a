//! Time-indexed history buffer with interpolated reads at `t - tau`.

use std::collections::VecDeque;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// History of vector samples stamped with strictly increasing times.
///
/// Reads between two samples are linearly interpolated. Reads before the first
/// retained sample return the pre-history value, reads after the newest sample
/// return the newest value. Samples older than `capacity` seconds behind the
/// newest one are dropped, always keeping one sample at or before the boundary
/// so reads at exactly `capacity` stay interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayLine {
    samples: VecDeque<(f64, DVector<f64>)>,
    capacity: f64,
    pre_history: DVector<f64>,
}

impl DelayLine {
    pub fn new(capacity: f64, pre_history: DVector<f64>) -> Result<Self> {
        if !(capacity >= 0.0) || !capacity.is_finite() {
            return Err(Error::field("capacity_horizon", "must be finite and >= 0"));
        }
        Ok(Self {
            samples: VecDeque::new(),
            capacity,
            pre_history,
        })
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn pre_history(&self) -> &DVector<f64> {
        &self.pre_history
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first_time(&self) -> Option<f64> {
        self.samples.front().map(|(t, _)| *t)
    }

    pub fn latest(&self) -> Option<(f64, &DVector<f64>)> {
        self.samples.back().map(|(t, v)| (*t, v))
    }

    /// Time span covered by the retained samples.
    pub fn span(&self) -> f64 {
        match (self.samples.front(), self.samples.back()) {
            (Some((a, _)), Some((b, _))) => b - a,
            _ => 0.0,
        }
    }

    /// Appends a sample. `time` must be later than the newest sample.
    pub fn push(&mut self, time: f64, value: DVector<f64>) -> Result<()> {
        if let Some((last, _)) = self.samples.back() {
            if !(time > *last) {
                return Err(Error::Config(format!(
                    "delay line times must increase strictly ({time} after {last})"
                )));
            }
        }
        self.samples.push_back((time, value));
        self.prune(time);
        Ok(())
    }

    fn prune(&mut self, newest: f64) {
        let horizon = newest - self.capacity;
        while self.samples.len() > 2 && self.samples[1].0 <= horizon {
            self.samples.pop_front();
        }
    }

    /// Value at `t - tau`.
    pub fn read(&self, t: f64, tau: f64) -> Result<DVector<f64>> {
        if !(tau >= 0.0) {
            return Err(Error::field("tau", "must be >= 0"));
        }
        if tau > self.capacity {
            return Err(Error::Config(format!(
                "requested delay {tau} s exceeds the history capacity {} s",
                self.capacity
            )));
        }
        Ok(self.value_at(t - tau))
    }

    fn value_at(&self, target: f64) -> DVector<f64> {
        let (first_t, first_v) = match self.samples.front() {
            Some((t, v)) => (*t, v),
            None => return self.pre_history.clone(),
        };
        if target < first_t {
            return self.pre_history.clone();
        }
        if target == first_t {
            return first_v.clone();
        }
        let (last_t, last_v) = self.samples.back().expect("non-empty");
        if target >= *last_t {
            return last_v.clone();
        }
        // first index with time > target; 1 <= hi < len
        let hi = self.samples.partition_point(|(t, _)| *t <= target);
        let (t0, v0) = &self.samples[hi - 1];
        if *t0 == target {
            return v0.clone();
        }
        let (t1, v1) = &self.samples[hi];
        let frac = (target - t0) / (t1 - t0);
        v0 + (v1 - v0) * frac
    }
}
