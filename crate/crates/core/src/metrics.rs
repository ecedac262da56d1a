//! Tracking-quality metrics over a simulated trace.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::SimTrace;

/// Default settling band, percent of the final reference magnitude.
pub const DEFAULT_BAND_PCT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    /// `\int eps^2 dt`, left rectangular rule.
    pub ise: f64,
    /// `\int |eps| dt`, left rectangular rule.
    pub iae: f64,
    /// Largest excursion of `y` past the final reference, percent of its magnitude.
    pub overshoot_pct: f64,
    /// Largest excursion of `y` opposite to the final reference, percent of its magnitude.
    pub undershoot_pct: f64,
    /// Time from reference onset until `|eps|` last leaves the band.
    pub settling_time: Option<f64>,
    pub diverged: bool,
    pub peak_u: f64,
    /// Per switching event: time until `|eps|` is back in the band up to the
    /// next event. If the segment ends outside the band, the window extends to
    /// the end of the first later segment that finishes inside it.
    pub post_switch_recovery: Vec<Option<f64>>,
    /// Absolute band used for settling and recovery.
    pub band: f64,
}

/// Band half-width for `band_pct` percent of the final reference magnitude.
/// Falls back to the peak reference magnitude, then to an absolute band.
pub fn band_width(trace: &SimTrace, band_pct: f64) -> f64 {
    let final_ref = trace.rows.last().map_or(0.0, |r| r.y_ref.abs());
    let scale = if final_ref > 0.0 {
        final_ref
    } else {
        let peak = trace.rows.iter().map(|r| r.y_ref.abs()).fold(0.0, f64::max);
        if peak > 0.0 {
            peak
        } else {
            1.0
        }
    };
    band_pct / 100.0 * scale
}

pub fn compute_metrics(trace: &SimTrace, band_pct: f64) -> Result<MetricsReport> {
    if trace.rows.is_empty() {
        return Err(Error::field("trace", "must contain at least one sample"));
    }
    if !(band_pct > 0.0) {
        return Err(Error::field("band_pct", "must be > 0"));
    }
    let rows = &trace.rows;

    let (mut ise, mut iae) = (0.0, 0.0);
    for w in rows.windows(2) {
        let dt = w[1].t - w[0].t;
        ise += w[0].eps * w[0].eps * dt;
        iae += w[0].eps.abs() * dt;
    }

    let final_ref = rows.last().map_or(0.0, |r| r.y_ref);
    let (overshoot_pct, undershoot_pct) = if final_ref != 0.0 {
        let sign = final_ref.signum();
        let mag = final_ref.abs();
        let max_along = rows.iter().map(|r| sign * r.y).fold(f64::NEG_INFINITY, f64::max);
        let min_along = rows.iter().map(|r| sign * r.y).fold(f64::INFINITY, f64::min);
        (
            ((max_along - mag) / mag * 100.0).max(0.0),
            (-min_along / mag * 100.0).max(0.0),
        )
    } else {
        (0.0, 0.0)
    };

    let band = band_width(trace, band_pct);
    let onset = rows
        .iter()
        .find(|r| r.y_ref != 0.0)
        .map_or(rows[0].t, |r| r.t);
    let settling_time = settle_index(rows.iter().map(|r| r.eps), band)
        .map(|i| (rows[i].t - onset).max(0.0));

    let peak_u = rows.iter().map(|r| r.u.abs()).fold(0.0, f64::max);

    let starts: Vec<usize> = trace
        .switch_times
        .iter()
        .map(|&te| rows.partition_point(|r| r.t < te - crate::scenario::TIME_EPS))
        .collect();
    let post_switch_recovery = (0..starts.len())
        .map(|i| {
            let start = starts[i];
            if start >= rows.len() {
                return None;
            }
            // A segment that ends outside the band extends into the next one.
            starts[i + 1..]
                .iter()
                .copied()
                .chain(std::iter::once(rows.len()))
                .map(|end| &rows[start..end.max(start + 1)])
                .find(|seg| seg.last().is_some_and(|r| r.eps.abs() <= band))
                .and_then(|seg| settle_index(seg.iter().map(|r| r.eps), band).map(|j| seg[j].t - seg[0].t))
        })
        .collect();

    Ok(MetricsReport {
        ise,
        iae,
        overshoot_pct,
        undershoot_pct,
        settling_time,
        diverged: trace.diverged(),
        peak_u,
        post_switch_recovery,
        band,
    })
}

/// Index of the first sample after which `|eps| <= band` holds to the end,
/// `None` if the last sample is outside the band.
fn settle_index(eps: impl DoubleEndedIterator<Item = f64> + ExactSizeIterator, band: f64) -> Option<usize> {
    let n = eps.len();
    let outside_from_end = eps.rev().take_while(|e| e.abs() <= band).count();
    if outside_from_end == 0 {
        None
    } else {
        Some(n - outside_from_end)
    }
}
