//! Trace CSV, metrics JSON and SVG plot output.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde_json::{json, Value};

use crate::metrics::MetricsReport;
use crate::scenario::{Outcome, SimTrace};

pub const CSV_HEADER: &str = "t,y_ref,y,u,eps,p,tau,gain_value";

/// Writes the trace as CSV: fixed header, one row per sample, `\n` line ends.
/// Numbers use the shortest representation that round-trips.
pub fn write_trace_csv<W: Write>(trace: &SimTrace, mut out: W) -> io::Result<()> {
    out.write_all(CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    let mut line = String::with_capacity(160);
    for r in &trace.rows {
        line.clear();
        let _ = writeln!(
            line,
            "{},{},{},{},{},{},{},{}",
            r.t, r.y_ref, r.y, r.u, r.eps, r.p, r.tau, r.gain_value
        );
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn trace_to_csv(trace: &SimTrace) -> String {
    let mut buf = Vec::new();
    write_trace_csv(trace, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

pub fn metrics_json(trace: &SimTrace, controller: &str, report: &MetricsReport) -> Value {
    json!({
        "scenario": trace.scenario,
        "controller": controller,
        "config_digest": trace.config_digest,
        "samples": trace.rows.len(),
        "outcome": trace.outcome,
        "switch_times": trace.switch_times,
        "metrics": report,
    })
}

const WIDTH: f64 = 860.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const MAX_POINTS: usize = 2000;

struct Panel {
    top: f64,
    height: f64,
    lo: f64,
    hi: f64,
}

impl Panel {
    fn new(top: f64, height: f64, values: impl Iterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = values
            .filter(|v| v.is_finite())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            lo = -1.0;
            hi = 1.0;
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Panel {
            top,
            height,
            lo: lo - pad,
            hi: hi + pad,
        }
    }

    fn y(&self, v: f64) -> f64 {
        self.top + self.height * (1.0 - (v - self.lo) / (self.hi - self.lo))
    }
}

/// Static SVG of `y`, `y*` (top) and `u` (bottom) against `t`, with dashed
/// lines at switching instants.
pub fn render_svg(trace: &SimTrace) -> String {
    let rows = &trace.rows;
    let t_end = rows.last().map_or(trace.horizon, |r| r.t).max(trace.horizon);
    let plot_w = WIDTH - LEFT - RIGHT;
    let x = |t: f64| LEFT + plot_w * t / t_end.max(f64::MIN_POSITIVE);
    let stride = (rows.len() / MAX_POINTS).max(1);
    let sampled: Vec<_> = rows
        .iter()
        .enumerate()
        .filter(|(i, _)| i % stride == 0 || *i + 1 == rows.len())
        .map(|(_, r)| r)
        .collect();

    let top = Panel::new(40.0, 280.0, rows.iter().flat_map(|r| [r.y, r.y_ref]));
    let bottom = Panel::new(370.0, 150.0, rows.iter().map(|r| r.u));

    let polyline = |panel: &Panel, f: &dyn Fn(&crate::scenario::TraceRow) -> f64, color: &str| {
        let mut pts = String::new();
        for r in &sampled {
            let v = f(r);
            if v.is_finite() {
                let _ = write!(pts, "{:.2},{:.2} ", x(r.t), panel.y(v));
            }
        }
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.trim_end()
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">"
    );
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let title = match &trace.outcome {
        Outcome::Completed => trace.scenario.clone(),
        Outcome::Diverged { time, .. } => format!("{} (diverged at t = {time} s)", trace.scenario),
    };
    let _ = writeln!(svg, "<text x=\"{LEFT}\" y=\"22\" font-size=\"14\">{}</text>", escape(&title));

    for (panel, label) in [(&top, "y, y*"), (&bottom, "u")] {
        let _ = writeln!(
            svg,
            "<rect x=\"{LEFT}\" y=\"{}\" width=\"{plot_w}\" height=\"{}\" fill=\"none\" stroke=\"#888\"/>",
            panel.top, panel.height
        );
        let _ = writeln!(
            svg,
            "<text x=\"8\" y=\"{:.1}\">{label}</text>",
            panel.top + panel.height / 2.0
        );
        for v in [panel.lo, panel.hi] {
            let _ = writeln!(
                svg,
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\" fill=\"#555\">{:.3}</text>",
                LEFT - 4.0,
                panel.y(v) + 4.0,
                v
            );
        }
        if panel.lo < 0.0 && panel.hi > 0.0 {
            let _ = writeln!(
                svg,
                "<line x1=\"{LEFT}\" x2=\"{:.1}\" y1=\"{y:.2}\" y2=\"{y:.2}\" stroke=\"#ddd\"/>",
                LEFT + plot_w,
                y = panel.y(0.0)
            );
        }
    }

    for &ts in &trace.switch_times {
        if ts <= t_end {
            let xs = x(ts);
            let _ = writeln!(
                svg,
                "<line x1=\"{xs:.2}\" x2=\"{xs:.2}\" y1=\"{}\" y2=\"{}\" stroke=\"#c33\" stroke-dasharray=\"4 3\"/>",
                top.top,
                bottom.top + bottom.height
            );
        }
    }

    svg.push_str(&polyline(&top, &|r| r.y_ref, "#999"));
    svg.push_str(&polyline(&top, &|r| r.y, "#1f5fbf"));
    svg.push_str(&polyline(&bottom, &|r| r.u, "#2a8a3a"));

    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">t [s] (0 .. {t_end})</text>",
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        "<text x=\"{:.1}\" y=\"22\" text-anchor=\"end\"><tspan fill=\"#1f5fbf\">y</tspan>  \
         <tspan fill=\"#999\">y*</tspan>  <tspan fill=\"#2a8a3a\">u</tspan>  \
         <tspan fill=\"#c33\">switch</tspan></text>",
        WIDTH - RIGHT
    );
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
