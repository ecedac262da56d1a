//! Library side of the `mfc-lab` command: config resolution, experiment
//! execution and artifact writing. `main.rs` only parses flags and maps errors
//! to exit codes.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use mfc_core::config::parse_config_value;
use mfc_core::controller::ControllerKind;
use mfc_core::export::{metrics_json, render_svg, write_trace_csv};
use mfc_core::metrics::{compute_metrics, MetricsReport, DEFAULT_BAND_PCT};
use mfc_core::plant::builtin_catalog;
use mfc_core::scenario::{builtin_catalog_scenarios, run_closed_loop, run_many, ScenarioConfig, SimTrace};
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

pub const TRACE_FILE: &str = "trace.csv";
pub const METRICS_FILE: &str = "metrics.json";
pub const PLOT_FILE: &str = "plot.svg";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Output directory when neither `--out` nor `MFC_LAB_OUT` is given.
pub const DEFAULT_OUT_DIR: &str = "mfc-out";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DIVERGED: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] mfc_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read config `{path}`: {source}")]
    ReadConfig { path: PathBuf, source: io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_config() => EXIT_CONFIG,
            CliError::Usage(_) | CliError::ReadConfig { .. } => EXIT_CONFIG,
            CliError::Core(_) | CliError::Write { .. } => EXIT_FAILURE,
        }
    }
}

/// Where the experiment comes from, plus flag overrides.
#[derive(Debug, Clone, Default)]
pub struct ExperimentArgs {
    pub scenario: Option<String>,
    pub config: Option<PathBuf>,
    pub ts: Option<f64>,
    pub horizon: Option<f64>,
}

/// Reads `--config` (if any) and applies the flag overrides on top of it.
pub fn base_document(args: &ExperimentArgs) -> Result<Map<String, Value>, CliError> {
    let mut doc = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
                path: path.clone(),
                source,
            })?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(map)) => map,
                Ok(_) => return Err(mfc_core::Error::Parse("document must be a JSON object".into()).into()),
                Err(e) => return Err(mfc_core::Error::Parse(format!("{}: {e}", path.display())).into()),
            }
        }
        None => Map::new(),
    };
    if args.scenario.is_none() && args.config.is_none() {
        return Err(CliError::Usage("one of --scenario or --config is required".into()));
    }
    if let Some(name) = &args.scenario {
        doc.insert("scenario".into(), Value::String(name.clone()));
    }
    if let Some(ts) = args.ts {
        doc.insert("ts".into(), ts.into());
    }
    if let Some(h) = args.horizon {
        doc.insert("horizon".into(), h.into());
    }
    Ok(doc)
}

pub fn resolve_config(args: &ExperimentArgs, controller: Option<ControllerKind>) -> Result<ScenarioConfig, CliError> {
    let mut doc = base_document(args)?;
    if let Some(kind) = controller {
        doc.insert("controller".into(), Value::String(kind.name().into()));
    }
    Ok(parse_config_value(Value::Object(doc))?)
}

/// Record of one run's artifacts, written as `manifest.json`.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config_path: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub config_digest: String,
    pub controller: String,
    pub diverged: bool,
    /// The fully resolved configuration, defaults included.
    pub config: ScenarioConfig,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub metrics: MetricsReport,
}

impl RunOutcome {
    pub fn exit_code(&self) -> u8 {
        if self.manifest.diverged {
            EXIT_DIVERGED
        } else {
            EXIT_OK
        }
    }
}

fn write_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes trace, metrics, plot and manifest for a finished run into `dir`.
pub fn write_artifacts(
    dir: &Path,
    config_path: Option<&Path>,
    config: &ScenarioConfig,
    trace: &SimTrace,
) -> Result<RunOutcome, CliError> {
    fs::create_dir_all(dir).map_err(write_err(dir))?;
    let controller = config.controller.kind().name().to_string();
    let metrics = compute_metrics(trace, DEFAULT_BAND_PCT)?;

    let trace_path = dir.join(TRACE_FILE);
    let file = File::create(&trace_path).map_err(write_err(&trace_path))?;
    let mut w = BufWriter::new(file);
    write_trace_csv(trace, &mut w)
        .and_then(|_| w.flush())
        .map_err(write_err(&trace_path))?;

    let metrics_path = dir.join(METRICS_FILE);
    let doc = metrics_json(trace, &controller, &metrics);
    write_json(&metrics_path, &doc)?;

    let plot_path = dir.join(PLOT_FILE);
    fs::write(&plot_path, render_svg(trace)).map_err(write_err(&plot_path))?;

    let manifest = RunManifest {
        config_path: config_path.map(Path::to_path_buf),
        output_dir: dir.to_path_buf(),
        files: vec![trace_path, metrics_path, plot_path],
        config_digest: trace.config_digest.clone(),
        controller,
        diverged: trace.diverged(),
        config: config.clone(),
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(RunOutcome { manifest, metrics })
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(write_err(path))
}

pub fn cmd_run(args: &ExperimentArgs, controller: Option<ControllerKind>, out: &Path) -> Result<RunOutcome, CliError> {
    let config = resolve_config(args, controller)?;
    let trace = run_closed_loop(&config)?;
    write_artifacts(out, args.config.as_deref(), &config, &trace)
}

/// Bank and scenario catalog.
pub fn cmd_list(out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "plants:")?;
    for (i, e) in builtin_catalog().iter().enumerate() {
        let tau = match (e.system.state_delay(), e.system.output_delay()) {
            (Some(d), _) => format!("  state delay {} s", d.tau),
            (None, d) if d > 0.0 => format!("  output delay {d} s"),
            _ => String::new(),
        };
        writeln!(
            out,
            "  {i:>2}  {:<5} {:<17} {:<38} tau_d = {:.4} s{tau}",
            e.system.label(),
            serde_json::to_value(e.signature).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            e.transfer_function,
            e.dominant_time_constant,
        )?;
    }
    writeln!(out, "scenarios:")?;
    for s in builtin_catalog_scenarios() {
        writeln!(out, "  {:<7} ts = {:<6} horizon = {:<5} {}", s.name, s.ts, s.horizon, s.description)?;
    }
    Ok(())
}

/// One row of a comparison table.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub controller: ControllerKind,
    pub metrics: MetricsReport,
    pub outcome: Option<RunOutcome>,
}

/// Runs every controller on the same experiment, in parallel. Artifacts go to
/// `<out>/<controller>/` when `out` is given.
pub fn cmd_compare(
    args: &ExperimentArgs,
    controllers: &[ControllerKind],
    out: Option<&Path>,
) -> Result<Vec<CompareRow>, CliError> {
    if controllers.len() < 2 {
        return Err(CliError::Usage("compare needs at least two controllers".into()));
    }
    let configs = controllers
        .iter()
        .map(|&k| resolve_config(args, Some(k)))
        .collect::<Result<Vec<_>, _>>()?;
    let traces = run_many(&configs);
    let mut rows = Vec::with_capacity(configs.len());
    for ((kind, config), trace) in controllers.iter().zip(&configs).zip(traces) {
        let trace = trace?;
        let (metrics, outcome) = match out {
            Some(dir) => {
                let o = write_artifacts(&dir.join(kind.name()), args.config.as_deref(), config, &trace)?;
                (o.metrics.clone(), Some(o))
            }
            None => (compute_metrics(&trace, DEFAULT_BAND_PCT)?, None),
        };
        rows.push(CompareRow {
            controller: *kind,
            metrics,
            outcome,
        });
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

/// Fixed-width table, one row per controller.
pub fn format_table(rows: &[CompareRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:>11} {:>11} {:>9} {:>9} {:>9} {:>10} {:>8}  recovery [s]",
        "controller", "ise", "iae", "os [%]", "us [%]", "settle", "peak |u|", "diverged"
    );
    for r in rows {
        let m = &r.metrics;
        let rec: Vec<String> = m.post_switch_recovery.iter().map(|v| opt(*v)).collect();
        let _ = writeln!(
            s,
            "{:<10} {:>11.4e} {:>11.4e} {:>9.2} {:>9.2} {:>9} {:>10.4} {:>8}  {}",
            r.controller.name(),
            m.ise,
            m.iae,
            m.overshoot_pct,
            m.undershoot_pct,
            opt(m.settling_time),
            m.peak_u,
            m.diverged,
            if rec.is_empty() { "-".to_string() } else { rec.join(" ") }
        );
    }
    s
}

/// Parses a comma-separated controller list such as `pi,ipi,istar_pi`.
pub fn parse_controllers(list: &str) -> Result<Vec<ControllerKind>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<ControllerKind>().map_err(CliError::from))
        .collect()
}
