use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mfc_core::controller::ControllerKind;
use mfc_lab::{
    cmd_compare, cmd_list, cmd_run, format_table, parse_controllers, CliError, ExperimentArgs,
    DEFAULT_OUT_DIR, EXIT_CONFIG, EXIT_DIVERGED, EXIT_FAILURE, EXIT_OK,
};

/// Closed-loop experiments with PI, i-PI and i*-PI controllers on switching and
/// time-delay plants.
///
/// Exit status: 0 success, 2 configuration error, 3 diverged run (trace still written).
#[derive(Parser)]
#[command(name = "mfc-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write trace.csv, metrics.json, plot.svg and manifest.json.
    Run {
        #[command(flatten)]
        experiment: Experiment,
        /// pi, ipi or istar_pi. Selects the scenario's tuning for that controller.
        #[arg(long)]
        controller: Option<String>,
        #[arg(long, env = "MFC_LAB_OUT", default_value = DEFAULT_OUT_DIR)]
        out: PathBuf,
    },
    /// Print the plant bank and the builtin scenarios.
    List,
    /// Run several controllers on the same experiment and print a metrics table.
    Compare {
        #[command(flatten)]
        experiment: Experiment,
        /// Comma-separated list, e.g. pi,ipi,istar_pi.
        #[arg(long, default_value = "pi,ipi,istar_pi")]
        controllers: String,
        /// Also write each run's artifacts to <OUT>/<controller>/.
        #[arg(long, env = "MFC_LAB_OUT")]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Experiment {
    /// Builtin scenario name (see `list`).
    #[arg(long)]
    scenario: Option<String>,
    /// JSON experiment document. Flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sample period in seconds.
    #[arg(long)]
    ts: Option<f64>,
    /// Simulated duration in seconds.
    #[arg(long)]
    horizon: Option<f64>,
}

impl From<Experiment> for ExperimentArgs {
    fn from(e: Experiment) -> Self {
        ExperimentArgs {
            scenario: e.scenario,
            config: e.config,
            ts: e.ts,
            horizon: e.horizon,
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run {
            experiment,
            controller,
            out,
        } => {
            let kind = controller.map(|c| c.parse::<ControllerKind>()).transpose()?;
            let outcome = cmd_run(&experiment.into(), kind, &out)?;
            let m = &outcome.metrics;
            let mut stdout = io::stdout().lock();
            let _ = writeln!(
                stdout,
                "{} {}: ise = {:.4e}, settling = {}, diverged = {}",
                outcome.manifest.config.name,
                outcome.manifest.controller,
                m.ise,
                m.settling_time.map_or("-".into(), |t| format!("{t:.4} s")),
                m.diverged
            );
            let _ = writeln!(stdout, "wrote {}", out.display());
            Ok(outcome.exit_code())
        }
        Command::List => {
            match cmd_list(&mut io::stdout().lock()) {
                Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
                    return Err(CliError::Write {
                        path: "<stdout>".into(),
                        source: e,
                    })
                }
                _ => {}
            }
            Ok(EXIT_OK)
        }
        Command::Compare {
            experiment,
            controllers,
            out,
        } => {
            let kinds = parse_controllers(&controllers)?;
            let rows = cmd_compare(&experiment.into(), &kinds, out.as_deref())?;
            let _ = io::stdout().lock().write_all(format_table(&rows).as_bytes());
            Ok(if rows.iter().any(|r| r.metrics.diverged) {
                EXIT_DIVERGED
            } else {
                EXIT_OK
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            let code = e.exit_code();
            ExitCode::from(if code == EXIT_OK { EXIT_FAILURE } else { code })
        }
    }
}
