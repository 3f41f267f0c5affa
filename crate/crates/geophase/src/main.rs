use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use geophase::commands::{self, Context, Report};
use geophase::config::{self, ConfigFile, FidelityMode, GateKind, Overrides, RunConfig};
use geophase::CliError;

/// Adiabatic geometric-gate simulator for two-level systems.
#[derive(Parser)]
#[command(name = "geophase", version)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed, overriding the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "geophase-out")]
    out: PathBuf,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Named working point.
    #[arg(long, global = true)]
    preset: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cone Berry phase by closed form and by quadrature.
    Berry,
    /// Print a gate matrix.
    Gate {
        #[arg(long, value_enum)]
        kind: Option<GateKind>,
    },
    /// Monte Carlo average fidelity sweeps.
    Fidelity {
        #[arg(long, value_enum)]
        mode: Option<FidelityMode>,
    },
    /// Controlled-gate fidelity sweep.
    TwoQubit,
    /// Time-domain check of the two-loop protocol.
    Oracle,
    /// Simulated tomographic readout of the Berry phase.
    Tomo,
    /// Circuit parameters of the working point.
    Params,
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let file = match &cli.config {
        Some(p) => config::load_file(p)?,
        None => ConfigFile::default(),
    };
    let mut over = Overrides {
        preset: cli.preset,
        seed: cli.seed,
        ..Overrides::default()
    };
    match &cli.command {
        Command::Gate { kind } => over.gate_kind = *kind,
        Command::Fidelity { mode } => over.fidelity_mode = *mode,
        _ => {}
    }
    let cfg = RunConfig::resolve(file, over)?;
    let workers = match cli.workers {
        Some(0) => return Err(CliError::Config("--workers must be at least 1".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let ctx = Context {
        cfg,
        out: cli.out,
        workers,
    };
    match cli.command {
        Command::Berry => commands::berry(&ctx),
        Command::Gate { .. } => commands::gate(&ctx),
        Command::Fidelity { .. } => commands::fidelity(&ctx),
        Command::TwoQubit => commands::two_qubit(&ctx),
        Command::Oracle => commands::oracle(&ctx),
        Command::Tomo => commands::tomography(&ctx),
        Command::Params => commands::params(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(report) => {
            // A closed stdout (e.g. piped into `head`) is not a failure.
            let mut out = std::io::stdout().lock();
            for line in &report.lines {
                let _ = writeln!(out, "{line}");
            }
            for f in &report.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
