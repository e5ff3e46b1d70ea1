//! `gsqc`: build clock Hamiltonians, scan their gaps, run adiabatic
//! evolutions and check ground states against a circuit simulator.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gsqc_core::adiabatic::ScheduleKind;
use gsqc_core::catalog::{self, Stage};
use gsqc_core::{render, Execution, Method};

use config::{Family, GridSpec, RunConfig, StageChoice, StepRange};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "gsqc", version, about = "Ground-state quantum computation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Assemble H(λ) and write it as Matrix Market with a JSON summary.
    Build(Flags),
    /// Gap profile over a λ grid, or minimum gap across a circuit family.
    GapScan(Flags),
    /// Adiabatic evolution along a schedule; writes the fidelity trace.
    Evolve {
        #[command(flatten)]
        flags: Flags,
        /// Also write the final state (binary plus JSON sidecar).
        #[arg(long)]
        save_state: bool,
    },
    /// Check the ground-state residual, readout and gap; exit 1 on failure.
    Verify(Flags),
    /// Print a bundled circuit.
    Example(ExampleArgs),
}

#[derive(Args, Debug, Default)]
#[command(allow_negative_numbers = true)]
struct Flags {
    /// Flat `key = value` file; flags given on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Coupling in [0, 1] (default 1).
    #[arg(long)]
    lambda: Option<f64>,
    /// λ grid as start:stop:count.
    #[arg(long)]
    grid: Option<GridSpec>,
    /// Skip golden-section refinement of the gap minimum.
    #[arg(long)]
    no_refine: bool,
    /// linear | gap-adapted (default gap-adapted).
    #[arg(long)]
    schedule: Option<ScheduleKind>,
    /// Total evolution time in units of ħ/E.
    #[arg(long = "T", value_name = "T")]
    total_time: Option<f64>,
    /// Integrator step (default: largest stable step).
    #[arg(long)]
    dt: Option<f64>,
    /// dense | lanczos (default dense).
    #[arg(long)]
    method: Option<Method>,
    /// Output directory (default: current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Lanczos start-vector seed (default: derived from the circuit).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for sweeps (1 runs sequentially).
    #[arg(long)]
    threads: Option<usize>,
    /// Matrix Market operator to verify instead of the assembled one.
    #[arg(long)]
    operator: Option<PathBuf>,
    /// Circuit family for gap-scan: bell-disentangle | identity.
    #[arg(long)]
    family: Option<Family>,
    /// Step counts for a family sweep as lo:hi (default 4:12).
    #[arg(long)]
    n_range: Option<StepRange>,
    /// Where the gate string sits: before | middle | after | all.
    #[arg(long)]
    stage: Option<StageChoice>,
}

impl Flags {
    fn into_config(self) -> Result<RunConfig, CliError> {
        let flags = RunConfig {
            circuit: self.circuit,
            lambda: self.lambda,
            grid: self.grid,
            refine: self.no_refine.then_some(false),
            schedule: self.schedule,
            total_time: self.total_time,
            dt: self.dt,
            method: self.method,
            out: self.out,
            seed: self.seed,
            threads: self.threads,
            operator: self.operator,
            family: self.family,
            n_range: self.n_range,
            stage: self.stage,
        };
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let cfg = base.overlay(flags);
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ExampleName {
    DeutschJozsa,
    Bell,
    BellDisentangle,
    Identity,
}

#[derive(Args, Debug)]
struct ExampleArgs {
    name: ExampleName,
    /// Number of steps (bell-disentangle, identity).
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value = "middle")]
    stage: Stage,
    /// Deutsch-Jozsa with the f = 1 phase oracle.
    #[arg(long)]
    f1: bool,
    /// Write `<name>.gsqc` here instead of printing.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn example(args: ExampleArgs) -> Result<(), CliError> {
    let c = match args.name {
        ExampleName::DeutschJozsa => catalog::deutsch_jozsa(args.f1),
        ExampleName::Bell => catalog::bell(),
        ExampleName::BellDisentangle => catalog::bell_disentangle(args.n, args.stage)?,
        ExampleName::Identity => catalog::identity_chain(args.n)?,
    };
    let text = render(&c);
    match args.out {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
            let path = dir.join(format!("{}.gsqc", c.name));
            std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
            println!("{}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn execution(cfg: &RunConfig) -> Result<Execution, CliError> {
    match cfg.threads {
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Input(format!("cannot start {n} worker threads: {e}")))?;
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::Parallel),
    }
}

fn configured(flags: Flags) -> Result<(RunConfig, Execution), CliError> {
    let cfg = flags.into_config()?;
    let exec = execution(&cfg)?;
    Ok((cfg, exec))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Build(f) => configured(f).and_then(|(cfg, exec)| commands::build(exec, &cfg)),
        Command::GapScan(f) => configured(f).and_then(|(cfg, exec)| commands::gap_scan(exec, &cfg)),
        Command::Evolve { flags, save_state } => {
            configured(flags).and_then(|(cfg, exec)| commands::evolve(exec, &cfg, save_state))
        }
        Command::Verify(f) => configured(f).and_then(|(cfg, exec)| commands::verify(exec, &cfg)),
        Command::Example(args) => example(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
