//! Command-line front end for `nsl-core`: JSON config in, CSV and JSON
//! artifacts out.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use clap::{Args, Parser, Subcommand};

use crate::commands::Output;
use crate::config::{Format, RunConfig};
use crate::error::{CliError, EXIT_OK, EXIT_VERIFY};
use crate::verify::Fault;

#[derive(Debug, Parser)]
#[command(name = "nsl", version, about = "Nonstandard Lagrangians and branched Hamiltonians")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON config file, or `-` for stdin.
    #[arg(long, global = true)]
    pub config: Option<String>,
    /// Output file. Defaults to the config's `output.path`, then stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the Cheillini condition for a Lienard system.
    CheckCheillini,
    /// Build the Lagrangian and its Hamiltonian branches and describe them.
    Build,
    /// Tabulate (x, p, branch, v, H) over a grid.
    Surface,
    /// Integrate a trajectory and report conservation and consistency.
    Simulate,
    /// Run the invariant suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Restrict to one module.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(verify::MODULES))]
        only: Option<String>,
        #[arg(long, hide = true, value_enum)]
        inject_fault: Option<Fault>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::CheckCheillini => "check-cheillini",
            Command::Build => "build",
            Command::Surface => "surface",
            Command::Simulate => "simulate",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Worker count from `NSL_THREADS`, if set to a positive integer.
fn thread_cap() -> Option<usize> {
    std::env::var("NSL_THREADS").ok()?.parse().ok().filter(|&n| n > 0)
}

pub fn run(cli: Cli) -> Result<u8, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::config(e.to_string()))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    let Cli { command, common } = cli;
    let cfg = match (&common.config, &command) {
        (Some(path), _) => Some(RunConfig::load(path)?),
        (None, Command::Verify { .. }) => None,
        (None, _) => return Err(CliError::config("--config is required")),
    };
    if let Some(cfg) = &cfg {
        cfg.check_subcommand(command.name())?;
    }
    let out_spec = cfg.as_ref().and_then(|c| c.output.clone());
    let path = common.out.clone().or_else(|| out_spec.as_ref().and_then(|o| o.path.clone()));
    let format = common.format.or_else(|| out_spec.and_then(|o| o.format)).unwrap_or(Format::Csv);
    let mut sink = output::sink(path.as_deref())?;
    let out = Output { out: sink.as_mut(), format };

    match (command, cfg) {
        (Command::Verify { seed, only, inject_fault }, _) => {
            let report = verify::run_suite(seed, only.as_deref(), inject_fault);
            for c in &report.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                eprintln!("{tag} {}::{} value={:.3e} tol={:.1e} {}", c.module, c.name, c.value, c.tolerance, c.detail);
            }
            eprintln!("seed {}", report.seed);
            output::write_json(&report, out.out)?;
            Ok(if report.passed { EXIT_OK } else { EXIT_VERIFY })
        }
        (Command::CheckCheillini, Some(cfg)) => commands::check_cheillini(&cfg, out),
        (Command::Build, Some(cfg)) => commands::build(&cfg, out),
        (Command::Surface, Some(cfg)) => commands::surface(&cfg, out),
        (Command::Simulate, Some(cfg)) => commands::simulate(&cfg, out),
        (_, None) => unreachable!("config loaded above"),
    }
}
