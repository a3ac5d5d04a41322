//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on usage errors, 3 on numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::experiments::{
    list_scenarios, open_defaults, read_config_file, run_scenario, validation::run_validation, Config,
};
use crate::hilbert::partial_trace_cavity;
use crate::measures::concurrence;
use crate::model::analytic_eigensystem;
use crate::open::{check_truncation_convergence, steady_state};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "cavent", version, about = "Two qubits with unequal couplings in a common cavity")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Override a configuration key (repeatable), e.g. --set g2_over_g1=0.8
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Plain key=value file applied before any --set
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

impl Overrides {
    /// File entries first, then `--set`, so the command line wins.
    fn collect(&self) -> crate::Result<Vec<String>> {
        let mut all = match &self.config {
            Some(p) => read_config_file(p)?,
            None => Vec::new(),
        };
        all.extend(self.set.iter().cloned());
        Ok(all)
    }

    fn apply(&self, cfg: &mut Config) -> crate::Result<()> {
        for pair in self.collect()? {
            cfg.set_pair(&pair)?;
        }
        cfg.validate()
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named scenario and write its CSV files
    Run {
        scenario: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Output directory (falls back to the out_dir key, then $CAVENT_OUT_DIR, then .)
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Cap on worker threads for parameter sweeps
        #[arg(long, value_name = "N")]
        threads: Option<usize>,
    },
    /// List scenario names with descriptions
    List,
    /// Print the analytic single-excitation energies and eigenvectors
    Eigen {
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Print the steady-state concurrence of the driven, lossy system
    Steady {
        #[command(flatten)]
        overrides: Overrides,
        /// Also check convergence in the Fock cutoff
        #[arg(long)]
        check_truncation: bool,
    },
    /// Run the quick invariant suite
    Validate {
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn exit_code(e: &Error) -> i32 {
    if e.is_usage() {
        EXIT_USAGE
    } else {
        EXIT_NUMERICAL
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point for the binary.
pub fn main_exit_code() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> crate::Result<i32> {
    match cmd {
        Command::List => {
            for (name, description) in list_scenarios() {
                writeln!(out, "{name:<24}{description}").map_err(io)?;
            }
        }
        Command::Run { scenario, overrides, out_dir, threads } => {
            let paths = run_scenario(&scenario, &overrides.collect()?, out_dir.as_deref(), threads)?;
            for p in paths {
                writeln!(out, "{}", p.display()).map_err(io)?;
            }
        }
        Command::Eigen { overrides } => {
            let mut cfg = Config::default();
            overrides.apply(&mut cfg)?;
            let es = analytic_eigensystem(&cfg.params())?;
            for (k, (e, v)) in es.energies().iter().zip(es.vectors()).enumerate() {
                writeln!(out, "e{} = {e}", k + 1).map_err(io)?;
                writeln!(out, "v{} = ({}, {}, {})", k + 1, v.alpha.re, v.beta.re, v.gamma.re).map_err(io)?;
            }
        }
        Command::Steady { overrides, check_truncation } => {
            let mut cfg = Config::default();
            open_defaults(&mut cfg);
            overrides.apply(&mut cfg)?;
            let p = cfg.params();
            let rho = steady_state(&p)?;
            let e = concurrence(&partial_trace_cavity(&rho, p.n_max)?)?;
            writeln!(out, "E_ss = {e}").map_err(io)?;
            if check_truncation {
                let c = check_truncation_convergence(&p)?;
                writeln!(out, "converged at n_max = {} (change {:.3e})", c.n_max_used, c.delta).map_err(io)?;
            }
        }
        Command::Validate { overrides } => {
            let mut cfg = Config::default();
            overrides.apply(&mut cfg)?;
            let checks = run_validation(cfg.seed)?;
            let mut ok = true;
            for c in &checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {}: {}", c.name, c.detail).map_err(io)?;
                ok &= c.passed;
            }
            if !ok {
                return Ok(EXIT_NUMERICAL);
            }
        }
    }
    Ok(EXIT_OK)
}
