//! Command-line front end: `verify`, `extract`, `resolve` and `demo`.
//!
//! Exit codes: 0 when every check passes, 2 when a mathematical check fails,
//! 1 on input or configuration errors.

mod catalog;
mod commands;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use catalog::{builtin_catalog, CatalogEntry};
pub use commands::{cmd_demo, cmd_extract, cmd_resolve, cmd_verify};

use crate::convex::GridSpec;
use crate::error::{Error, Result};
use crate::witness::{DEFAULT_BUDGET, DEFAULT_TOL};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAIL: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Verify,
    Extract,
    Resolve,
    Demo,
}

impl Command {
    /// CSV for batch outputs, JSON for single reports.
    pub fn default_format(self) -> Format {
        match self {
            Command::Resolve | Command::Demo => Format::Csv,
            Command::Verify | Command::Extract => Format::Json,
        }
    }
}

/// One `LO,HI,COUNT` box axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

impl std::str::FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected LO,HI,COUNT, got {s:?}"));
        }
        let lower: f64 = parts[0].parse().map_err(|_| format!("bad lower bound {:?}", parts[0]))?;
        let upper: f64 = parts[1].parse().map_err(|_| format!("bad upper bound {:?}", parts[1]))?;
        let count: usize = parts[2].parse().map_err(|_| format!("bad count {:?}", parts[2]))?;
        Ok(Axis { lower, upper, count })
    }
}

/// Everything a command needs, after flag parsing.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    /// Box axes as given; empty means the command default.
    pub axes: Vec<Axis>,
    pub tol: f64,
    pub budget: usize,
    pub out: PathBuf,
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            input: None,
            axes: Vec::new(),
            tol: DEFAULT_TOL,
            budget: DEFAULT_BUDGET,
            out: PathBuf::from("monorep-out"),
            format: command.default_format(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::InvalidInput(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.budget == 0 {
            return Err(Error::InvalidInput("--budget must be positive".into()));
        }
        Ok(())
    }

    /// Grid of dimension `dim` from the `--box` flags: none gives the
    /// default axis on every dimension, one is replicated, otherwise one per
    /// axis is required.
    pub fn grid(&self, dim: usize, default: Axis) -> Result<GridSpec> {
        let axes: Vec<Axis> = match self.axes.len() {
            0 => vec![default; dim],
            1 => vec![self.axes[0]; dim],
            k if k == dim => self.axes.clone(),
            k => {
                return Err(Error::InvalidInput(format!(
                    "--box given {k} times; expected 1 or {dim} axes"
                )))
            }
        };
        GridSpec::new(
            axes.iter().map(|a| a.lower).collect(),
            axes.iter().map(|a| a.upper).collect(),
            axes.iter().map(|a| a.count).collect(),
        )
    }
}

#[derive(Debug, Parser)]
#[command(name = "monorep", version, about = "Representative functions of monotone operators")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Check h ≥ ⟨x,v⟩ and J(h) ≥ ⟨x,v⟩ on a box grid.
    Verify(Flags),
    /// Extract {h = ⟨x,v⟩} on a box grid and check it is monotone.
    Extract(Flags),
    /// Solve v0 ∈ T(x) + J(x) on a grid of v0 and report certificates.
    Resolve(Flags),
    /// Run the operator catalog end to end.
    Demo(Flags),
}

#[derive(Debug, Args)]
struct Flags {
    /// Representative spec (JSON); for `demo`, an optional catalog file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "monorep-out")]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOL, allow_hyphen_values = true)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Box axis `LO,HI,COUNT`; repeat once per axis or give once for all.
    #[arg(long = "box", value_name = "LO,HI,COUNT", allow_hyphen_values = true)]
    axes: Vec<Axis>,
    /// Output format; CSV by default for `resolve` and `demo`, JSON otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    let (command, flags) = match cli.command {
        Sub::Verify(f) => (Command::Verify, f),
        Sub::Extract(f) => (Command::Extract, f),
        Sub::Resolve(f) => (Command::Resolve, f),
        Sub::Demo(f) => (Command::Demo, f),
    };
    let config = RunConfig {
        command,
        input: flags.input,
        axes: flags.axes,
        tol: flags.tol,
        budget: flags.budget,
        out: flags.out,
        format: flags.format.unwrap_or_else(|| command.default_format()),
    };
    match command {
        Command::Verify => cmd_verify(&config),
        Command::Extract => cmd_extract(&config),
        Command::Resolve => cmd_resolve(&config),
        Command::Demo => cmd_demo(&config),
    }
}

/// Caps the rayon pool at `MONOREP_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("MONOREP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidInput(format!("MONOREP_THREADS must be a positive integer, got {raw:?}")))?;
    // a pool built earlier in the same process wins; that is fine
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}
