//! `nonoverlap`: compute non-overlap sets and check the bounds on them.

mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;
use crate::output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "nonoverlap",
    version,
    about = "Exact analysis of non-overlapping word sets"
)]
struct Cli {
    /// Output format; each subcommand picks its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Worker threads for parallel sweeps (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Tolerance of the rho certificate.
    #[arg(long, global = true, default_value_t = nonoverlap::certificates::RHO_TOLERANCE)]
    tolerance: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print U(A) for a set read from a file.
    USet(USetArgs),
    /// Density profile, proof inequalities and the rho certificate.
    Certify(CertifyArgs),
    /// Largest mu(U(A)) over sets of a given size.
    Search(SearchArgs),
    /// The product family Omega^(n-k) x S^k.
    Family(FamilyArgs),
    /// Level sets of the coverage function.
    Corollary(CorollaryArgs),
}

/// Where a word set comes from. `--q`/`--n` must agree with the file header.
#[derive(Args, Debug, Clone)]
pub struct SetSource {
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long)]
    pub n: Option<u32>,
    /// Word-set text file, `-` for stdin.
    #[arg(long)]
    pub set_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Brute,
    Incremental,
    Both,
}

#[derive(Args, Debug)]
pub struct USetArgs {
    #[command(flatten)]
    pub source: SetSource,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub source: SetSource,
    /// Certify this many seeded random proper sets over `--q`, `--n`.
    #[arg(long, conflicts_with = "set_file")]
    pub random: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long)]
    pub n: u32,
    /// Size of the sets searched.
    #[arg(long)]
    pub m: u64,
    #[arg(long, conflicts_with = "greedy")]
    pub exhaustive: bool,
    #[arg(long)]
    pub greedy: bool,
    /// Greedy restarts.
    #[arg(long, default_value_t = 8, requires = "greedy")]
    pub restarts: u32,
}

#[derive(Args, Debug)]
pub struct FamilyArgs {
    #[arg(long, requires_all = ["s", "k"], conflicts_with = "alpha")]
    pub q: Option<u32>,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub k: Option<u32>,
    /// Target density; `k` is then chosen as `[n alpha ln(1/alpha)]`.
    #[arg(long, required_unless_present = "q")]
    pub alpha: Option<f64>,
    #[arg(long, default_value = "nearest", requires = "alpha")]
    pub rounding: nonoverlap::families::KRounding,
}

#[derive(Args, Debug)]
pub struct CorollaryArgs {
    #[command(flatten)]
    pub source: SetSource,
    #[arg(long)]
    pub t: u32,
    /// Also verify the pointwise counting inequality of the blocked families.
    #[arg(long)]
    pub blocked: bool,
}

/// Options shared by every subcommand.
pub struct Context {
    pub seed: u64,
    pub tolerance: f64,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(CliError::usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    if !(cli.tolerance.is_finite() && cli.tolerance >= 0.0) {
        return Err(CliError::usage(
            "--tolerance must be a finite non-negative number",
        ));
    }
    let ctx = Context {
        seed: cli.seed,
        tolerance: cli.tolerance,
    };
    let (rendered, default_format, code) = match &cli.command {
        Command::USet(args) => commands::u_set(args)?,
        Command::Certify(args) => commands::certify(args, &ctx)?,
        Command::Search(args) => commands::search(args, &ctx)?,
        Command::Family(args) => commands::family(args)?,
        Command::Corollary(args) => commands::corollary(args)?,
    };
    let stdout = std::io::stdout();
    rendered.write(cli.format.unwrap_or(default_format), &mut stdout.lock())?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
