mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] superint_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Parser, Debug)]
#[command(name = "superint", version, about = "Exact checks and spectra for generic superintegrable systems")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify quantum relation families listed in a manifest.
    VerifyAlgebra(ManifestArgs),
    /// Verify the Poisson relations and the quantum/classical sign.
    ClassicalCheck(ManifestArgs),
    /// Finite-dimensional representations and the algebraic spectrum (d = 3).
    RacahSpectrum(SpectrumArgs),
    /// Finite-difference spectrum against the closed form.
    PdeCheck(PdeArgs),
    /// Match algebraic sign patterns against separation of variables.
    CrossCheck(CrossArgs),
}

#[derive(Args, Debug)]
pub struct ManifestArgs {
    /// JSON manifest; the built-in default runs the two worked examples.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Report path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Comma-separated `l_1,l_2,l_3`, e.g. `1/2,1/2,13/2`.
    #[arg(long)]
    l: String,
    /// `all`, `h2` (+,+,-), `s2` (+,+,+) or an explicit `±,±,±`.
    #[arg(long, default_value = "all")]
    signs: String,
    #[arg(long, default_value_t = 8)]
    max_p: u32,
    /// Include certified representations without a normalizable state.
    #[arg(long)]
    all_reps: bool,
    #[arg(long, value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PdeArgs {
    #[arg(long, value_parser = ["h2", "s2"])]
    surface: String,
    #[arg(long)]
    l: String,
    /// Finest node count.
    #[arg(long, default_value_t = 4096)]
    grid: usize,
    #[arg(long, default_value_t = 3)]
    refinements: usize,
    /// Number of `P` levels.
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Relative tolerance for the comparison with the closed form.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CrossArgs {
    #[arg(long)]
    l: String,
    /// Metric label such as `+,+,-`.
    #[arg(long, allow_hyphen_values = true)]
    signature: String,
    #[arg(long, default_value_t = 8)]
    max_p: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::VerifyAlgebra(a) => commands::verify_algebra(&a),
        Command::ClassicalCheck(a) => commands::classical_check(&a),
        Command::RacahSpectrum(a) => commands::racah_spectrum(&a),
        Command::PdeCheck(a) => commands::pde_check(&a),
        Command::CrossCheck(a) => commands::cross_check(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("superint: {e}");
            ExitCode::from(2)
        }
    }
}
