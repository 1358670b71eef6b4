//! Command-line front end: argument parsing, report writers and run manifests.

pub mod commands;
pub mod csvio;
pub mod error;
pub mod figures;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::Output;
pub use error::{CliError, CliResult, EXIT_ARGUMENT, EXIT_DEGRADED, EXIT_INVARIANT, EXIT_OK};

pub const THREADS_ENV: &str = "HEAVYLS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "heavyls", version, about = "Shape-constrained least squares under heavy-tailed noise")]
pub struct Cli {
    /// Directory for output files and the run manifest; created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the class LSE to a two-column (x, y) CSV.
    Fit(commands::fit::FitArgs),
    /// Evaluate the local envelope at points, as a band, or as a growth profile.
    Envelope(commands::envelope::EnvelopeArgs),
    /// Predicted rate exponent, moment threshold and tail exponent for an entropy regime.
    Predict(commands::predict::PredictArgs),
    /// Regenerate the (alpha, s, moments) tables.
    Tables,
    /// Monte Carlo rate experiment from a JSON config.
    Rates(commands::experiments::RatesArgs),
    /// Tail experiment at one sample size, with a gaussian twin.
    Tails(commands::experiments::TailsArgs),
    /// Monte Carlo check of the finite-maximum inequality.
    Maxineq(commands::maxineq::MaxIneqArgs),
    /// Randomized check of an interpolation inequality.
    Interp(commands::interp::InterpArgs),
}

/// Caps the global rayon pool at `HEAVYLS_THREADS` when it is set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| error::bad_arg(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli, args: Vec<String>) -> CliResult<Output> {
    let out = match &cli.command {
        Command::Fit(a) => commands::fit::run(a)?,
        Command::Envelope(a) => commands::envelope::run(a)?,
        Command::Predict(a) => commands::predict::run(a)?,
        Command::Tables => commands::tables::run()?,
        Command::Rates(a) => commands::experiments::run_rates(a)?,
        Command::Tails(a) => commands::experiments::run_tails(a)?,
        Command::Maxineq(a) => commands::maxineq::run(a)?,
        Command::Interp(a) => commands::interp::run(a)?,
    };
    if let Some(dir) = &cli.out {
        out.write_to(dir, args)?;
    }
    Ok(out)
}

/// Runs the tool on `argv`, writing results to `stdout` and diagnostics to `stderr`;
/// returns the process exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => EXIT_ARGUMENT,
            };
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "error: {e}");
        return e.exit_code();
    }
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, args) {
        Ok(out) => {
            let _ = stdout.write_all(out.stdout.as_bytes());
            for w in &out.warnings {
                let _ = writeln!(stderr, "warning: {w}");
            }
            if out.degraded {
                let _ = writeln!(stderr, "run degraded");
                EXIT_DEGRADED
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
