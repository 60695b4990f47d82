//! `hybrid-teleport`: run the teleportation pipeline and write its artifacts.
//!
//! Exit codes: 0 on success, 2 when arguments fail validation, 1 on any
//! other failure. Errors are reported on stderr as a single JSON object.

mod commands;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "hybrid-teleport", version, about = "Spin-to-OAM teleportation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Teleport one polarization state and print the result as JSON.
    Teleport(TeleportArgs),
    /// Render far-field intensity images of photon B as PGM files.
    Render(RenderArgs),
    /// Write an SLM phase hologram as a PGM file.
    Holo(HoloArgs),
    /// Simulated tomography table with mean fidelity per input.
    Table1(TableArgs),
}

#[derive(Debug, Args)]
pub struct AngleArgs {
    /// Read angles in degrees instead of radians.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    /// Polar angle γ of the input polarization, in [0, π].
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Relative phase δ.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub ell: i64,
    /// Force a Bell outcome: phi-plus, phi-minus, psi-plus or psi-minus.
    #[arg(long)]
    pub outcome: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Use the explicit Sagnac sorter and projective readout.
    #[arg(long)]
    pub physical: bool,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub angles: AngleArgs,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Image size in pixels, WxH.
    #[arg(long, default_value = "256x256")]
    pub grid: String,
    /// Half-width of the frame in beam waists.
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub extent: f64,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// State of photon B. Lowercase h, v, d, a, l, r, plus, minus name OAM
    /// states directly; uppercase H, V, D, A, L, R teleport that
    /// polarization first. Repeatable; defaults to L H A V D.
    #[arg(long = "state")]
    pub states: Vec<String>,
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub ell: i64,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: std::path::PathBuf,
    /// Also write little-endian f64 dumps next to each PGM.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct HoloArgs {
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub ell: i64,
    /// Grating period in pixels.
    #[arg(long, default_value_t = 16.0, allow_negative_numbers = true)]
    pub pitch: f64,
    /// sector-v, sector-h or blazed.
    #[arg(long, default_value = "sector-v")]
    pub target: String,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "hologram.pgm")]
    pub out: std::path::PathBuf,
    /// Also write the phase values as little-endian f64 to this path.
    #[arg(long)]
    pub raw: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 2, allow_negative_numbers = true)]
    pub ell: i64,
    /// Shots per projector.
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Exact expectations instead of Poisson counts.
    #[arg(long)]
    pub noiseless: bool,
    /// Extra input as label:gamma:delta. Repeatable.
    #[arg(long = "row", allow_negative_numbers = true)]
    pub rows: Vec<String>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Write the first trial's counts as CSV.
    #[arg(long)]
    pub counts: Option<std::path::PathBuf>,
    /// Write true and reconstructed density matrices as JSON.
    #[arg(long)]
    pub density: Option<std::path::PathBuf>,
    #[command(flatten)]
    pub angles: AngleArgs,
}

fn report(err: &CliError) -> ExitCode {
    let (kind, code) = match err {
        CliError::Validation(_) => ("validation", 2),
        CliError::Internal(_) => ("internal", 1),
    };
    let body = serde_json::json!({ "error": kind, "message": err.message() });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(2);
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or_default();
            return report(&CliError::Validation(first.trim_start_matches("error: ").to_string()));
        }
    };
    let result = match cli.command {
        Command::Teleport(args) => commands::teleport(&args),
        Command::Render(args) => commands::render(&args),
        Command::Holo(args) => commands::holo(&args),
        Command::Table1(args) => commands::table1(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
