//! `losmimo` command-line front end.
//!
//! Exit codes: 0 success, 1 data or runtime error, 2 usage error.

mod commands;
mod units;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use units::Length;

#[derive(Parser)]
#[command(name = "losmimo", version, about = "Line-of-sight MIMO capacity, design and measurement tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity of synthesized parallel-array channels.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// Optimal spacing and distance solvers.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Capacity and SNR from THZSWEEP measurement files.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Synthetic THZSWEEP files.
    #[command(subcommand)]
    Fixture(FixtureCommand),
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// Capacity at a single geometry.
    Capacity(TheoryCapacityArgs),
    /// Capacity over a range of distance, spacing, frequency or SNR.
    Sweep(TheorySweepArgs),
}

#[derive(Args, Clone)]
pub struct LinkArgs {
    /// Carrier frequency (Hz, or with kHz/MHz/GHz/THz suffix).
    #[arg(short = 'f', long, value_parser = units::frequency)]
    frequency: f64,
    /// Inter-element spacing (m, cm, mm, or `lambda` multiples).
    #[arg(short = 's', long, value_parser = units::length)]
    spacing: Option<Length>,
    /// Tx-Rx array separation (m, cm, mm, or `lambda` multiples).
    #[arg(short = 'd', long, value_parser = units::length)]
    distance: Option<Length>,
    /// Elements per array.
    #[arg(short = 'n', long, default_value_t = 2)]
    elements: usize,
    #[arg(long, value_parser = units::decibels, default_value = "0", allow_hyphen_values = true)]
    snr_db: f64,
    #[arg(long, value_enum, default_value_t = ModelArg::Phase)]
    model: ModelArg,
    /// Defaults to none for the phase model, frobenius for amplitude.
    #[arg(long, value_enum)]
    norm: Option<NormArg>,
    #[arg(long, value_enum, default_value_t = PathArg::Exact)]
    path: PathArg,
    /// Comma-separated per-element tx amplitude gains.
    #[arg(long, value_parser = units::float_list)]
    gains_tx: Option<Vec<f64>>,
    /// Comma-separated per-element rx amplitude gains.
    #[arg(long, value_parser = units::float_list)]
    gains_rx: Option<Vec<f64>>,
}

#[derive(clap::ValueEnum, Clone, Copy)]
pub enum ModelArg {
    Phase,
    Amplitude,
}

#[derive(clap::ValueEnum, Clone, Copy)]
pub enum NormArg {
    None,
    Frobenius,
}

#[derive(clap::ValueEnum, Clone, Copy)]
pub enum PathArg {
    Exact,
    Paraxial,
}

#[derive(clap::ValueEnum, Clone, Copy)]
pub enum VarArg {
    Distance,
    Spacing,
    Frequency,
    Snr,
}

#[derive(Args)]
pub struct TheoryCapacityArgs {
    #[command(flatten)]
    link: LinkArgs,
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
pub struct TheorySweepArgs {
    #[command(flatten)]
    link: LinkArgs,
    /// Swept quantity.
    #[arg(long = "var", value_enum)]
    variable: VarArg,
    /// Range start in the variable's unit (suffixes allowed).
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    #[arg(long, allow_hyphen_values = true)]
    stop: String,
    #[arg(long, conflicts_with = "step", required_unless_present = "step")]
    count: Option<usize>,
    #[arg(long)]
    step: Option<String>,
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
    /// Also write an SVG plot of capacity against the swept variable.
    #[arg(long)]
    plot: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum DesignCommand {
    /// Spacing that orthogonalizes the channel at a given distance.
    Spacing(DesignSpacingArgs),
    /// Distances at which a given spacing is optimal.
    Distances(DesignDistancesArgs),
}

#[derive(Args)]
pub struct DesignSpacingArgs {
    #[arg(short = 'd', long, value_parser = units::length)]
    distance: Length,
    #[arg(short = 'f', long, value_parser = units::frequency)]
    frequency: f64,
    /// Path-difference order.
    #[arg(short = 'p', long, default_value_t = 0, conflicts_with = "p_max")]
    p: u32,
    /// Report every order from 0 to this value.
    #[arg(long)]
    p_max: Option<u32>,
    /// Also report the exact-geometry root.
    #[arg(long)]
    refine: bool,
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
pub struct DesignDistancesArgs {
    #[arg(short = 's', long, value_parser = units::length)]
    spacing: Length,
    #[arg(short = 'f', long, value_parser = units::frequency)]
    frequency: f64,
    #[arg(long, default_value_t = 0)]
    p_max: u32,
    #[arg(long)]
    refine: bool,
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum MeasureCommand {
    /// Capacity of the measured channel at the requested frequencies.
    Capacity(MeasureCapacityArgs),
    /// Per-pair SNR against the noise trace.
    Snr(MeasureSnrArgs),
}

#[derive(Args)]
pub struct MeasureCapacityArgs {
    /// THZSWEEP file.
    file: std::path::PathBuf,
    /// Frequencies to evaluate (repeatable).
    #[arg(short = 'f', long, value_parser = units::frequency, required = true)]
    frequency: Vec<f64>,
    /// Fixed SNR; mutually exclusive with --snr-from-noise.
    #[arg(long, value_parser = units::decibels, allow_hyphen_values = true, conflicts_with = "snr_from_noise", required_unless_present = "snr_from_noise")]
    snr_db: Option<f64>,
    /// Derive the SNR from the file's noise trace.
    #[arg(long)]
    snr_from_noise: bool,
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
pub struct MeasureSnrArgs {
    file: std::path::PathBuf,
    #[arg(short = 'f', long, value_parser = units::frequency, required = true)]
    frequency: Vec<f64>,
    /// `tx,rx` (1-based); all pairs when omitted.
    #[arg(long, value_parser = units::pair)]
    pair: Option<(usize, usize)>,
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum FixtureCommand {
    /// Write a canonical THZSWEEP file encoding a given channel and SNR.
    Generate(FixtureArgs),
}

#[derive(Args)]
pub struct FixtureArgs {
    /// Channel matrix: rows split by `;`, entries by `,` (`a+bj` or `mag@deg`).
    #[arg(long = "h", allow_hyphen_values = true)]
    matrix: String,
    #[arg(long, value_parser = units::frequency)]
    start: f64,
    #[arg(long, value_parser = units::frequency)]
    stop: f64,
    #[arg(long)]
    points: usize,
    /// Embed a noise trace this far below the mean pair power.
    #[arg(long, value_parser = units::decibels, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Overall received level applied to the matrix.
    #[arg(long, value_parser = units::decibels, default_value = "0", allow_hyphen_values = true)]
    level_db: f64,
    #[arg(short = 'd', long, value_parser = units::length, default_value = "0.3")]
    distance: Length,
    #[arg(short = 'o', long)]
    output: Option<std::path::PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Theory(TheoryCommand::Capacity(a)) => commands::theory_capacity(a),
        Command::Theory(TheoryCommand::Sweep(a)) => commands::theory_sweep(a),
        Command::Design(DesignCommand::Spacing(a)) => commands::design_spacing(a),
        Command::Design(DesignCommand::Distances(a)) => commands::design_distances(a),
        Command::Measure(MeasureCommand::Capacity(a)) => commands::measure_capacity(a),
        Command::Measure(MeasureCommand::Snr(a)) => commands::measure_snr(a),
        Command::Fixture(FixtureCommand::Generate(a)) => commands::fixture_generate(a),
    };
    match outcome {
        Ok(commands::Status::Clean) => ExitCode::SUCCESS,
        Ok(commands::Status::Flagged) => ExitCode::from(1),
        Err(commands::Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(commands::Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
