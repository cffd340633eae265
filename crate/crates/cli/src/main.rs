mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use oamcapture::am_algebra::HalfInt;
use oamcapture::cross_sections::Mode;
use oamcapture::experiment::Weighting;
use oamcapture::numeric::parse_rational;

use output::Format;

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "OAMCAPTURE_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "oamcapture",
    version,
    about = "Polarized thermal-neutron capture on 3He for ordinary and OAM neutrons"
)]
struct Cli {
    /// Emit CSV instead of a table.
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,

    /// Emit JSON with a metadata header.
    #[arg(long, global = true)]
    json: bool,

    /// Write the output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Clebsch-Gordan coefficient <j1 m1; j2 m2 | j m>.
    Cg(CgArgs),
    /// Channel cross-sections at one polarization.
    Xsec(XsecArgs),
    /// Compare the closed forms with the coupling sum on a polarization grid.
    OracleCheck(OracleCheckArgs),
    /// Channel fractions and design conditioning over a polarization grid.
    Sweep(SweepArgs),
    /// Recover the nuclear constants from counts.
    Fit(FitArgs),
    /// Simulate a counting experiment.
    Simulate(SimulateArgs),
    /// The 4He level table and channel detunings.
    Levels,
    /// Check the energy and momentum balance of n + 3He -> p + t.
    Kinematics(KinematicsArgs),
}

#[derive(Args, Debug)]
struct CgArgs {
    #[arg(value_parser = parse_halfint, allow_hyphen_values = true)]
    j1: HalfInt,
    #[arg(value_parser = parse_halfint, allow_hyphen_values = true)]
    m1: HalfInt,
    #[arg(value_parser = parse_halfint, allow_hyphen_values = true)]
    j2: HalfInt,
    #[arg(value_parser = parse_halfint, allow_hyphen_values = true)]
    m2: HalfInt,
    #[arg(value_parser = parse_halfint, allow_hyphen_values = true)]
    j: HalfInt,
    #[arg(value_parser = parse_halfint, allow_hyphen_values = true)]
    m: HalfInt,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long, value_parser = parse_mode, default_value = "oam")]
    mode: Mode,

    /// Nuclear constants, one per channel in J order (default: all 1).
    #[arg(long, value_delimiter = ',', value_parser = parse_constant, allow_hyphen_values = true)]
    k: Vec<BigRational>,
}

#[derive(Args, Debug)]
struct XsecArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Neutron spin polarization.
    #[arg(long, value_parser = parse_polarization, default_value = "0", allow_hyphen_values = true)]
    p: BigRational,

    /// Neutron orbital polarization.
    #[arg(long, value_parser = parse_polarization, default_value = "0", allow_hyphen_values = true)]
    pl: BigRational,

    /// ³He nuclear polarization.
    #[arg(long, value_parser = parse_polarization, default_value = "0", allow_hyphen_values = true)]
    pn: BigRational,

    /// Evaluation method, e.g. closed-form or oracle.
    #[arg(long, default_value = "closed-form")]
    method: String,
}

#[derive(Args, Debug)]
struct OracleCheckArgs {
    /// Points per polarization axis.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..=65))]
    grid: u32,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_parser = parse_mode, default_value = "oam")]
    mode: Mode,

    /// Points per polarization axis.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..=65))]
    grid: u32,

    /// Keep only the first N rows.
    #[arg(long, value_name = "N")]
    top: Option<usize>,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long, value_parser = parse_mode, default_value = "oam")]
    mode: Mode,

    /// Settings CSV: p,P_L,P_N,exposure,depth.
    #[arg(long, value_name = "FILE")]
    settings: PathBuf,

    /// Counts CSV: setting_id,capture,transmitted[,capture_<J^pi>...].
    #[arg(long, value_name = "FILE")]
    counts: PathBuf,

    /// Fit the per-channel captures instead of their sum.
    #[arg(long)]
    resolved: bool,

    /// Residual weights: 1/max(count,1) or 1/max(model,1).
    #[arg(long, value_parser = parse_weighting, default_value = "counts")]
    weights: Weighting,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,

    /// Settings CSV; replaces --grid, --exposure and --depth.
    #[arg(long, value_name = "FILE", conflicts_with = "grid")]
    settings: Option<PathBuf>,

    /// Points per polarization axis of a uniform settings grid.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(2..=65))]
    grid: u32,

    /// Incident neutrons per setting.
    #[arg(long, default_value_t = 1e4, value_parser = parse_positive)]
    exposure: f64,

    /// Optical depth per unit cross-section.
    #[arg(long, default_value_t = 0.1, value_parser = parse_positive)]
    depth: f64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Also report captures per channel.
    #[arg(long)]
    resolved: bool,

    /// Write the settings used to this CSV file.
    #[arg(long, value_name = "FILE")]
    settings_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct KinematicsArgs {
    /// Q-value in keV.
    #[arg(long, default_value_t = 764.0)]
    q: f64,

    /// Proton kinetic energy in keV.
    #[arg(long, default_value_t = 573.0)]
    ep: f64,

    /// Triton kinetic energy in keV.
    #[arg(long, default_value_t = 191.0)]
    et: f64,
}

fn parse_halfint(s: &str) -> Result<HalfInt, String> {
    s.parse().map_err(|e: oamcapture::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: oamcapture::Error| e.to_string())
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    match s {
        "counts" => Ok(Weighting::Counts),
        "model" => Ok(Weighting::Model),
        _ => Err("expected counts or model".into()),
    }
}

fn parse_polarization(s: &str) -> Result<BigRational, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    let one = BigRational::from_integer(1.into());
    if r > one || r < -one {
        return Err("polarization must lie in [-1, 1]".into());
    }
    Ok(r)
}

fn parse_constant(s: &str) -> Result<BigRational, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if r < BigRational::from_integer(0.into()) {
        return Err("nuclear constants must be nonnegative".into());
    }
    Ok(r)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err("expected a positive number".into()),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| e.to_string())
}

fn usage_error(message: &str) -> ExitCode {
    eprintln!("{message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            // First paragraph of the clap message, folded onto one line.
            let text = e.to_string();
            let first: Vec<&str> = text
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            return usage_error(&first.join(" "));
        }
    };
    if let Err(message) = configure_threads() {
        return usage_error(&format!("error: {message}"));
    }

    let format = if cli.csv {
        Format::Csv
    } else if cli.json {
        Format::Json
    } else {
        Format::Human
    };

    let outcome = match commands::run(cli.command) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };

    let text = outcome.report.render(format, &argv);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if let Some(note) = &outcome.note {
        eprintln!("{note}");
    }
    ExitCode::from(outcome.exit_code)
}
