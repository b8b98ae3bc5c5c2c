use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use xv_pjt::cli::{self, ParamSource, RunConfig, ScanRange};
use xv_pjt::presets::Defect;

/// Vibronic spectra of neutral group-IV vacancy centers in diamond.
#[derive(Debug, Parser)]
#[command(name = "xv-pjt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Lowest vibronic levels with labels, characters and distortion.
    Spectrum(SpectrumArgs),
    /// Classical adiabatic sheets along X at fixed Y.
    #[command(allow_negative_numbers = true)]
    Apes(ApesArgs),
    /// Low-lying energies and delta for a list of Fock cutoffs.
    Converge(ConvergeArgs),
}

#[derive(Debug, Args)]
struct SourceArgs {
    /// Defect preset: SiV, GeV, SnV or PbV.
    #[arg(long, conflicts_with = "params", required_unless_present = "params")]
    preset: Option<String>,
    /// key=value parameter file.
    #[arg(long)]
    params: Option<PathBuf>,
}

impl SourceArgs {
    fn resolve(&self) -> xv_pjt::Result<ParamSource> {
        match (&self.preset, &self.params) {
            (Some(name), _) => Ok(ParamSource::Preset(name.parse::<Defect>()?)),
            (None, Some(path)) => Ok(ParamSource::File(path.clone())),
            (None, None) => unreachable!("clap requires one source"),
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Maximum total phonon quanta n + m.
    #[arg(long, default_value_t = cli::DEFAULT_CUTOFF)]
    cutoff: u32,
    /// Number of states to report.
    #[arg(long, default_value_t = cli::DEFAULT_STATES)]
    states: usize,
    /// Eigenpair residual bound in meV.
    #[arg(long, default_value_t = xv_pjt::eigensolver::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Output file (default: standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

impl SolveArgs {
    fn config(&self) -> xv_pjt::Result<RunConfig> {
        Ok(RunConfig {
            source: self.source.resolve()?,
            cutoff: self.cutoff,
            num_states: self.states,
            tolerance: self.tolerance,
        })
    }
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    solve: SolveArgs,
}

#[derive(Debug, Args)]
struct ApesArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, default_value_t = -4.0)]
    xmin: f64,
    #[arg(long, default_value_t = 4.0)]
    xmax: f64,
    #[arg(long, default_value_t = 81)]
    points: usize,
    /// Fixed Y coordinate of the scan line.
    #[arg(long, default_value_t = 0.0)]
    y: f64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvergeArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Comma-separated ascending cutoffs.
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20,25")]
    cutoffs: Vec<u32>,
    /// Ground-energy change (meV) counted as converged.
    #[arg(long, default_value_t = 1e-3)]
    threshold: f64,
}

fn open_output(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> xv_pjt::Result<bool> {
    let mut diag = io::stderr().lock();
    match cli.command {
        Command::Spectrum(args) => {
            let config = args.solve.config()?;
            let mut out = open_output(&args.solve.output)?;
            cli::cmd_spectrum(&config, &mut out, &mut diag)?;
            out.flush()?;
            Ok(true)
        }
        Command::Apes(args) => {
            let source = args.source.resolve()?;
            let range = ScanRange {
                xmin: args.xmin,
                xmax: args.xmax,
                points: args.points,
                y: args.y,
            };
            let mut out = open_output(&args.output)?;
            cli::cmd_apes(&source, &range, &mut out)?;
            out.flush()?;
            Ok(true)
        }
        Command::Converge(args) => {
            let config = args.solve.config()?;
            let mut out = open_output(&args.solve.output)?;
            let ok =
                cli::cmd_converge(&config, &args.cutoffs, args.threshold, &mut out, &mut diag)?;
            out.flush()?;
            Ok(ok)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
