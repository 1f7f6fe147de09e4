//! `ctinv` — Cox-Thompson fixed-energy inversion toolkit.

use clap::{Args, Parser, Subcommand, ValueEnum};
use coxthompson::generalct::ResidualForm;
use coxthompson::Complex64;
use coxthompson_cli::commands::{self, GridSpec, InvertArgs, Mode, Model};
use coxthompson_cli::files::{PhaseShiftFile, PotentialFile, SpinSplitFile};
use coxthompson_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ctinv",
    about = "Reconstruct interaction potentials from fixed-energy scattering phase shifts",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Semianalytic,
    General,
    Approximate,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormArg {
    Smatrix,
    Tangent,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Gaussian,
    WoodsSaxon,
    SquareWell,
}

#[derive(Subcommand)]
enum Command {
    /// Invert phase shifts into a potential table plus a solve report
    Invert(InvertCmd),
    /// Forward-solve a model potential and emit its phase shifts
    Synth(SynthCmd),
    /// Recompute shifts from a stored potential and compare to a reference
    Check(CheckCmd),
    /// Combine spin-orbit split shifts into central ones
    Combine(CombineCmd),
}

#[derive(Args)]
struct InvertCmd {
    /// Input phase-shift file
    #[arg(short, long)]
    input: PathBuf,
    /// Output potential file
    #[arg(short, long)]
    output: PathBuf,
    /// Solve report path (default: <output>.report.json)
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Residual form for the general method
    #[arg(long, value_enum, default_value = "tangent")]
    form: FormArg,
    #[arg(long, default_value_t = 0.05)]
    grid_min: f64,
    #[arg(long, default_value_t = 25.0)]
    grid_max: f64,
    #[arg(long, default_value_t = 500)]
    grid_n: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    /// Number of perturbed multi-start runs (0 = off)
    #[arg(long, default_value_t = 0)]
    multistart: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Interpret input angles as degrees
    #[arg(long)]
    degrees: bool,
    /// Explicit initial momenta "re,im;re,im;..." (regression mode)
    #[arg(long)]
    init: Option<String>,
}

#[derive(Args)]
struct SynthCmd {
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Dimensionless strength q = V/E of the model
    #[arg(long, allow_hyphen_values = true)]
    amp: f64,
    /// Gaussian width (in x = k r units)
    #[arg(long)]
    width: Option<f64>,
    /// Well / Woods-Saxon radius (in x units)
    #[arg(long)]
    radius: Option<f64>,
    /// Woods-Saxon surface diffuseness (in x units)
    #[arg(long)]
    diffuseness: Option<f64>,
    /// Channels, e.g. "0,2,4"
    #[arg(long)]
    channels: String,
    /// Wave number in fm^-1 (metadata)
    #[arg(long)]
    k: f64,
    /// Scattering energy in MeV (metadata)
    #[arg(long)]
    energy: f64,
    /// Integrator step
    #[arg(long, default_value_t = 0.005)]
    step: f64,
}

#[derive(Args)]
struct CheckCmd {
    /// Potential table to verify
    #[arg(long)]
    potential: PathBuf,
    /// Reference phase-shift file
    #[arg(long)]
    reference: PathBuf,
    /// Acceptance threshold on both error columns
    #[arg(long, default_value_t = 0.01)]
    threshold: f64,
    #[arg(long)]
    degrees: bool,
}

#[derive(Args)]
struct CombineCmd {
    /// Input with spin-split columns
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    degrees: bool,
}

fn parse_init(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(CliError::Usage(format!(
                    "--init entry '{pair}' is not 're,im'"
                )));
            }
            let re: f64 = parts[0]
                .parse()
                .map_err(|_| CliError::Usage(format!("bad --init number '{}'", parts[0])))?;
            let im: f64 = parts[1]
                .parse()
                .map_err(|_| CliError::Usage(format!("bad --init number '{}'", parts[1])))?;
            Ok(Complex64::new(re, im))
        })
        .collect()
}

fn parse_channels(s: &str) -> Result<Vec<u32>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad channel '{p}'")))
        })
        .collect()
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Invert(cmd) => {
            let input = PhaseShiftFile::read(&cmd.input, cmd.degrees)?;
            let args = InvertArgs {
                mode: match cmd.mode {
                    ModeArg::Semianalytic => Mode::Semianalytic,
                    ModeArg::General => Mode::General,
                    ModeArg::Approximate => Mode::Approximate,
                },
                form: match cmd.form {
                    FormArg::Smatrix => ResidualForm::SMatrix,
                    FormArg::Tangent => ResidualForm::Tangent,
                },
                grid: GridSpec { min: cmd.grid_min, max: cmd.grid_max, n: cmd.grid_n },
                tol: cmd.tol,
                max_iter: cmd.max_iter,
                multistart: cmd.multistart,
                seed: cmd.seed,
                init: cmd.init.as_deref().map(parse_init).transpose()?,
            };
            let outcome = commands::invert(&input, &args)?;
            let report_path = cmd
                .report
                .unwrap_or_else(|| PathBuf::from(format!("{}.report.json", cmd.output.display())));
            std::fs::write(&report_path, format!("{:#}\n", outcome.report))?;
            outcome.potential.write(&cmd.output)?;
            if !outcome.converged {
                return Err(CliError::Solver(format!(
                    "no convergence; best iterate written to {}",
                    report_path.display()
                )));
            }
            println!(
                "wrote {} and {}",
                cmd.output.display(),
                report_path.display()
            );
            Ok(())
        }
        Command::Synth(cmd) => {
            let need = |opt: Option<f64>, what: &str| {
                opt.ok_or_else(|| CliError::Usage(format!("--{what} is required for this model")))
            };
            let model = match cmd.model {
                ModelArg::Gaussian => Model::Gaussian {
                    amp: cmd.amp,
                    width: need(cmd.width, "width")?,
                },
                ModelArg::WoodsSaxon => Model::WoodsSaxon {
                    amp: cmd.amp,
                    radius: need(cmd.radius, "radius")?,
                    diffuseness: need(cmd.diffuseness, "diffuseness")?,
                },
                ModelArg::SquareWell => Model::SquareWell {
                    amp: cmd.amp,
                    radius: need(cmd.radius, "radius")?,
                },
            };
            let channels = parse_channels(&cmd.channels)?;
            let file = commands::synth(model, &channels, cmd.k, cmd.energy, cmd.step)?;
            file.write(&cmd.output)?;
            println!("wrote {}", cmd.output.display());
            Ok(())
        }
        Command::Check(cmd) => {
            let potential = PotentialFile::read(&cmd.potential)?;
            let reference = PhaseShiftFile::read(&cmd.reference, cmd.degrees)?;
            let outcome = commands::check(&potential, &reference, cmd.threshold)?;
            print!("{}", outcome.render());
            for d in &outcome.diagnostics {
                eprintln!("note: {d}");
            }
            if outcome.pass {
                println!("PASS (threshold {})", cmd.threshold);
                Ok(())
            } else {
                // a failed comparison is a result, not a usage problem
                println!("FAIL (threshold {})", cmd.threshold);
                Err(CliError::Solver("check threshold exceeded".into()))
            }
        }
        Command::Combine(cmd) => {
            let input = SpinSplitFile::read(&cmd.input, cmd.degrees)?;
            let file = commands::combine(&input)?;
            file.write(&cmd.output)?;
            println!("wrote {}", cmd.output.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ctinv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
