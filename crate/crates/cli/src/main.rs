use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use compacton::spectral::CaseTag;
use serde::Serialize;

mod commands;
mod error;
mod evolve;
mod manifest;

use error::CliError;

#[derive(Parser)]
#[command(name = "compacton", version, about = "Profiles, functionals, spectra and evolution of compactons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify `(p, A, B, c)` and sample the traveling wave.
    Profile(ProfileArgs),
    /// Mass, Hamiltonian, momenta and identity residuals of a compacton.
    Functionals(FunctionalsArgs),
    /// Minimize the Hamiltonian over the compacton family at fixed mass.
    Minimize(MinimizeArgs),
    /// Eigenvalues of the linearized operator of a quartic compacton.
    Spectrum(SpectrumArgs),
    /// Time evolution of the nonlinear models or the linearized flow.
    Evolve(EvolveArgs),
}

#[derive(Args, Serialize, Clone)]
#[command(allow_negative_numbers = true)]
pub struct ProfileArgs {
    #[arg(long = "p", default_value_t = 4.0)]
    pub p: f64,
    #[arg(long = "A", default_value_t = 0.0)]
    pub a: f64,
    #[arg(long = "B")]
    pub b: f64,
    #[arg(long)]
    pub c: f64,
    /// Speed of the NLS compacton `Φ e^{ivθ}`; adds phase columns.
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long, default_value_t = 2048)]
    pub n: usize,
    /// Profile CSV; the sidecar and run manifests are written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Clone)]
#[command(allow_negative_numbers = true)]
pub struct FunctionalsArgs {
    /// Profile CSV written by `profile`.
    #[arg(long = "in", conflicts_with_all = ["b", "c"])]
    pub input: Option<PathBuf>,
    #[arg(long = "p", default_value_t = 4.0)]
    pub p: f64,
    #[arg(long = "B", required_unless_present = "input")]
    pub b: Option<f64>,
    #[arg(long, required_unless_present = "input")]
    pub c: Option<f64>,
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long, default_value_t = 4097)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize, Clone)]
#[command(allow_negative_numbers = true)]
pub struct MinimizeArgs {
    #[arg(long = "p")]
    pub p: f64,
    #[arg(long)]
    pub mass: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    B,
    Green,
}

#[derive(Args, Serialize, Clone)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub case: CaseTag,
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Grid size; 4096 for `b`, 800 for `green`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Truncation of the b-operator line.
    #[arg(long = "T", default_value_t = 12.0)]
    pub t_max: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Dkdv,
    Dnls,
    Hydro,
    Linear,
}

#[derive(Args, Serialize, Clone)]
#[command(allow_negative_numbers = true)]
pub struct EvolveArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// `kind[:key=value,...]`: compacton, perturbed, periodic, gaussian+const,
    /// cosine or bump. Defaults to the standard state of the model.
    #[arg(long)]
    pub ic: Option<String>,
    /// Case of the linearized flow.
    #[arg(long, default_value = "B0c1")]
    pub case: CaseTag,
    #[arg(long = "p", default_value_t = 4.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub nu: f64,
    #[arg(long)]
    pub dealias: bool,
    #[arg(long = "T", default_value_t = 1.0)]
    pub t_end: f64,
    /// Number of output intervals; snapshots are written at `k·T/samples`.
    #[arg(long, default_value_t = 2)]
    pub samples: usize,
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Box length; the dNLS box defaults to one period of the profile.
    #[arg(long = "L")]
    pub length: Option<f64>,
    #[arg(long)]
    pub out_prefix: PathBuf,
    /// `key=v1,v2,...` with key one of nu, rtol, atol, n, T; runs in parallel
    /// into separate directories.
    #[arg(long)]
    pub sweep: Option<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Profile(a) => commands::profile(&a),
        Command::Functionals(a) => commands::functionals(&a),
        Command::Minimize(a) => commands::minimize(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Evolve(a) => evolve::evolve(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}
