use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "pairlab", version, about = "Two trapped particles with a contact interaction")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; falls back to PAIRLAB_THREADS, then to the core count.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// key=value file of default flags; flags on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Standard,
    #[value(name = "strict-1d")]
    Strict1d,
    Both,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relative energy against coupling, one curve per branch.
    Spectrum(SpectrumArgs),
    /// Schmidt and Slater decompositions of the ground state at one coupling.
    Decompose(DecomposeArgs),
    /// Entanglement measures along a range of couplings.
    Scan(ScanArgs),
    /// Natural orbitals of the non-interacting ladder.
    Noninteracting(NoninteractingArgs),
    /// Slater-like expansions of the infinitely repulsive states.
    Fermionized(FermionizedArgs),
    /// Grid density-matrix eigenvalues against the analytic decompositions.
    Oracle(OracleArgs),
    /// Finite-difference residuals and the contact derivative jump.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Decompose(_) => "decompose",
            Command::Scan(_) => "scan",
            Command::Noninteracting(_) => "noninteracting",
            Command::Fermionized(_) => "fermionized",
            Command::Oracle(_) => "oracle",
            Command::Verify(_) => "verify",
        }
    }
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = -8.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 8.0)]
    pub gamma_max: f64,
    /// Number of couplings, endpoints included.
    #[arg(long, default_value_t = 400)]
    pub steps: usize,
    #[arg(long, default_value_t = 3)]
    pub branches: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct DecomposeArgs {
    /// Relative quantum number λ̃ = ε_r − 1/2.
    #[arg(long, conflicts_with = "gamma", required_unless_present = "gamma")]
    pub lambda: Option<f64>,
    /// Coupling; solved for the energy on `--branch`.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub branch: usize,
    /// Fixed truncation instead of the escalating default.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Eigenvalues listed per representation.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct ScanArgs {
    #[arg(long, default_value_t = -6.0)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 0.99)]
    pub lambda_max: f64,
    /// Number of couplings, endpoints included.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long)]
    pub n_max: Option<usize>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct NoninteractingArgs {
    /// Highest center-of-mass quantum number.
    #[arg(long, default_value_t = 12)]
    pub max_n: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct FermionizedArgs {
    #[arg(long, default_value_t = 12)]
    pub max_energy: usize,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct OracleArgs {
    #[arg(long, required_unless_present = "analytic_json")]
    pub lambda: Option<f64>,
    /// Odd number of grid points per axis.
    #[arg(long, default_value_t = 801)]
    pub points: usize,
    /// Grid half-width.
    #[arg(long, default_value_t = 12.0)]
    pub extent: f64,
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Leading occupations compared.
    #[arg(long, default_value_t = 8)]
    pub top_k: usize,
    #[arg(long, value_enum, default_value_t = OracleMode::Both)]
    pub mode: OracleMode,
    /// JSON written by `decompose`, used instead of recomputing the
    /// analytic eigenvalues.
    #[arg(long)]
    pub analytic_json: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub struct VerifyArgs {
    /// Comma-separated relative quantum numbers.
    #[arg(long, value_delimiter = ',', default_values_t = vec![-1.0, 0.0, 0.5])]
    pub lambda: Vec<f64>,
    /// Grid spacing for the residual; the coarse column uses twice this.
    #[arg(long, default_value_t = 1e-3)]
    pub spacing: f64,
    #[arg(long, default_value_t = 6.0)]
    pub extent: f64,
    /// Step of the one-sided differences at contact.
    #[arg(long, default_value_t = 1e-3)]
    pub jump_step: f64,
}
