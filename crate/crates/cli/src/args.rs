use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "powerwl",
    version,
    about = "Spectral laws and Monte Carlo for power-law deformed Wishart-Laguerre ensembles",
    long_about = "Spectral laws and Monte Carlo for power-law deformed Wishart-Laguerre ensembles.\n\n\
        density-macro  large-N densities (Marchenko-Pastur and its deformation)\n\
        density-micro  hard-edge microscopic densities\n\
        first-eig      smallest-eigenvalue distributions\n\
        gap            gap probabilities (beta = 2, nu = 0)\n\
        spacing        N = 2 nearest-neighbour spacing laws\n\
        finite-n       exact finite-N densities\n\
        sample         Monte Carlo spectra and their statistics\n\
        fit            fit alpha to an empirical spectrum\n\
        selfcheck      fast invariant suite\n\n\
        Any flag can also be set as `flag=value` in a --config file; flags on the\n\
        command line win. POWERWL_THREADS sets the worker count."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output file (standard output if omitted).
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Output format; defaults to csv, or json for fit and selfcheck.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// key=value file with default flag values.
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Large-N density in x = λ/⟨λ⟩.
    DensityMacro(MacroArgs),
    /// Microscopic hard-edge density.
    DensityMicro(MicroArgs),
    /// Distribution of the smallest eigenvalue in microscopic units.
    FirstEig(MicroArgs),
    /// Probability that (0, s] holds no eigenvalue.
    Gap(GapArgs),
    /// N = 2 spacing distribution.
    Spacing(SpacingArgs),
    /// Exact finite-N one-point density.
    FiniteN(FiniteArgs),
    /// Monte Carlo sample of eigenvalues.
    Sample(SampleArgs),
    /// Fit alpha to a data table or an eigenvalue list.
    Fit(FitArgs),
    /// Run the fast invariant suite.
    Selfcheck(SelfcheckArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::DensityMacro(_) => "density-macro",
            Command::DensityMicro(_) => "density-micro",
            Command::FirstEig(_) => "first-eig",
            Command::Gap(_) => "gap",
            Command::Spacing(_) => "spacing",
            Command::FiniteN(_) => "finite-n",
            Command::Sample(_) => "sample",
            Command::Fit(_) => "fit",
            Command::Selfcheck(_) => "selfcheck",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantArg {
    Standard,
    Generalized,
}

impl From<VariantArg> for powerwl::Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => powerwl::Variant::Standard,
            VariantArg::Generalized => powerwl::Variant::Generalized,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MacroKind {
    Density,
    TailAsymptote,
    SmallXAsymptote,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MacroArgs {
    /// Deformation exponent (α > −1, α ≠ 0); required for the generalized law.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Aspect ratio c = N/M in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, value_enum, default_value = "generalized")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "density")]
    pub kind: MacroKind,
    /// min:max:points[:linear|log]
    #[arg(long, default_value = "0.001:8:512:log")]
    pub grid: String,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct MicroArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub nu: u32,
    #[arg(long, default_value_t = 2)]
    pub beta: u8,
    #[arg(long, value_enum, default_value = "generalized")]
    pub variant: VariantArg,
    #[arg(long, default_value = "0.01:10:400")]
    pub grid: String,
}

#[derive(Debug, Args, Serialize, Clone, Copy)]
#[serde(rename_all = "kebab-case")]
pub struct EnsembleArgs {
    #[arg(long, default_value_t = 2)]
    pub beta: u8,
    /// Matrix size N.
    #[arg(long = "N", default_value_t = 2)]
    #[serde(rename = "N")]
    pub n_size: usize,
    #[arg(long, default_value_t = 0)]
    pub nu: u32,
    /// Potential scale n.
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
    /// Mixture exponent α = γ − (β/2)N(N+ν) − 1 (give this or --gamma).
    #[arg(long, allow_negative_numbers = true, conflicts_with = "gamma")]
    pub alpha: Option<f64>,
    /// Power-law exponent γ of the weight.
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapMode {
    Micro,
    Finite,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct GapArgs {
    #[arg(long, value_enum, default_value = "micro")]
    pub mode: GapMode,
    #[arg(long, value_enum, default_value = "generalized")]
    pub variant: VariantArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value = "0:20:401")]
    pub grid: String,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SpacingArgs {
    #[arg(long, default_value_t = 2)]
    pub beta: u8,
    /// Flavour number ν; ν̄ = (β/2)(ν+1) − 1.
    #[arg(long, conflicts_with = "nubar")]
    pub nu: Option<u32>,
    /// Set ν̄ directly.
    #[arg(long, allow_negative_numbers = true)]
    pub nubar: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub n: f64,
    #[arg(long, conflicts_with = "varpi")]
    pub gamma: Option<f64>,
    /// Tail parameter ϖ = γ − β − 2ν̄ − 2.
    #[arg(long)]
    pub varpi: Option<f64>,
    #[arg(long, value_enum, default_value = "generalized")]
    pub variant: VariantArg,
    /// Rescale to unit mean spacing.
    #[arg(long)]
    pub rescaled: bool,
    #[arg(long, default_value = "0:5:501")]
    pub grid: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiniteKind {
    Density,
    /// |x|⟨λ⟩R(⟨λ⟩x²)/N, comparable with the large-N law.
    Theta,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FiniteArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, value_enum, default_value = "generalized")]
    pub variant: VariantArg,
    #[arg(long, value_enum, default_value = "density")]
    pub kind: FiniteKind,
    #[arg(long, default_value = "0.001:10:500")]
    pub grid: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Dense,
    Bidiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatArg {
    /// Raw eigenvalues, one row per eigenvalue.
    Eigenvalues,
    Histogram,
    Smallest,
    Spacings,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RescalingArg {
    Raw,
    MeanScaled,
    Micro,
    SpacingScaled,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "dense")]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value = "eigenvalues")]
    pub stat: StatArg,
    #[arg(long, value_enum, default_value = "raw")]
    pub rescaling: RescalingArg,
    /// Histogram bin count (Freedman–Diaconis if omitted).
    #[arg(long)]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    /// One column means an eigenvalue list, several mean a data table.
    Auto,
    Table,
    Eigenvalues,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethodArg {
    Mle,
    LeastSquares,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitArgs {
    /// CSV table (rows = observations) or eigenvalue list.
    #[arg(long)]
    pub input: std::path::PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub input_kind: InputKind,
    /// Aspect ratio; taken from the table shape if omitted.
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value = "mle")]
    pub method: FitMethodArg,
}

#[derive(Debug, Args, Serialize)]
pub struct SelfcheckArgs {}
