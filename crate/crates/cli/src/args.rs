use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "selbounds",
    version,
    about = "Bounds on treatment effects for always-observed units in difference-in-differences designs with sample selection"
)]
pub struct Cli {
    /// Worker threads (default: available parallelism). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    pub output: Output,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bounds from a two-period panel (`id,d,s0,s1,y0,y1`).
    Bounds(BoundsArgs),
    /// Bounds from repeated cross-sections (`id,t,d,s,y`).
    BoundsRcs(RcsArgs),
    /// Cohort-by-period bounds from a long panel (`id,gvar,t,s,y`).
    BoundsStaggered(StaggeredArgs),
    /// Naive difference-in-differences on observed units.
    Naive(NaiveArgs),
    /// Selection-cell counts, mixing proportions and strata shares.
    Strata(DataArg),
    /// Monte Carlo study of the built-in simulation design.
    Simulate(SimulateArgs),
    /// Population values of the simulation design by numerical integration.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Param {
    Ooo,
    Ono,
    Nno,
    Noo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ci {
    None,
    Union,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dominance {
    A,
    B,
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Level,
    Trend,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Design {
    Panel,
    Rcs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Coverage {
    /// The interval contains the true effect.
    Att,
    /// The interval contains the whole true identified interval.
    Interval,
}

#[derive(Debug, Args)]
pub struct DataArg {
    #[arg(long)]
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct AssumptionArgs {
    /// Selection assumption: nomono, mono-pos or mono-neg.
    #[arg(long, default_value = "nomono")]
    pub assumptions: String,

    /// Counterfactual selections jointly independent of treatment given baseline selection.
    #[arg(long)]
    pub joint: bool,

    /// Outcome mean-dominance orderings in force (comma separated).
    #[arg(long, value_enum, value_delimiter = ',')]
    pub dominance: Vec<Dominance>,
}

#[derive(Debug, Args)]
pub struct InferenceArgs {
    #[arg(long, value_enum, default_value_t = Ci::None)]
    pub ci: Ci,

    /// Bootstrap replicates.
    #[arg(long, default_value_t = 200)]
    pub boot: usize,

    /// Seed for the bootstrap; required whenever a confidence interval is requested.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Divide bootstrap standard deviations by sqrt(n) before forming intervals.
    #[arg(long)]
    pub legacy_se_scaling: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, value_enum, default_value_t = Param::Ooo)]
    pub param: Param,

    #[command(flatten)]
    pub assumptions: AssumptionArgs,

    #[command(flatten)]
    pub inference: InferenceArgs,

    /// Known lower support bound of untreated pre-period outcomes.
    #[arg(long, allow_hyphen_values = true)]
    pub y00_lb: Option<f64>,

    /// Known lower support bound of untreated post-period outcomes.
    #[arg(long, allow_hyphen_values = true)]
    pub y01_lb: Option<f64>,

    /// Known lower support bound of treated pre-period outcomes.
    #[arg(long, allow_hyphen_values = true)]
    pub y10_lb: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RcsArgs {
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, value_enum, default_value_t = Variant::Level)]
    pub rcs_variant: Variant,

    #[command(flatten)]
    pub assumptions: AssumptionArgs,

    #[command(flatten)]
    pub inference: InferenceArgs,
}

#[derive(Debug, Args)]
pub struct StaggeredArgs {
    #[arg(long)]
    pub data: PathBuf,

    /// First treated period of the cohort.
    #[arg(long)]
    pub gamma: u32,

    /// Evaluation period.
    #[arg(long)]
    pub t: u32,

    #[command(flatten)]
    pub assumptions: AssumptionArgs,

    #[command(flatten)]
    pub inference: InferenceArgs,
}

#[derive(Debug, Args)]
pub struct NaiveArgs {
    #[arg(long)]
    pub data: PathBuf,

    #[arg(long, value_enum, default_value_t = Design::Panel)]
    pub design: Design,
}

#[derive(Debug, Args)]
pub struct DgpArgs {
    #[arg(long, default_value_t = 0.7, allow_hyphen_values = true)]
    pub rho_ca: f64,

    #[arg(long, default_value_t = 0.6, allow_hyphen_values = true)]
    pub rho_uv: f64,

    #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
    pub intercept: f64,

    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub att: f64,

    #[arg(long, default_value_t = 1.5, allow_hyphen_values = true)]
    pub shift: f64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 2000)]
    pub n: usize,

    #[arg(long, default_value_t = 1000)]
    pub reps: usize,

    #[arg(long)]
    pub seed: Option<u64>,

    /// Assumption sets to evaluate (comma separated labels).
    #[arg(long, value_delimiter = ',', default_value = "mono-pos,nomono")]
    pub assumptions: Vec<String>,

    #[arg(long, value_enum, default_value_t = Coverage::Att)]
    pub coverage: Coverage,

    /// Draws for the true interval when `--coverage interval` is used.
    #[arg(long, default_value_t = 10_000_000)]
    pub mc_draws: u64,

    /// Also write every replicate's estimates to this CSV file.
    #[arg(long)]
    pub replicates_out: Option<PathBuf>,

    #[command(flatten)]
    pub dgp: DgpArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 10_000_000)]
    pub mc_draws: u64,

    #[arg(long)]
    pub seed: Option<u64>,

    #[command(flatten)]
    pub dgp: DgpArgs,
}
