use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gleeok_cipher::{BitOrder, BranchId, Target};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "gleeok", version, about = "Gleeok-128 cryptanalysis workbench")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Keys for statistical and integral runs.
    #[arg(long, global = true)]
    pub keys: Option<usize>,
    /// Samples per key, as a power of two.
    #[arg(long, global = true)]
    pub samples_log2: Option<u32>,
    /// External solver command; defaults to $GLEEOK_SOLVER.
    #[arg(long, global = true)]
    pub solver: Option<String>,
    /// Bit order of hex arguments.
    #[arg(long, global = true, value_enum)]
    pub order: Option<OrderArg>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderArg {
    Msb,
    Lsb,
}

impl From<OrderArg> for BitOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Msb => BitOrder::MsbFirst,
            OrderArg::Lsb => BitOrder::LsbFirst,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Csv,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Csv => "csv",
        })
    }
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse()
}

fn parse_branch(s: &str) -> Result<BranchId, String> {
    s.parse()
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Regenerate DDT, LAT and DLCT of S3, S4, S5 and compare with the references.
    TablesVerify,
    /// Enumerate every inequality system and compare its points with the tables.
    IneqVerify,
    /// Algebraic degree bounds per round.
    Degree {
        #[arg(long, value_parser = parse_target)]
        target: Target,
        #[arg(long, default_value_t = 10)]
        rounds: usize,
    },
    /// Integral distinguishers implied by the degree bounds.
    IntegralDerive {
        #[arg(long, value_parser = parse_target)]
        target: Target,
        #[arg(long, default_value_t = 10)]
        max_rounds: usize,
    },
    /// Monte Carlo estimate of a differential-linear correlation.
    DlEstimate(DlEstimateArgs),
    /// Monte Carlo estimate of a linear correlation.
    LinearEstimate(LinearEstimateArgs),
    /// Balance of the scaled integral structures and a random-function control.
    IntegralCheck {
        #[arg(long, value_enum, default_value_t = StructureArg::All)]
        structure: StructureArg,
        /// Random-function control trials.
        #[arg(long, default_value_t = 20)]
        controls: u64,
    },
    /// Scaled key recovery over random keys, plus complexity accounting.
    AttackDemo {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Target Sbox (1-based).
        #[arg(long, default_value_t = 2)]
        sbox: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0usize, 1])]
        gadgets: Vec<usize>,
    },
    /// Enumerate θ/π candidates through the diffusion filters.
    LinlayerScan {
        #[arg(long, value_enum, default_value_t = FilterArg::Diffusion)]
        filters: FilterArg,
        #[arg(long, value_enum, default_value_t = ConventionArg::SLSL)]
        convention: ConventionArg,
        /// Only these odd multipliers (smoke mode).
        #[arg(long, value_delimiter = ',')]
        multipliers: Vec<usize>,
        /// Scan under every convention and report which one reproduces.
        #[arg(long)]
        calibrate: bool,
        /// Write retained candidates to this file.
        #[arg(long)]
        list: Option<PathBuf>,
    },
    /// Branch-and-bound search for the best linear trail.
    TrailSearch {
        #[arg(long, value_parser = parse_branch, default_value = "branch3")]
        branch: BranchId,
        #[arg(long)]
        rounds: usize,
        #[arg(long, default_value_t = 20)]
        max_weight: u32,
        #[arg(long, default_value_t = 4)]
        max_active: usize,
        #[arg(long, value_enum, default_value_t = RuleArg::Transposed)]
        rule: RuleArg,
    },
    /// Write a trail model as an LP file.
    ExportModel {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        lp: PathBuf,
    },
    /// Solve a model through the external solver adapter.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        /// Solve this LP file instead of building a model.
        #[arg(long, conflicts_with_all = ["target", "pair"])]
        lp: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SolveMode::Optimize)]
        mode: SolveMode,
        #[arg(long, default_value_t = gleeok_milp::DEFAULT_POOL_CAP)]
        cap: usize,
        /// Weights aggregated above the optimum in two-stage mode.
        #[arg(long, default_value_t = gleeok_milp::DEFAULT_SPAN)]
        span: i64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DlEstimateArgs {
    /// Run a built-in reference case (1-4) with its own sample plan.
    #[arg(long, conflicts_with_all = ["target", "difference", "mask"])]
    pub case: Option<usize>,
    /// Re-run all reference cases under both bit orders.
    #[arg(long, conflicts_with_all = ["case", "target"])]
    pub calibrate: bool,
    #[arg(long, value_parser = parse_target)]
    pub target: Option<Target>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub difference: Option<String>,
    #[arg(long)]
    pub mask: Option<String>,
    /// Expected log2 of the squared correlation; fails outside ±0.5.
    #[arg(long, allow_negative_numbers = true)]
    pub expect: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct LinearEstimateArgs {
    #[arg(long, value_parser = parse_target)]
    pub target: Target,
    #[arg(long)]
    pub rounds: usize,
    #[arg(long)]
    pub input_mask: String,
    #[arg(long)]
    pub output_mask: String,
    #[arg(long, allow_negative_numbers = true)]
    pub expect: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// branch1, branch2, branch3, prf, or toy-s3/toy-s4/toy-s5.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum, default_value_t = AnalysisArg::Dl)]
    pub analysis: AnalysisArg,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// DL split as `rd,rl`; defaults to the even split of --rounds.
    #[arg(long)]
    pub split: Option<String>,
    /// Stage-two model for this `Δ,λ` pair (hex).
    #[arg(long, requires = "weight")]
    pub pair: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub weight: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    All,
    Branch3Scaled,
    Prf3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Diffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    #[value(name = "s-l-s-l-s")]
    SLSLS,
    #[value(name = "l-s-l-s-l")]
    LSLSL,
    #[value(name = "s-l-s-l")]
    SLSL,
    #[value(name = "l-s-l-s")]
    LSLS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Transposed,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalysisArg {
    Differential,
    Linear,
    Dl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolveMode {
    Optimize,
    Enumerate,
    TwoStage,
}
