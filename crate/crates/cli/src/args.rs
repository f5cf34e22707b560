use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "coreres", version, about = "Node-level k-core resilience under edge removals and insertions")]
pub struct Cli {
    /// Worker threads for parallel stages (default: available parallelism).
    #[arg(long, global = true, env = "CORERES_WORKERS")]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "kebab-case")]
pub enum Command {
    /// Core numbers, shells, subcores and degree moments.
    Decompose(DecomposeArgs),
    /// Removal or insertion strength of every node.
    Strengths(StrengthsArgs),
    /// Compare RSC/ISC against the per-edge naive construction.
    Benchmark(BenchmarkArgs),
    /// Budgeted critical-edge campaigns, F against budget per method.
    CriticalEdges(CriticalEdgesArgs),
    /// Spreader seed sets evaluated with SIR simulations.
    Spreaders(SpreadersArgs),
    /// Write a seeded random graph as an edge list.
    Generate(GenerateArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Whitespace-separated edge list with integer node labels.
    #[arg(long, env = "CORERES_GRAPH")]
    pub graph: PathBuf,

    /// Reject malformed lines instead of skipping them.
    #[arg(long, env = "CORERES_STRICT_PARSE")]
    pub strict_parse: bool,

    #[arg(long, env = "CORERES_OUT_DIR", default_value = "out")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Removal,
    Insertion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BenchMode {
    Removal,
    Insertion,
    Both,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct InsertionArgs {
    /// Candidate partners per node in the insertion candidate graph.
    #[arg(long, env = "CORERES_B", default_value_t = 5)]
    pub b: usize,

    /// Candidate graphs averaged over.
    #[arg(long, env = "CORERES_TRIALS", default_value_t = 10)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StrengthsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,

    #[arg(long, env = "CORERES_MODE", value_enum)]
    pub mode: Mode,

    #[command(flatten)]
    #[serde(flatten)]
    pub insertion: InsertionArgs,

    #[arg(long, env = "CORERES_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Also build the dependency graph naively and fail on any difference.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchmarkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,

    #[arg(long, env = "CORERES_MODE", value_enum, default_value = "both")]
    pub mode: BenchMode,

    #[arg(long, env = "CORERES_B", default_value_t = 5)]
    pub b: usize,

    #[arg(long, env = "CORERES_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Timing repetitions; the fastest one is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CriticalEdgesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,

    #[arg(long, env = "CORERES_MODE", value_enum)]
    pub mode: Mode,

    /// Comma-separated; defaults depend on the mode.
    #[arg(long, env = "CORERES_METHODS", value_delimiter = ',')]
    pub methods: Vec<String>,

    /// Comma-separated edge budgets; default 50..1000 scaled to the graph.
    #[arg(long, env = "CORERES_BUDGETS", value_delimiter = ',')]
    pub budgets: Vec<usize>,

    #[arg(long, env = "CORERES_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Repetitions averaged for the random method.
    #[arg(long, env = "CORERES_RANDOM_RUNS", default_value_t = 50)]
    pub random_runs: usize,

    #[command(flatten)]
    #[serde(flatten)]
    pub insertion: InsertionArgs,
}

/// `auto` or an explicit probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Beta {
    Auto,
    Fixed(f64),
}

impl FromStr for Beta {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Beta::Auto);
        }
        s.parse::<f64>().map(Beta::Fixed).map_err(|_| format!("expected `auto` or a number, got `{s}`"))
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Auto => f.write_str("auto"),
            Beta::Fixed(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SpreadersArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,

    /// Comma-separated; defaults to the four strengths plus k_shell, iks and
    /// core_strength.
    #[arg(long, env = "CORERES_METHODS", value_delimiter = ',')]
    pub methods: Vec<String>,

    /// Share of nodes used as initial spreaders.
    #[arg(long, env = "CORERES_FRACTION", default_value_t = 0.2)]
    pub fraction: f64,

    /// Infection probability; `auto` picks the next 0.01 above ⟨k⟩/⟨k²⟩.
    #[arg(long, env = "CORERES_BETA", default_value = "auto")]
    pub beta: Beta,

    #[arg(long, env = "CORERES_RECOVER_PROB", default_value_t = 0.01)]
    pub recover_prob: f64,

    #[arg(long, env = "CORERES_STEPS", default_value_t = 15)]
    pub steps: usize,

    #[arg(long, env = "CORERES_RUNS", default_value_t = 50)]
    pub runs: usize,

    #[arg(long, env = "CORERES_SEED", default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    #[serde(flatten)]
    pub insertion: InsertionArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// G(n, p).
    Er,
    /// Preferential attachment with `m` links per new node.
    Ba,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "er")]
    pub model: Model,

    #[arg(long)]
    pub n: usize,

    #[arg(long, default_value_t = 0.05)]
    pub p: f64,

    #[arg(long, default_value_t = 3)]
    pub m: usize,

    #[arg(long, env = "CORERES_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Destination edge list.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: PathBuf,

    /// Write outputs here instead of the recorded directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
