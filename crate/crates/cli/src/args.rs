//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "mfgpipe",
    version,
    about = "Manufacturing data pipeline: temporal merging, preprocessing, screening, ensemble variable selection, decomposition, and decision evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// As-of merge of a main table with another table by key and timestamp
    Merge(MergeArgs),
    /// Drop sparse columns, merge categorical levels, remove singleton levels, dummy-encode
    Clean(CleanArgs),
    /// Quick statistical screen of predictors against a response
    Screen(ScreenArgs),
    /// Ensemble variable selection with voting
    Select(SelectArgs),
    /// Variance inflation factor diagnostics
    Vif(VifArgs),
    /// Classical additive time-series decomposition
    Decompose(DecomposeArgs),
    /// Confusion-matrix metrics and cost-based model comparison
    Evaluate(EvaluateArgs),
    /// Expected-cost, minimax-regret, or expected-value decision
    Decide(DecideArgs),
    /// Run a multi-stage pipeline from a JSON config
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug)]
pub struct TableInput {
    /// Tokens treated as missing cells
    #[arg(long, value_delimiter = ',', default_values_t = default_missing())]
    pub missing_tokens: Vec<String>,
    /// Force a column kind: COLUMN=numeric|timestamp|boolean|categorical
    #[arg(long = "kind", value_name = "COLUMN=KIND")]
    pub kinds: Vec<String>,
}

fn default_missing() -> Vec<String> {
    ["", "NA", "NaN", "NULL"].iter().map(|s| s.to_string()).collect()
}

#[derive(Args, Debug)]
pub struct MergeArgs {
    /// Main table (keeps its rows and order)
    #[arg(long)]
    pub main: PathBuf,
    /// Other table whose columns are brought over
    #[arg(long)]
    pub other: PathBuf,
    /// Key column present in both tables; repeat for composite keys
    #[arg(long, required = true)]
    pub key: Vec<String>,
    #[arg(long)]
    pub main_time: String,
    #[arg(long)]
    pub other_time: String,
    /// nearest, roll-forward, or roll-backward
    #[arg(long)]
    pub method: String,
    /// Max |Δt| in seconds for a candidate to count
    #[arg(long)]
    pub tolerance: Option<i64>,
    /// Bring only these other-table columns
    #[arg(long, value_delimiter = ',')]
    pub bring: Option<Vec<String>>,
    #[arg(long)]
    pub out: PathBuf,
    /// Merge report (JSON)
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub table: TableInput,
}

#[derive(Args, Debug)]
pub struct CleanArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Drop columns whose missing fraction strictly exceeds this
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Report dropped↔retained pairs with |r| at or above this
    #[arg(long, default_value_t = 0.8)]
    pub proxy_threshold: f64,
    /// Concept hierarchy: COLUMN=FILE with level,group rows
    #[arg(long = "hierarchy", value_name = "COLUMN=FILE")]
    pub hierarchies: Vec<String>,
    /// Group for unmapped levels: COLUMN=GROUP
    #[arg(long = "hierarchy-default", value_name = "COLUMN=GROUP")]
    pub hierarchy_defaults: Vec<String>,
    /// Remove rows whose level in COLUMN occurs exactly once
    #[arg(long = "drop-singletons", value_name = "COLUMN")]
    pub drop_singletons: Vec<String>,
    /// Dummy-encode COLUMN into L−1 booleans
    #[arg(long = "dummy", value_name = "COLUMN")]
    pub dummies: Vec<String>,
    /// Reference level override: COLUMN=LEVEL
    #[arg(long = "reference-level", value_name = "COLUMN=LEVEL")]
    pub reference_levels: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub table: TableInput,
}

#[derive(Args, Debug)]
pub struct ScreenArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub response: String,
    /// Keep Pearson-tested predictors with |r| at or above this
    #[arg(long, default_value_t = 0.1)]
    pub r_min: f64,
    /// Keep rank/χ²-tested predictors with p at or below this
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Screening report (JSON)
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the table restricted to response + retained + constants
    #[arg(long)]
    pub out_table: Option<PathBuf>,
    #[command(flatten)]
    pub table: TableInput,
}

#[derive(Args, Debug)]
pub struct SelectArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub response: String,
    /// One variable name per line; excluded from the candidate set
    #[arg(long)]
    pub exclude: Option<PathBuf>,
    /// Max variables reported
    #[arg(long, default_value_t = 30)]
    pub cap: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Importance-based selectors keep at most this many variables
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    #[arg(long, default_value_t = 200)]
    pub trees: usize,
    #[arg(long, default_value_t = 100)]
    pub rounds: usize,
    /// Voting table (CSV: variable, one 0/1 column per selector, votes)
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub table: TableInput,
}

#[derive(Args, Debug)]
pub struct VifArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub predictors: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub table: TableInput,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Numeric column to decompose
    #[arg(long)]
    pub column: String,
    #[arg(long)]
    pub period: usize,
    /// Timestamp column; row order is used when absent
    #[arg(long)]
    pub time: Option<String>,
    /// Output CSV with four columns: value, trend, seasonal, residual
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub table: TableInput,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Column with true labels
    #[arg(long)]
    pub actual: String,
    /// Column with one model's predictions; repeat per model
    #[arg(long, required = true)]
    pub predicted: Vec<String>,
    /// Class of interest (the failure class in inspection workflows)
    #[arg(long, default_value = "Fail")]
    pub positive: String,
    /// Score column per model (same order as --predicted) for AUC
    #[arg(long)]
    pub scores: Vec<String>,
    #[arg(long)]
    pub cost_type_i: Option<f64>,
    #[arg(long)]
    pub cost_type_ii: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub cost_correct: f64,
    /// Metrics report (JSON)
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub table: TableInput,
}

#[derive(Args, Debug)]
pub struct DecideArgs {
    /// expected-cost, minimax-regret, or expected-value
    #[arg(long)]
    pub mode: String,
    /// CSV: header of actions; rows: state, probability (optional for
    /// payoff modes), one cell per action
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Decision report (JSON); the decision also prints to stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    /// Pipeline config (JSON)
    #[arg(long)]
    pub config: PathBuf,
    /// Directory artifacts are written into
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}
