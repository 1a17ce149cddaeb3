//! Config-driven multi-stage runner: validates the whole config up front,
//! executes stages in order, and writes a manifest that makes the run
//! reproducible (config digest, seed, per-stage row/column counts).

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use mfgpipe_core::select::derive_seed;

use crate::args::*;
use crate::commands::{self, plain_table_input, StageStats, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema_version: u32,
    /// Global seed; required when a stochastic stage (select) appears. All
    /// stage seeds derive from it.
    #[serde(default)]
    pub seed: Option<u64>,
    pub stages: Vec<StageConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HierarchyStage {
    pub column: String,
    pub file: String,
    #[serde(default)]
    pub default_group: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DummyStage {
    pub column: String,
    #[serde(default)]
    pub reference: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CostStage {
    pub type_i: f64,
    pub type_ii: f64,
    #[serde(default)]
    pub correct: f64,
}

/// One pipeline stage. `input: null` consumes the previous stage's table
/// artifact; the first stage must name a file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StageConfig {
    Merge {
        #[serde(default)]
        input: Option<String>,
        other: String,
        key: Vec<String>,
        main_time: String,
        other_time: String,
        method: String,
        #[serde(default)]
        tolerance: Option<i64>,
        #[serde(default)]
        bring: Option<Vec<String>>,
        output: String,
        #[serde(default)]
        report: Option<String>,
    },
    Clean {
        #[serde(default)]
        input: Option<String>,
        #[serde(default = "default_threshold")]
        threshold: f64,
        #[serde(default = "default_proxy")]
        proxy_threshold: f64,
        #[serde(default)]
        hierarchies: Vec<HierarchyStage>,
        #[serde(default)]
        drop_singletons: Vec<String>,
        #[serde(default)]
        dummies: Vec<DummyStage>,
        output: String,
        #[serde(default)]
        report: Option<String>,
    },
    Screen {
        #[serde(default)]
        input: Option<String>,
        response: String,
        #[serde(default = "default_r_min")]
        r_min: f64,
        #[serde(default = "default_alpha")]
        alpha: f64,
        output: String,
        #[serde(default)]
        output_table: Option<String>,
    },
    Select {
        #[serde(default)]
        input: Option<String>,
        response: String,
        #[serde(default)]
        exclude: Vec<String>,
        #[serde(default = "default_cap")]
        cap: usize,
        #[serde(default = "default_top_k")]
        top_k: usize,
        #[serde(default = "default_trees")]
        trees: usize,
        #[serde(default = "default_rounds")]
        rounds: usize,
        output: String,
    },
    Vif {
        #[serde(default)]
        input: Option<String>,
        predictors: Vec<String>,
        output: String,
    },
    Decompose {
        #[serde(default)]
        input: Option<String>,
        column: String,
        period: usize,
        #[serde(default)]
        time: Option<String>,
        output: String,
    },
    Evaluate {
        #[serde(default)]
        input: Option<String>,
        actual: String,
        predicted: Vec<String>,
        #[serde(default = "default_positive")]
        positive: String,
        #[serde(default)]
        scores: Vec<String>,
        #[serde(default)]
        costs: Option<CostStage>,
        output: String,
    },
    Decide {
        #[serde(default)]
        input: Option<String>,
        mode: String,
        output: String,
    },
}

fn default_threshold() -> f64 {
    0.5
}
fn default_proxy() -> f64 {
    0.8
}
fn default_r_min() -> f64 {
    0.1
}
fn default_alpha() -> f64 {
    0.05
}
fn default_cap() -> usize {
    30
}
fn default_top_k() -> usize {
    20
}
fn default_trees() -> usize {
    200
}
fn default_rounds() -> usize {
    100
}
fn default_positive() -> String {
    "Fail".into()
}

impl StageConfig {
    pub fn name(&self) -> &'static str {
        match self {
            StageConfig::Merge { .. } => "merge",
            StageConfig::Clean { .. } => "clean",
            StageConfig::Screen { .. } => "screen",
            StageConfig::Select { .. } => "select",
            StageConfig::Vif { .. } => "vif",
            StageConfig::Decompose { .. } => "decompose",
            StageConfig::Evaluate { .. } => "evaluate",
            StageConfig::Decide { .. } => "decide",
        }
    }

    fn input(&self) -> &Option<String> {
        match self {
            StageConfig::Merge { input, .. }
            | StageConfig::Clean { input, .. }
            | StageConfig::Screen { input, .. }
            | StageConfig::Select { input, .. }
            | StageConfig::Vif { input, .. }
            | StageConfig::Decompose { input, .. }
            | StageConfig::Evaluate { input, .. }
            | StageConfig::Decide { input, .. } => input,
        }
    }

    /// The artifact the next stage chains from when its input is null.
    fn chain_output(&self) -> Option<&str> {
        match self {
            StageConfig::Merge { output, .. }
            | StageConfig::Clean { output, .. }
            | StageConfig::Select { output, .. }
            | StageConfig::Decompose { output, .. } => Some(output),
            StageConfig::Screen { output_table, .. } => output_table.as_deref(),
            StageConfig::Vif { .. } | StageConfig::Evaluate { .. } | StageConfig::Decide { .. } => {
                None
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StageRecord {
    pub index: usize,
    pub stage: &'static str,
    #[serde(flatten)]
    pub stats: StageStats,
    pub wall_ms: u128,
    pub artifacts: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub toolkit_version: &'static str,
    pub config_digest: String,
    pub seed: Option<u64>,
    pub stages: Vec<StageRecord>,
}

/// sha256 over the canonical (sorted-key, compact) JSON of the config.
pub fn config_digest(raw: &serde_json::Value) -> String {
    let canonical = canonicalize(raw);
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let hex: String = hasher.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

fn canonicalize(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            let fields: Vec<String> = keys
                .into_iter()
                .map(|k| format!("{}:{}", serde_json::to_string(k).unwrap(), canonicalize(&map[k])))
                .collect();
            format!("{{{}}}", fields.join(","))
        }
        serde_json::Value::Array(items) => {
            let rendered: Vec<String> = items.iter().map(canonicalize).collect();
            format!("[{}]", rendered.join(","))
        }
        other => serde_json::to_string(other).unwrap(),
    }
}

pub fn load_config(path: &Path) -> CliResult<(PipelineConfig, String)> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("config: {e}")))?;
    let config: PipelineConfig = serde_json::from_value(raw.clone())
        .map_err(|e| CliError::Validation(format!("config: {e}")))?;
    if config.schema_version != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported config schema_version {} (expected {SCHEMA_VERSION})",
            config.schema_version
        )));
    }
    Ok((config, config_digest(&raw)))
}

/// Pre-flight checks: stage wiring, declared inputs, and the seed rule.
fn validate(config: &PipelineConfig, config_dir: &Path) -> CliResult<()> {
    let stochastic = config.stages.iter().any(|s| matches!(s, StageConfig::Select { .. }));
    if stochastic && config.seed.is_none() {
        return Err(CliError::Validation(
            "a select stage requires a global seed".into(),
        ));
    }
    let mut previous_chain: Option<String> = None;
    for (index, stage) in config.stages.iter().enumerate() {
        match stage.input() {
            Some(input) => {
                let path = resolve_input(config_dir, input);
                if !path.exists() {
                    return Err(CliError::Validation(format!(
                        "stage {index} ({}): declared input {} does not exist",
                        stage.name(),
                        path.display()
                    )));
                }
            }
            None => {
                if previous_chain.is_none() {
                    return Err(CliError::Validation(format!(
                        "stage {index} ({}): no input declared and no prior stage output to chain from",
                        stage.name()
                    )));
                }
            }
        }
        if let StageConfig::Merge { other, .. } = stage {
            let path = resolve_input(config_dir, other);
            if !path.exists() {
                return Err(CliError::Validation(format!(
                    "stage {index} (merge): other table {} does not exist",
                    path.display()
                )));
            }
        }
        if let StageConfig::Clean { hierarchies, .. } = stage {
            for h in hierarchies {
                let path = resolve_input(config_dir, &h.file);
                if !path.exists() {
                    return Err(CliError::Validation(format!(
                        "stage {index} (clean): hierarchy file {} does not exist",
                        path.display()
                    )));
                }
            }
        }
        previous_chain = stage.chain_output().map(str::to_string).or(previous_chain);
    }
    Ok(())
}

fn resolve_input(config_dir: &Path, input: &str) -> PathBuf {
    let path = Path::new(input);
    if path.is_absolute() {
        path.to_path_buf()
    } else {
        config_dir.join(path)
    }
}

pub fn run_pipeline(config_path: &Path, out_dir: &Path) -> CliResult<RunManifest> {
    let (config, digest) = load_config(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    validate(&config, &config_dir)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Validation(format!("{}: {e}", out_dir.display())))?;

    let mut manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        toolkit_version: env!("CARGO_PKG_VERSION"),
        config_digest: digest,
        seed: config.seed,
        stages: Vec::new(),
    };

    let mut previous: Option<PathBuf> = None;
    for (index, stage) in config.stages.iter().enumerate() {
        let input_path = match stage.input() {
            Some(input) => resolve_input(&config_dir, input),
            None => previous.clone().expect("validated"),
        };
        let started = Instant::now();
        let (stats, artifacts) = execute(stage, index, &input_path, out_dir, &config, &config_dir)
            .map_err(|e| {
                // prior artifacts stay on disk; the failed stage aborts the run
                CliError::Runtime(format!("stage {index} ({}): {e}", stage.name()))
            })?;
        // record artifacts relative to the out dir so manifests compare
        // across machines and reruns
        manifest.stages.push(StageRecord {
            index,
            stage: stage.name(),
            stats,
            wall_ms: started.elapsed().as_millis(),
            artifacts: artifacts
                .iter()
                .map(|p| p.strip_prefix(out_dir).unwrap_or(p).display().to_string())
                .collect(),
        });
        if let Some(chain) = stage.chain_output() {
            previous = Some(out_dir.join(chain));
        }
    }
    Ok(manifest)
}

fn execute(
    stage: &StageConfig,
    index: usize,
    input: &Path,
    out_dir: &Path,
    config: &PipelineConfig,
    config_dir: &Path,
) -> CliResult<(StageStats, Vec<PathBuf>)> {
    match stage {
        StageConfig::Merge {
            other,
            key,
            main_time,
            other_time,
            method,
            tolerance,
            bring,
            output,
            report,
            ..
        } => {
            let out = out_dir.join(output);
            let report_path = report.as_ref().map(|r| out_dir.join(r));
            let args = MergeArgs {
                main: input.to_path_buf(),
                other: resolve_input(config_dir, other),
                key: key.clone(),
                main_time: main_time.clone(),
                other_time: other_time.clone(),
                method: method.clone(),
                tolerance: *tolerance,
                bring: bring.clone(),
                out: out.clone(),
                report: report_path.clone(),
                table: plain_table_input(),
            };
            let stats = commands::run_merge(&args)?;
            let mut artifacts = vec![out];
            artifacts.extend(report_path);
            Ok((stats, artifacts))
        }
        StageConfig::Clean {
            threshold,
            proxy_threshold,
            hierarchies,
            drop_singletons,
            dummies,
            output,
            report,
            ..
        } => {
            let out = out_dir.join(output);
            let report_path = report.as_ref().map(|r| out_dir.join(r));
            let args = CleanArgs {
                input: input.to_path_buf(),
                threshold: *threshold,
                proxy_threshold: *proxy_threshold,
                hierarchies: hierarchies
                    .iter()
                    .map(|h| format!("{}={}", h.column, resolve_input(config_dir, &h.file).display()))
                    .collect(),
                hierarchy_defaults: hierarchies
                    .iter()
                    .filter_map(|h| {
                        h.default_group.as_ref().map(|g| format!("{}={}", h.column, g))
                    })
                    .collect(),
                drop_singletons: drop_singletons.clone(),
                dummies: dummies.iter().map(|d| d.column.clone()).collect(),
                reference_levels: dummies
                    .iter()
                    .filter_map(|d| d.reference.as_ref().map(|r| format!("{}={}", d.column, r)))
                    .collect(),
                out: out.clone(),
                report: report_path.clone(),
                table: plain_table_input(),
            };
            let stats = commands::run_clean(&args)?;
            let mut artifacts = vec![out];
            artifacts.extend(report_path);
            Ok((stats, artifacts))
        }
        StageConfig::Screen { response, r_min, alpha, output, output_table, .. } => {
            let out = out_dir.join(output);
            let table_path = output_table.as_ref().map(|t| out_dir.join(t));
            let args = ScreenArgs {
                input: input.to_path_buf(),
                response: response.clone(),
                r_min: *r_min,
                alpha: *alpha,
                out: out.clone(),
                out_table: table_path.clone(),
                table: plain_table_input(),
            };
            let stats = commands::run_screen(&args)?;
            let mut artifacts = vec![out];
            artifacts.extend(table_path);
            Ok((stats, artifacts))
        }
        StageConfig::Select { response, exclude, cap, top_k, trees, rounds, output, .. } => {
            let out = out_dir.join(output);
            // every stochastic stage draws a seed derived from the global one
            let seed = derive_seed(config.seed.expect("validated"), index as u64);
            let exclude_path = if exclude.is_empty() {
                None
            } else {
                let path = out_dir.join(format!("stage{index}_exclusions.txt"));
                fs::write(&path, exclude.join("\n"))
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                Some(path)
            };
            let args = SelectArgs {
                input: input.to_path_buf(),
                response: response.clone(),
                exclude: exclude_path,
                cap: *cap,
                seed,
                top_k: *top_k,
                trees: *trees,
                rounds: *rounds,
                out: out.clone(),
                table: plain_table_input(),
            };
            let stats = commands::run_select(&args)?;
            Ok((stats, vec![out]))
        }
        StageConfig::Vif { predictors, output, .. } => {
            let out = out_dir.join(output);
            let args = VifArgs {
                input: input.to_path_buf(),
                predictors: predictors.clone(),
                out: out.clone(),
                table: plain_table_input(),
            };
            let stats = commands::run_vif(&args)?;
            Ok((stats, vec![out]))
        }
        StageConfig::Decompose { column, period, time, output, .. } => {
            let out = out_dir.join(output);
            let args = DecomposeArgs {
                input: input.to_path_buf(),
                column: column.clone(),
                period: *period,
                time: time.clone(),
                out: out.clone(),
                table: plain_table_input(),
            };
            let stats = commands::run_decompose(&args)?;
            Ok((stats, vec![out]))
        }
        StageConfig::Evaluate { actual, predicted, positive, scores, costs, output, .. } => {
            let out = out_dir.join(output);
            let args = EvaluateArgs {
                input: input.to_path_buf(),
                actual: actual.clone(),
                predicted: predicted.clone(),
                positive: positive.clone(),
                scores: scores.clone(),
                cost_type_i: costs.map(|c| c.type_i),
                cost_type_ii: costs.map(|c| c.type_ii),
                cost_correct: costs.map(|c| c.correct).unwrap_or(0.0),
                out: out.clone(),
                table: plain_table_input(),
            };
            let stats = commands::run_evaluate(&args)?;
            Ok((stats, vec![out]))
        }
        StageConfig::Decide { mode, output, .. } => {
            let out = out_dir.join(output);
            let args = DecideArgs {
                mode: mode.clone(),
                input: input.to_path_buf(),
                out: Some(out.clone()),
            };
            let stats = commands::run_decide(&args)?;
            Ok((stats, vec![out]))
        }
    }
}
