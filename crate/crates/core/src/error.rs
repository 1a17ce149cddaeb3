//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("column {column:?} has {got} cells, table has {expected} rows")]
    LengthMismatch { column: String, expected: usize, got: usize },

    #[error("column {column:?} is {actual}, expected {expected}")]
    WrongKind {
        column: String,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("cannot parse {token:?} as {kind} in column {column:?}, row {row}")]
    CellParse {
        column: String,
        row: usize,
        token: String,
        kind: &'static str,
    },

    #[error("invalid time window: start {start} must be before end {end}")]
    InvalidWindow { start: i64, end: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("key column {column:?} has kind {main} in the main table but {other} in the other table")]
    KeyKindMismatch {
        column: String,
        main: &'static str,
        other: &'static str,
    },

    #[error("other table has duplicate (key, timestamp) pair: key {key:?} at t={timestamp}")]
    DuplicateKeyTimestamp { key: String, timestamp: i64 },

    #[error("selected variable {variable:?} found in {count} source tables, expected exactly one")]
    AmbiguousSelectedVariable { variable: String, count: usize },

    #[error("level {level:?} of column {column:?} has no mapping and no default group")]
    UnmappedLevel { column: String, level: String },

    #[error("column {column:?} needs at least {needed} observed levels, found {found}")]
    TooFewLevels {
        column: String,
        needed: usize,
        found: usize,
    },

    #[error("{0:?} is not an observed level")]
    UnknownLevel(String),

    #[error("zero variance in {0}")]
    ZeroVariance(String),

    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },

    #[error("group {0} is empty")]
    EmptyGroup(usize),

    #[error("design matrix is rank deficient (rank {rank} of {columns} columns)")]
    RankDeficient { rank: usize, columns: usize },

    #[error("coordinate descent did not converge in {sweeps} sweeps (last max update {gap:e})")]
    NoConvergence { sweeps: usize, gap: f64 },

    #[error("duplicate selector id {0:?}")]
    DuplicateSelector(String),

    #[error("iteration budget exhausted: {completed} of {max} iterations already run")]
    IterationBudgetExhausted { completed: usize, max: usize },

    #[error("exclusion and pending lists must stay disjoint; {0:?} is in both")]
    ListsOverlap(String),

    #[error("labels must contain both classes")]
    SingleClass,

    #[error("missing label in row {row}")]
    MissingLabel { row: usize },

    #[error("positive label {0:?} not present in the label universe")]
    UnknownPositiveLabel(String),

    #[error("confusion matrices use different positive labels: {0:?} vs {1:?}")]
    PositiveLabelMismatch(String, String),

    #[error("state probabilities must be non-negative and sum to 1 (sum was {0})")]
    BadProbabilities(f64),

    #[error("scenario payoffs carry no probabilities")]
    MissingProbabilities,

    #[error("decision problem has no actions")]
    NoActions,
}
