//! Data-pipeline building blocks for manufacturing analytics: typed columnar
//! tables, as-of merging of event and monitoring logs, missing-value and
//! categorical preprocessing, quick statistical screening, an ensemble
//! variable selector with voting, classical time-series decomposition, and
//! cost-sensitive decision evaluation.
//!
//! Numeric kernels are generic over [`scalar::Real`] (any `num-traits` float);
//! the table substrate and the CLI work in [`Scalar`] (`f64`).

pub mod decompose;
pub mod error;
pub mod merge;
pub mod preprocess;
pub mod report;
pub mod riskeval;
pub mod scalar;
pub mod select;
pub mod stats;
pub mod table;

/// Concrete scalar used by the table layer and all file formats.
pub type Scalar = f64;

/// Concrete timestamp representation: integer seconds since the Unix epoch.
pub type EpochSeconds = i64;

pub use error::{Error, Result};
pub use table::{Column, ColumnKind, ColumnStats, Table, TimeWindow};
