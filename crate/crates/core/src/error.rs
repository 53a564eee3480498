use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Division by an enclosure containing zero.
    #[error("indeterminate division: divisor enclosure contains 0")]
    IndeterminateDivision,

    /// Input outside the domain of a certified function (ln of a
    /// nonpositive enclosure, sqrt of a negative one, ...).
    #[error("domain: {0}")]
    Domain(&'static str),

    /// Structurally invalid configuration or parameters.
    #[error("config: {0}")]
    Config(String),

    /// The scan window for the minimization does not bracket the minimum.
    #[error("scan range too small: minimand at a boundary does not exceed the interior minimum")]
    ScanRange,

    /// The denominator of the estimate is not certifiably positive.
    #[error("geometry: estimate denominator is not certifiably positive")]
    Geometry,

    /// The rounded value cannot be pinned down from the enclosure.
    #[error("ceiling ambiguous: enclosure endpoints round to different values")]
    CeilingAmbiguous,

    /// Cover resolution finer than the set's own depth.
    #[error("resolution: delta depth {requested} exceeds set depth {depth}")]
    Resolution { requested: i32, depth: u32 },

    /// Operation requires a nonempty digital set.
    #[error("empty: digital set has no cubes")]
    EmptySet,

    /// Malformed input file or value.
    #[error("parse: {0}")]
    Parse(String),

    /// Recomputed table digits disagree with the reference rows.
    #[error("table mismatch:\n{}", .0.join("\n"))]
    TableMismatch(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;
