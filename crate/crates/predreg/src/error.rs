//! Error type shared across the crate.
//!
//! Every variant carries a stable code (`Error::code`) so that callers such as
//! the CLI can emit machine-parsable diagnostics without matching on variants.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Input header lacks a column required by the schema mapping.
    #[error("missing column '{column}' in input header")]
    MissingColumn { column: String },

    /// A cell failed to parse as a finite number.
    #[error("row {row}: column '{column}' does not parse as a finite number (got '{value}')")]
    BadValue {
        row: usize,
        column: String,
        value: String,
    },

    /// A period label failed to parse for the declared frequency.
    #[error("row {row}: cannot parse period '{value}' as {frequency} (expected e.g. '{expected}')")]
    BadPeriod {
        row: usize,
        value: String,
        frequency: &'static str,
        expected: &'static str,
    },

    /// File contained a header but no data rows.
    #[error("input contains no data rows")]
    EmptyInput,

    /// The same period appears twice.
    #[error("duplicated period '{period}' in input")]
    DuplicatePeriod { period: String },

    /// Periods are not strictly increasing.
    #[error("periods not strictly increasing at '{period}'")]
    UnsortedPeriod { period: String },

    /// Prices must be strictly positive (they are ratio denominators).
    #[error("row {row}: price must be positive, got {value}")]
    NonPositivePrice { row: usize, value: f64 },

    /// Table columns have mismatched lengths.
    #[error("column '{column}' has {got} rows, expected {expected}")]
    ColumnLength {
        column: String,
        got: usize,
        expected: usize,
    },

    /// Not enough rows for the requested construction.
    #[error("insufficient data: need at least {needed} rows, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// A value fell outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Series has no variation; the requested statistic or regression is degenerate.
    #[error("series is constant; {context} is degenerate")]
    DegenerateSeries { context: &'static str },

    /// The design matrix is numerically rank deficient.
    #[error("design matrix is rank deficient near column '{column}' (rcond {rcond:.3e})")]
    SingularDesign { column: String, rcond: f64 },

    /// Fewer observations than parameters.
    #[error("{n} observations cannot identify {m} parameters")]
    InsufficientObservations { n: usize, m: usize },

    /// Requested coefficient label is not in the fit.
    #[error("unknown coefficient '{label}'; fit has: {available}")]
    UnknownCoefficient { label: String, available: String },

    /// F-test inputs are not nested.
    #[error("restricted SSR {restricted} is below unrestricted SSR {unrestricted}; models are not nested")]
    NonNested { restricted: f64, unrestricted: f64 },

    /// Model name not in the catalogue.
    #[error("unknown model '{name}'; valid names: {valid}")]
    UnknownModel { name: String, valid: String },

    /// Model requires the consumption-wealth ratio but the panel has none.
    #[error("model requires a cay series but the panel has none")]
    MissingCay,

    /// A window fit failed during recursive forecasting.
    #[error("window {window}: {source}")]
    WindowFit {
        window: usize,
        #[source]
        source: Box<Error>,
    },

    /// A forecast record lacks a realized value needed for evaluation.
    #[error("record (window {window}, horizon {horizon}) has no realized value")]
    MissingRealized { window: usize, horizon: usize },

    /// Invalid configuration or argument combination.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable machine-readable code, `MODULE/KIND`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::MissingColumn { .. } => "DATA/SCHEMA",
            Error::BadValue { .. } => "DATA/VALUE",
            Error::BadPeriod { .. } => "DATA/PERIOD",
            Error::EmptyInput => "DATA/EMPTY",
            Error::DuplicatePeriod { .. } => "DATA/INTEGRITY",
            Error::UnsortedPeriod { .. } => "DATA/INTEGRITY",
            Error::NonPositivePrice { .. } => "DATA/DOMAIN",
            Error::ColumnLength { .. } => "DATA/SCHEMA",
            Error::InsufficientData { .. } => "DATA/INSUFFICIENT",
            Error::Domain(_) => "DATA/DOMAIN",
            Error::DegenerateSeries { .. } => "STAT/DEGENERATE",
            Error::SingularDesign { .. } => "REG/SINGULAR",
            Error::InsufficientObservations { .. } => "REG/UNDERDETERMINED",
            Error::UnknownCoefficient { .. } => "REG/LABEL",
            Error::NonNested { .. } => "REG/NONNESTED",
            Error::UnknownModel { .. } => "MODEL/UNKNOWN",
            Error::MissingCay => "MODEL/MISSING_CAY",
            Error::WindowFit { .. } => "FORECAST/WINDOW",
            Error::MissingRealized { .. } => "EVAL/MISSING",
            Error::Config(_) => "CLI/CONFIG",
            Error::Io(_) => "IO/ERROR",
            Error::Csv(_) => "IO/CSV",
        }
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
