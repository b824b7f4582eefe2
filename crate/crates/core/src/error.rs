use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid battery spec: {0}")]
    InvalidSpec(String),

    #[error("invalid battery state: soc {soc_kwh} kWh outside [{min_kwh}, {max_kwh}]")]
    InvalidState {
        soc_kwh: f64,
        min_kwh: f64,
        max_kwh: f64,
    },

    #[error("requested power must be finite and non-negative, got {0} kW")]
    NegativeRequest(f64),

    #[error("flow `{field}` is negative or non-finite: {value}")]
    NegativeFlow { field: &'static str, value: f64 },

    #[error("hour {0} is outside 0..=23")]
    HourOutOfRange(usize),

    #[error("{0}")]
    OutOfRange(String),

    #[error("invalid tariff: {0}")]
    InvalidTariff(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error at row {row}, field `{field}`: {message}")]
    Validation {
        row: usize,
        field: String,
        message: String,
    },

    #[error("trace has {rows} rows, expected a non-zero multiple of 24")]
    Length { rows: usize },

    #[error("argument `{name}` must be positive, got {value}")]
    NonPositiveArgument { name: &'static str, value: f64 },

    #[error("trace is empty")]
    EmptyTrace,

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),

    #[error("q-table shape mismatch: expected {expected} soc bins, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error("baseline policy `{0}` not present in the compared runs")]
    MissingBaseline(String),

    #[error("zero denominator: baseline `{field}` is {value}, reductions are undefined")]
    ZeroDenominator { field: &'static str, value: f64 },

    #[error("bad window {start}..{end} for horizon {horizon}")]
    BadWindow {
        start: usize,
        end: usize,
        horizon: usize,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable, machine-readable error category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidSpec(_) => "invalid-spec",
            Error::InvalidState { .. } => "invalid-state",
            Error::NegativeRequest(_) => "negative-request",
            Error::NegativeFlow { .. } => "negative-flow",
            Error::HourOutOfRange(_) => "out-of-range-hour",
            Error::OutOfRange(_) => "out-of-range",
            Error::InvalidTariff(_) => "invalid-tariff",
            Error::Parse { .. } => "parse-error",
            Error::Validation { .. } => "validation-error",
            Error::Length { .. } => "length-error",
            Error::NonPositiveArgument { .. } => "non-positive-argument",
            Error::EmptyTrace => "empty-trace",
            Error::InvalidHyperparams(_) => "invalid-hyperparams",
            Error::ShapeMismatch { .. } => "shape-mismatch",
            Error::Config(_) => "config-error",
            Error::MissingBaseline(_) => "missing-baseline",
            Error::ZeroDenominator { .. } => "zero-denominator",
            Error::BadWindow { .. } => "bad-window",
            Error::Io { .. } => "io-error",
            Error::Json(_) => "json-error",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
