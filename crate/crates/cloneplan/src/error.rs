use thiserror::Error;

/// Crate-wide error type.
///
/// Domain violations carry enough context to report *which* constraint broke
/// (the CLI surfaces them verbatim and maps them to exit codes).
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter domain violation: {0}")]
    ParameterDomain(String),

    #[error("consistency violation: n*r = {nr} but k*c = {kc}")]
    Consistency { nr: u64, kc: u64 },

    #[error("balance violation: {0}")]
    Balance(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("divisibility error: {0}")]
    Divisibility(String),

    #[error("invalid shape vector: {0}")]
    InvalidShape(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid straggler model: {0}")]
    InvalidModel(String),

    #[error("unknown fixture `{0}` (available: table1, table2, table3, table4)")]
    UnknownFixture(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
