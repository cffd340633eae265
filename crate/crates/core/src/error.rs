use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid angular momentum pair (j={j}, m={m}): {reason}")]
    InvalidQuantumNumbers {
        j: String,
        m: String,
        reason: &'static str,
    },

    #[error("product sqrt({0}) is outside Q(sqrt 2)")]
    UnsupportedRadicand(String),

    #[error("{name} = {value} is outside [-1, 1]")]
    PolarizationOutOfRange { name: &'static str, value: String },

    #[error("channel {channel} is not available in {mode} mode")]
    ModeMismatch { channel: String, mode: String },

    #[error("no nuclear constant given for channel {0}")]
    MissingConstant(String),

    #[error("nuclear constant for channel {channel} is negative ({value})")]
    NegativeConstant { channel: String, value: String },

    #[error("degenerate design: {0} is not identifiable")]
    DegenerateDesign(String),

    #[error("no level with J^pi = {0} in the level table")]
    LevelNotFound(String),

    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unknown method {0:?}")]
    UnknownMethod(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("level table: {0}")]
    LevelData(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
