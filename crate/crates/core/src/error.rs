use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("norm exponent must be >= 1 (or infinity), got {0}")]
    InvalidNorm(f64),

    #[error("profile domain error: {0}")]
    Domain(String),

    #[error("numerical instability at t = {t} with dt = {dt}")]
    Instability { t: f64, dt: f64 },

    #[error("positivity violated at t = {t}: min value {min} below tolerance")]
    PositivityViolation { t: f64, min: f64 },

    #[error("grid has {cells} cells, dense path is limited to {limit}; reduce the resolution")]
    GridTooLarge { cells: usize, limit: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("ODE integrator failed at t = {t}: {reason}")]
    Integrator { t: f64, reason: String },

    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },

    #[error("malformed value for `{key}`: `{value}` ({reason})")]
    MalformedValue {
        key: String,
        value: String,
        reason: String,
    },

    #[error("cannot read `{}`: {source}", path.display())]
    MissingFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("snapshot format error in `{}`: {reason}", path.display())]
    Snapshot { path: PathBuf, reason: String },

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
