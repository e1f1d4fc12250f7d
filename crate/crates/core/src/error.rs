use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("underdetermined system: {n_obs} observations for {n_params} parameters")]
    Underdetermined { n_obs: usize, n_params: usize },

    #[error("degenerate design matrix (condition ratio {ratio:.3e})")]
    DegenerateDesign { ratio: f64 },

    #[error("singular restriction covariance in Wald test")]
    SingularRestriction,

    #[error("insufficient spectrum: {usable} usable points, at least 3 required")]
    InsufficientSpectrum { usable: usize },

    #[error("degenerate spectrum: all amplitudes are zero")]
    DegenerateSpectrum,

    #[error("series too short: length {len}, at least {required} required")]
    SeriesTooShort { len: usize, required: usize },

    #[error("insufficient samples: {len} available, at least {required} required")]
    InsufficientSamples { len: usize, required: usize },

    #[error("window {window}: {source}")]
    Window {
        window: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("variable `{name}`: {source}")]
    Variable {
        name: String,
        #[source]
        source: Box<Error>,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error at row {row}, column `{column}`: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("column `{0}` has no finite values")]
    UnusableColumn(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn in_window(self, window: usize) -> Self {
        Error::Window {
            window,
            source: Box::new(self),
        }
    }

    pub(crate) fn in_variable(self, name: &str) -> Self {
        Error::Variable {
            name: name.to_string(),
            source: Box::new(self),
        }
    }

    /// Strips window/variable context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Window { source, .. } | Error::Variable { source, .. } => source.root(),
            other => other,
        }
    }
}
