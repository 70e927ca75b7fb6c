use thiserror::Error;

/// Errors produced by the polynomial, circuit, simulation and synthesis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{what} needs {n} variables but the enumeration cutoff is {cutoff}")]
    TooLarge {
        what: &'static str,
        n: usize,
        cutoff: usize,
    },

    #[error("degree {degree} exceeds the supported maximum {max}")]
    Degree { degree: usize, max: usize },

    #[error("synthesis budget exceeded{}: best distance {best:.3e}, wanted {wanted:.3e}", factor.map(|f| format!(" at factor {f}")).unwrap_or_default())]
    BudgetExceeded {
        factor: Option<usize>,
        best: f64,
        wanted: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("certificate check failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
