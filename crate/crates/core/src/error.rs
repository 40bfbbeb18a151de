use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the map it was given to.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("log-gamma pole at z = {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The characteristic function does not decay fast enough for its
    /// inversion integral to converge absolutely.
    #[error(
        "IntegrabilityError: characteristic-function decay exponent {decay_exponent} is not > 1; \
         the Fourier inversion integral does not converge absolutely"
    )]
    Integrability { decay_exponent: f64 },

    #[error("NonConvergence: {message} (best estimate {value:e}, error {error:e})")]
    NonConvergence {
        message: String,
        value: f64,
        error: f64,
    },

    #[error("unsupported dimension {0} (at most 3)")]
    UnsupportedDimension(usize),

    #[error("no closed form for model `{0}`; use the gamma-known-scale Fourier path")]
    NoClosedForm(String),

    #[error("data error at record {index}: {reason}")]
    Data { index: usize, reason: String },

    #[error("every candidate has infinite code length: {0:?}")]
    EmptySelection(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Numerical(_)
                | Error::Pole { .. }
                | Error::Integrability { .. }
                | Error::NonConvergence { .. }
        )
    }
}
