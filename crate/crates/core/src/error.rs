use thiserror::Error;

/// Errors raised by the bound computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change in bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("quadrature did not converge after {subdivisions} subdivisions (estimate {estimate}, error {error})")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("degenerate channel: {0}")]
    Degenerate(String),

    #[error("bound never reaches the design rate {rate} inside [{lo_db}, {hi_db}] dB (bound values {bound_lo}, {bound_hi})")]
    Bracket {
        rate: f64,
        lo_db: f64,
        hi_db: f64,
        bound_lo: f64,
        bound_hi: f64,
    },

    #[error("computation too large: {0}")]
    TooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by malformed user input rather than numerical trouble.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::InvalidChannel(_)
                | Error::InvalidEnsemble(_)
                | Error::Parse(_)
                | Error::TooLarge(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
