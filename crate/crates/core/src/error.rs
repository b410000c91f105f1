use thiserror::Error;

use crate::spectral::Field;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid needs an even number of points >= 8, got {0}")]
    OddOrSmallGrid(usize),
    #[error("box length must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("fields live on different grids (L={0}, N={1} vs L={2}, N={3})")]
    GridMismatch(f64, usize, f64, usize),
    #[error("field contains non-finite samples")]
    NonFinite,
    #[error("operation undefined for the zero field")]
    ZeroField,
    #[error("exponents violate s > 0 and r < s - 1 (got s = {s}, r = {r})")]
    Assumption { s: f64, r: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("symbol expression: {0}")]
    Expr(String),
    #[error("symbol fails structural assumptions: {0}")]
    Symbol(String),
    #[error("speed {nu} is not below the dispersion minimum {min}; (m - nu) is not invertible")]
    Supercritical { nu: f64, min: f64 },
    #[error("stabilizing quotient became nonpositive ({value}) at iteration {iteration}")]
    DegenerateQuotient { iteration: usize, value: f64 },
    #[error("solution blew up at t = {time}")]
    BlowUp { time: f64, last_good: Box<Field> },
    #[error("{0}")]
    Probe(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
