use alloc::string::String;
use core::fmt;

/// Errors produced while configuring or advancing a simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value is out of range or inconsistent.
    Config(String),
    /// A function was evaluated outside its domain.
    Domain { what: &'static str, value: f64 },
    /// The Poisson solve did not reach the residual tolerance.
    Poisson { residual: f64 },
    /// A stage of the time integrator produced NaN or Inf.
    NonFinite {
        stage: usize,
        time: f64,
        coefficient: char,
        band: usize,
        cell: usize,
        k: usize,
        n: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Domain { what, value } => write!(f, "{what} undefined at {value}"),
            Error::Poisson { residual } => {
                write!(f, "Poisson solve residual {residual:e} above tolerance")
            }
            Error::NonFinite {
                stage,
                time,
                coefficient,
                band,
                cell,
                k,
                n,
            } => write!(
                f,
                "non-finite {coefficient} at stage {stage}, t = {time} ps \
                 (band {band}, cell {cell}, k {k}, n {n})"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
