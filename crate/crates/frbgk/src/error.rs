//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by grid construction, the discrete velocity model,
/// the solver loop, and the configuration front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Newton projection of the discrete velocity model failed to converge.
    /// Carries the last iterate and the relative residual at failure.
    #[error("DVM projection failed{}: residual {residual:.3e} after {iterations} iterations", location_suffix(.location))]
    DvmConvergence {
        residual: f64,
        iterations: usize,
        alpha: [f64; 3],
        location: Option<usize>,
    },

    /// An element mean dropped below the negativity tolerance; the time step
    /// no longer satisfies the positivity CFL bound.
    #[error("negative element mean {mean:.3e} in element {element}: time step violates the positivity condition")]
    MeanNegativity { element: usize, mean: f64 },

    /// Non-finite values appeared in the field during time integration.
    #[error("solution blew up at step {step} (t = {time:.6e})")]
    BlowUp { step: usize, time: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("config parse error at line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn location_suffix(location: &Option<usize>) -> String {
    match location {
        Some(node) => format!(" at spatial node {node}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
