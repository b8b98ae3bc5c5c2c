use thiserror::Error;

use crate::params::ParamsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Fock cutoff {cutoff} gives a Hamiltonian dimension that overflows usize")]
    DimensionOverflow { cutoff: u32 },

    /// The iterative solver ran out of iterations. `residuals` holds the best
    /// residual norm (meV) reached for each requested pair.
    #[error("eigensolver did not converge after {iterations} iterations (worst residual {worst:.3e} meV, tolerance {tolerance:.3e} meV)")]
    NotConverged {
        iterations: usize,
        tolerance: f64,
        worst: f64,
        residuals: Vec<f64>,
    },

    #[error("lowest vibronic state is {found}, expected a nondegenerate A2u level")]
    UnexpectedGroundState { found: String },

    #[error("no E_u doublet among the lowest {searched} states")]
    NoDoublet { searched: usize },

    #[error(transparent)]
    Params(#[from] ParamsError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
