//! Linear, p–θ and equilibrium solvers.

pub mod linear;
pub mod loads;
pub mod newton;
pub mod sor;

use thiserror::Error;

pub use linear::{linear_solve, LinearConfig};
pub use loads::hydrodynamic_loads;
pub use newton::{newton_equilibrium, DynamicsProblem, NewtonConfig, NewtonReport, ResidualError};
pub use sor::{sor_p_theta, GreSystem, SorConfig, SorReport};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("matrix has a row without a diagonal entry")]
    MissingDiagonal,
    #[error("BiCGSTAB breakdown after {iterations} iterations (relative residual {residual:e})")]
    LinearBreakdown { iterations: usize, residual: f64 },
    #[error("linear solver did not converge in {iterations} iterations (relative residual {residual:e})")]
    LinearNotConverged { iterations: usize, residual: f64 },
    #[error("p-theta SOR did not converge in {iterations} sweeps (e_SOR = {error:e})")]
    SorNotConverged {
        iterations: usize,
        error: f64,
        history: Vec<f64>,
    },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("line search stagnated at Newton iteration {iteration} (residual {residual:e})")]
    LineSearchStagnation { iteration: usize, residual: f64 },
    #[error("Newton iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NewtonNotConverged { iterations: usize, residual: f64 },
    #[error("surfaces in contact at the starting configuration")]
    ContactAtStart,
    #[error("residual evaluation failed: {0}")]
    Residual(String),
}
