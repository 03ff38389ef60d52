//! Variational construction of the Krylov basis: every new vector
//! `chi_n = U(theta_n)|0>` minimizes a cost that vanishes exactly when it is
//! the next Lanczos vector, and the coefficients follow from expectation
//! values.

mod cost;
mod run;

pub use cost::{
    compute_b_squared, eps0, eps0_from_element, eps_overlap, krylov_cost, matrix_element_estimate,
    CostWeights, KrylovCost, KrylovVector, MatrixElementBackend, DEFAULT_TROTTER_STEPS,
};
pub use run::{run_kvqa, sector_of_state, KrylovStep, KvqaOptions, KvqaRun};
