//! Green's functions of impurity models from eigenstates: branch weights,
//! start vectors, continued fractions (classical or variational) and their
//! assembly at zero and finite temperature.

mod assemble;
mod branch;
mod impurity;

pub use assemble::{
    assemble_finite_t_gf, assemble_weighted, assemble_zero_t_gf, boltzmann_weights, AssembledGf,
    BranchReport, ThermalState,
};
pub use branch::{fit_state, BranchOutcome, BranchSolver, ClassicalBranchSolver, KvqaBranchSolver};
pub use impurity::{
    solve_impurity_gf, spin_flip, ImpuritySolution, KvqaSolverOptions, SolveDiagnostics,
    SolverBackend,
};
