//! Continued fractions, Green's-function assembly and Hamiltonian moments.

mod assembly;
mod continued;
mod grid;
mod moments;

pub use assembly::{assemble_gf, spectral_weight, BranchKind, GfBranch, BRANCH_WEIGHT_TOL};
pub use continued::{
    continued_fraction, moments_from_tridiagonal, LanczosCoefficients, StepResiduals, Termination,
};
pub use grid::{dos, EnergyGrid, GreensFunction, OrbitalLabel};
pub use moments::{
    compute_moments_iterative, direct_moments, tridiagonal_moments, MomentOptions, MomentOrigin,
    MomentSequence,
};
