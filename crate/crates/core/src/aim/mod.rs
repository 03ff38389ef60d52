//! Anderson impurity models and their exact-diagonalization reference.

mod ed;
pub mod fock;
mod lanczos;
mod model;

pub use ed::{
    exact_diagonalize, exact_gf, lehmann_poles, resolvent_gf, state_weights, LehmannPoles,
    SectorSpectrum, SpectralDecomposition, StateRef, Temperature, DEGENERACY_TOL,
};
pub use fock::{dense_hamiltonian, sector_hamiltonian, SectorHamiltonian, MAX_ORACLE_QUBITS};
pub use lanczos::{classical_lanczos, krylov_dimension, lanczos_with, LanczosRun, DEFAULT_TOL_B};
pub use model::{
    random_aim, random_aim_from_rng, random_aim_with_bath, AimModel, FermionTerms, Interaction,
    OneBody,
};
