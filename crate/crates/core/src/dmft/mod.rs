//! Single-band DMFT on the Bethe lattice with an exactly or variationally
//! solved impurity.

mod bath;
mod lattice;
mod run;

pub use bath::{fit_bath, hybridization_from_bath, BathFit, BathFitOptions, Hybridization};
pub use lattice::{
    bethe_self_consistency, dyson_self_energy, lattice_local_gf, semicircle_gf, weiss_inverse,
};
pub use run::{run_dmft, DmftConfig, DmftIteration, DmftState, DmftSummary, IterationSummary};
