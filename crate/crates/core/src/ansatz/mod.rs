//! Parametrized state preparation and variational eigensolvers.

mod circuit;
mod objective;
mod vqe;

pub use circuit::{
    build_hea, prepare_state, AmplitudeAnsatz, AnsatzCircuit, ParameterVector, Slot,
    StatePreparation,
};
pub use objective::{parameter_shift_gradient, GradientMethod, Objective, OuterFn, QuadraticForm};
pub use vqe::{
    basis_state_params, minimize_objective, spectral_range_estimate, vqe_excited_states,
    vqe_ground_state, VqeOptions, VqeResult,
};
