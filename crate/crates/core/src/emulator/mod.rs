//! Noiseless statevector emulator.
//!
//! Qubit `q` is bit `q` of the basis-state index (qubit 0 least significant).

mod gates;
mod protocols;
mod sparse;
mod state;

pub use gates::{apply_gate, apply_pauli_exponential, inverse_circuit, GateOp};
pub use protocols::{
    extrapolation_weights, hadamard_test, linear_extrapolate_to_zero, trotter_matrix_element,
    trotter_overlap, trotter_samples, trotter_step,
};
pub use sparse::SparseOperator;
pub use state::{expectation, matrix_element, overlap, StateVector, MAX_EMULATOR_QUBITS};
