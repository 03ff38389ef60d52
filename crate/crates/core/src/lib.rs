//! Krylov variational Green's functions for Anderson impurity models.

pub mod aim;
pub mod ansatz;
pub mod bench;
pub mod dmft;
pub mod emulator;
pub mod error;
pub mod greens;
pub mod kvqa;
pub mod linalg;
pub mod optim;
pub mod pauli;
pub mod rng;
pub mod solver;

pub use error::{Error, Result};
