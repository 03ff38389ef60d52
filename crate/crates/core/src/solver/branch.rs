use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::aim::{krylov_dimension, lanczos_with, DEFAULT_TOL_B};
use crate::ansatz::{
    minimize_objective, AnsatzCircuit, Objective, QuadraticForm, StatePreparation, VqeOptions,
};
use crate::emulator::SparseOperator;
use crate::error::{Error, Result};
use crate::greens::{LanczosCoefficients, Termination};
use crate::kvqa::{run_kvqa, sector_of_state, KrylovStep, KvqaOptions};
use crate::pauli::PauliSum;

/// Lanczos coefficients of one normalized start vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchOutcome {
    pub coeffs: LanczosCoefficients,
    /// Fidelity of the prepared start vector with the requested one (1 for
    /// exact solvers).
    pub fidelity: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<KrylovStep>,
}

/// Produces the continued fraction of a start vector.
pub trait BranchSolver: Send + Sync {
    /// `phi` is normalized; `hint` may carry parameters of a related state
    /// for a warm start.
    fn solve(&self, phi: &[f64], hint: Option<&[f64]>, seed: u64) -> Result<BranchOutcome>;
}

/// The Krylov index bound of the symmetry sector of `phi`.
fn sector_bound(phi: &[f64], n_qubits: usize) -> usize {
    let (n, two_sz) = sector_of_state(phi, n_qubits);
    krylov_dimension(n_qubits / 2, n, two_sz).max(1) - 1
}

/// Exact Lanczos with full reorthogonalization on the statevector.
#[derive(Debug, Clone)]
pub struct ClassicalBranchSolver {
    h: Arc<SparseOperator>,
    pub max_n: Option<usize>,
    pub tol_b: f64,
}

impl ClassicalBranchSolver {
    pub fn new(h: &PauliSum) -> Result<Self> {
        let op = SparseOperator::from_pauli_sum(h)?;
        if !op.is_real() {
            return Err(Error::InvalidArgument(
                "classical Lanczos here needs a real Hamiltonian matrix".into(),
            ));
        }
        Ok(Self {
            h: Arc::new(op),
            max_n: None,
            tol_b: DEFAULT_TOL_B,
        })
    }
}

impl BranchSolver for ClassicalBranchSolver {
    fn solve(&self, phi: &[f64], _hint: Option<&[f64]>, _seed: u64) -> Result<BranchOutcome> {
        let bound = sector_bound(phi, self.h.n_qubits());
        let max_n = self.max_n.map_or(bound, |m| m.min(bound));
        let mut coeffs = lanczos_with(|v| self.h.apply_real(v), phi, max_n, self.tol_b)?.coeffs;
        if coeffs.terminated == Termination::MaxN && max_n == bound {
            coeffs.terminated = Termination::KrylovDim;
        }
        Ok(BranchOutcome {
            coeffs,
            fidelity: 1.0,
            steps: Vec::new(),
        })
    }
}

/// Variational path: fit the start vector on the circuit, then run KVQA.
#[derive(Debug, Clone)]
pub struct KvqaBranchSolver {
    pub circuit: AnsatzCircuit,
    pub h: PauliSum,
    pub fit: VqeOptions,
    pub kvqa: KvqaOptions,
}

/// Circuit parameters maximizing `|<psi(theta)|target>|^2`, and the fidelity
/// reached.
pub fn fit_state(
    prep: &dyn StatePreparation,
    target: &[f64],
    opts: &VqeOptions,
    warm_start: Option<&[f64]>,
) -> Result<(Vec<f64>, f64)> {
    if target.len() != 1usize << prep.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << prep.n_qubits(),
            found: target.len(),
        });
    }
    let objective = Objective::linear(
        vec![QuadraticForm::RealProjector(Arc::new(target.to_vec()))],
        vec![-1.0],
    );
    let r = minimize_objective(&objective, prep, opts, warm_start)?;
    Ok((r.params, -r.energy))
}

impl BranchSolver for KvqaBranchSolver {
    fn solve(&self, phi: &[f64], hint: Option<&[f64]>, seed: u64) -> Result<BranchOutcome> {
        let fit_opts = VqeOptions {
            seed,
            ..self.fit.clone()
        };
        let (params, fidelity) = fit_state(&self.circuit, phi, &fit_opts, hint)?;
        let kvqa = KvqaOptions {
            seed: crate::rng::child_seed(seed, 0),
            ..self.kvqa.clone()
        };
        let run = run_kvqa(&self.circuit, &params, &self.h, &kvqa)?;
        Ok(BranchOutcome {
            coeffs: run.coeffs,
            fidelity,
            steps: run.steps,
        })
    }
}
