use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::circuit::StatePreparation;
use super::objective::{GradientMethod, Objective, QuadraticForm};
use crate::emulator::SparseOperator;
use crate::error::{Error, Result};
use crate::optim::{best_of, multistart, LbfgsOptions};
use crate::pauli::PauliSum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub gradient: GradientMethod,
    /// Basis states to seed some of the starts from (perturbed), e.g.
    /// occupation patterns of the target symmetry sector.
    #[serde(default)]
    pub seed_states: Vec<usize>,
}

impl Default for VqeOptions {
    fn default() -> Self {
        Self {
            restarts: 8,
            seed: 0,
            max_iters: 2000,
            grad_tol: 1e-6,
            gradient: GradientMethod::Adjoint,
            seed_states: Vec::new(),
        }
    }
}

impl VqeOptions {
    pub(crate) fn lbfgs(&self) -> LbfgsOptions {
        LbfgsOptions {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            ..LbfgsOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    pub restarts_used: usize,
}

/// Parameters of a hardware-efficient circuit preparing the basis state
/// `b`: everything zero except `pi` in the final rotation column on the
/// occupied qubits.
pub fn basis_state_params(n_qubits: usize, n_params: usize, b: usize) -> Vec<f64> {
    let mut p = vec![0.0; n_params];
    let last = n_params - n_qubits;
    for q in 0..n_qubits {
        if b >> q & 1 == 1 {
            p[last + q] = PI;
        }
    }
    p
}

/// Starting point for restart `k`: odd restarts perturb a seeded basis
/// state (when given), the rest are uniform in `[-pi, pi)`.
pub(crate) fn initial_point<R: Rng>(
    prep: &dyn StatePreparation,
    seeds: &[usize],
    k: usize,
    rng: &mut R,
) -> Vec<f64> {
    let n = prep.parameter_count();
    if !seeds.is_empty() && k % 2 == 1 && prep.supports_parameter_shift() {
        let b = seeds[(k / 2) % seeds.len()];
        let mut p = basis_state_params(prep.n_qubits(), n, b);
        p.iter_mut().for_each(|x| *x += rng.gen_range(-0.1..0.1));
        p
    } else {
        (0..n).map(|_| rng.gen_range(-PI..PI)).collect()
    }
}

/// Minimizes `objective` over the parameters of `prep` with seeded
/// multi-start L-BFGS.
pub fn minimize_objective(
    objective: &Objective,
    prep: &dyn StatePreparation,
    opts: &VqeOptions,
    warm_start: Option<&[f64]>,
) -> Result<VqeResult> {
    if opts.restarts == 0 {
        return Err(Error::InvalidArgument(
            "at least one start is required".into(),
        ));
    }
    let func = |x: &[f64]| {
        objective
            .value_and_gradient(prep, x, opts.gradient)
            .unwrap_or_else(|_| (f64::INFINITY, vec![0.0; x.len()]))
    };
    let init = |k: usize, rng: &mut rand_chacha::ChaCha8Rng| match (k, warm_start) {
        (0, Some(w)) => w.to_vec(),
        _ => initial_point(prep, &opts.seed_states, k, rng),
    };
    let runs = multistart(func, init, opts.restarts, opts.seed, &opts.lbfgs());
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let best = best_of(runs);
    Ok(VqeResult {
        energy: best.f,
        params: best.x,
        converged: best.converged,
        iterations,
        restarts_used: opts.restarts,
    })
}

fn energy_form(h: &PauliSum) -> Result<Arc<SparseOperator>> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::NotHermitian(
            "VQE needs a hermitian Hamiltonian".into(),
        ));
    }
    let op = SparseOperator::from_pauli_sum(h)?;
    if !op.is_real() {
        return Err(Error::InvalidArgument(
            "real-amplitude ansatz needs a real Hamiltonian matrix".into(),
        ));
    }
    Ok(Arc::new(op))
}

/// Lowest `<H>` reachable by the ansatz.
pub fn vqe_ground_state(
    h: &PauliSum,
    prep: &dyn StatePreparation,
    opts: &VqeOptions,
) -> Result<VqeResult> {
    let op = energy_form(h)?;
    let objective = Objective::linear(vec![QuadraticForm::Operator(op)], vec![1.0]);
    minimize_objective(&objective, prep, opts, None)
}

/// Sum of absolute non-identity coefficients: bounds the spectral width
/// about the identity offset.
pub fn spectral_range_estimate(h: &PauliSum) -> f64 {
    2.0 * h.coefficient_norm()
}

/// The `k` lowest states, found one after another with an overlap penalty
/// `beta_pen sum_i |<psi|psi_i>|^2` against the states already found.
/// Results are sorted by energy.
pub fn vqe_excited_states(
    h: &PauliSum,
    prep: &dyn StatePreparation,
    k: usize,
    opts: &VqeOptions,
) -> Result<Vec<VqeResult>> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let op = energy_form(h)?;
    let beta_pen = 10.0 * spectral_range_estimate(h).max(1.0);
    let mut found: Vec<VqeResult> = Vec::new();
    let mut states: Vec<Arc<Vec<f64>>> = Vec::new();
    for level in 0..k {
        let mut forms = vec![QuadraticForm::Operator(op.clone())];
        let mut weights = vec![1.0];
        for s in &states {
            forms.push(QuadraticForm::RealProjector(s.clone()));
            weights.push(beta_pen);
        }
        let objective = Objective::linear(forms, weights);
        let level_opts = VqeOptions {
            seed: crate::rng::child_seed(opts.seed, level as u64),
            ..opts.clone()
        };
        let mut r = minimize_objective(&objective, prep, &level_opts, None)?;
        let psi = prep.prepare_real(&r.params);
        r.energy = op.quadratic_form_real(&psi);
        states.push(Arc::new(psi));
        found.push(r);
    }
    found.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::build_hea;
    use crate::pauli::{Pauli, PauliTerm};

    fn pauli_z() -> PauliSum {
        PauliSum::from_terms(1, vec![PauliTerm::real(&[Pauli::Z], 1.0).unwrap()]).unwrap()
    }

    #[test]
    fn single_qubit_minimum() {
        let r = vqe_ground_state(&pauli_z(), &build_hea(1, 0), &VqeOptions::default()).unwrap();
        assert!((r.energy + 1.0).abs() < 1e-10);
        assert!(r.converged);
    }

    #[test]
    fn two_lowest_levels_of_z() {
        let r =
            vqe_excited_states(&pauli_z(), &build_hea(1, 0), 2, &VqeOptions::default()).unwrap();
        assert!((r[0].energy + 1.0).abs() < 1e-8);
        assert!((r[1].energy - 1.0).abs() < 1e-8);
    }

    #[test]
    fn basis_state_parameters_prepare_the_basis_state() {
        let c = build_hea(4, 2);
        let p = basis_state_params(4, c.parameter_count(), 0b1010);
        let s = c.prepare_real(&p);
        assert!((s[0b1010].abs() - 1.0).abs() < 1e-14);
    }
}
