use std::f64::consts::PI;

use log::{debug, warn};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cost::{compute_b_squared, CostWeights, KrylovCost, KrylovVector, MatrixElementBackend};
use crate::aim::{krylov_dimension, DEFAULT_TOL_B};
use crate::ansatz::{GradientMethod, StatePreparation};
use crate::emulator::SparseOperator;
use crate::error::{Error, Result};
use crate::greens::{LanczosCoefficients, StepResiduals, Termination};
use crate::optim::{best_of, multistart, LbfgsOptions, OptimResult};
use crate::pauli::PauliSum;
use crate::rng::child_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KvqaOptions {
    /// Largest Krylov index; `None` uses the dimension of the symmetry
    /// sector of the start vector.
    pub max_n: Option<usize>,
    pub tol_b: f64,
    /// A step counts as converged when its weighted cost is at or below this.
    pub tol_cost: f64,
    pub weights: CostWeights,
    pub backend: MatrixElementBackend,
    pub gradient: GradientMethod,
    /// Starts from `theta_{n-1}` plus a uniform perturbation of this size.
    pub warm_starts: usize,
    pub perturbation: f64,
    /// Extra uniformly random starts, used when the warm starts miss `tol_cost`.
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
    /// Abort instead of continuing with an unconverged step.
    pub strict: bool,
}

impl Default for KvqaOptions {
    fn default() -> Self {
        Self {
            max_n: None,
            tol_b: DEFAULT_TOL_B,
            tol_cost: 1e-6,
            weights: CostWeights::default(),
            backend: MatrixElementBackend::Direct,
            gradient: GradientMethod::Adjoint,
            warm_starts: 2,
            perturbation: 0.05,
            restarts: 6,
            max_iters: 2000,
            grad_tol: 1e-7,
            seed: 0,
            strict: false,
        }
    }
}

/// One accepted Krylov vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrylovStep {
    pub n: usize,
    pub params: Vec<f64>,
    pub a_n: f64,
    /// `b_n`, the coupling to the previous vector (0 for `n = 0`).
    pub b_n: f64,
    pub cost_value: f64,
    pub residuals: StepResiduals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KvqaRun {
    pub coeffs: LanczosCoefficients,
    pub steps: Vec<KrylovStep>,
}

impl KvqaRun {
    pub fn all_converged(&self) -> bool {
        self.steps.iter().all(|s| s.residuals.converged)
    }
}

/// Particle number and `2 S_z` of a real state under the spin-block mode
/// layout (first half of the qubits spin up), rounded to integers.
pub fn sector_of_state(state: &[f64], n_qubits: usize) -> (usize, i64) {
    let half = n_qubits / 2;
    let up_mask = (1usize << half) - 1;
    let (mut n, mut sz) = (0.0, 0.0);
    for (b, a) in state.iter().enumerate() {
        let p = a * a;
        let up = (b & up_mask).count_ones() as f64;
        let down = (b >> half).count_ones() as f64;
        n += p * (up + down);
        sz += p * (up - down);
    }
    (n.round().max(0.0) as usize, sz.round() as i64)
}

/// Builds the Krylov basis of `U(chi0_params)|0>` one variational step at a
/// time and returns its Lanczos coefficients.
pub fn run_kvqa(
    prep: &dyn StatePreparation,
    chi0_params: &[f64],
    h: &PauliSum,
    opts: &KvqaOptions,
) -> Result<KvqaRun> {
    if chi0_params.len() != prep.parameter_count() {
        return Err(Error::DimensionMismatch {
            expected: prep.parameter_count(),
            found: chi0_params.len(),
        });
    }
    if h.n_qubits() != prep.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: prep.n_qubits(),
            found: h.n_qubits(),
        });
    }
    if opts.max_n == Some(0) {
        return Err(Error::InvalidArgument("max_n must be at least 1".into()));
    }
    opts.weights.validate()?;
    let h_op = SparseOperator::from_pauli_sum(h)?;
    let h2_op = SparseOperator::from_pauli_sum(&h.mul(h)?.simplify(0.0))?;
    if !h_op.is_real() {
        return Err(Error::InvalidArgument(
            "the real-amplitude ansatz needs a real Hamiltonian matrix".into(),
        ));
    }

    let chi0 = KrylovVector::prepare(prep, chi0_params);
    // Registers that do not follow the spin-block layout fall back to the
    // full Hilbert-space dimension.
    let dim = if prep.n_qubits() % 2 == 0 {
        let (n, two_sz) = sector_of_state(&chi0.state, prep.n_qubits());
        krylov_dimension(prep.n_qubits() / 2, n, two_sz).max(1)
    } else {
        1usize << prep.n_qubits()
    };
    let (limit, bound_reason) = match opts.max_n {
        Some(m) if m < dim => (m, Termination::MaxN),
        _ => (dim, Termination::KrylovDim),
    };

    let a0 = h_op.quadratic_form_real(&chi0.state);
    let mut steps = vec![KrylovStep {
        n: 0,
        params: chi0.params.clone(),
        a_n: a0,
        b_n: 0.0,
        cost_value: 0.0,
        residuals: StepResiduals::exact(),
    }];
    let mut vectors = vec![chi0];
    let mut terminated = bound_reason;

    for n in 1..=limit {
        let prev = &vectors[n - 1];
        let (a_prev, b_prev) = (steps[n - 1].a_n, steps[n - 1].b_n);
        let b2 = compute_b_squared(&h2_op, &prev.state, a_prev, b_prev);
        if b2 <= opts.tol_b {
            if b2 < -opts.tol_b {
                if opts.strict {
                    return Err(Error::NegativeBSquared { n, value: b2 });
                }
                warn!("b_{n}^2 = {b2:.3e} is negative; truncating the chain");
                terminated = Termination::NegativeB;
            } else {
                terminated = Termination::BZero;
            }
            break;
        }
        // Index `dim` would be one vector more than the space holds; the
        // b^2 check above is all that is left to do.
        if n == dim {
            break;
        }
        let b_n = b2.sqrt();
        let prev2 = if n >= 2 { Some(&vectors[n - 2]) } else { None };
        let cost = KrylovCost::new(
            prep,
            h,
            &h_op,
            prev,
            prev2,
            b_n,
            opts.weights,
            &opts.backend,
        )?;

        let best = minimize_step(
            prep,
            &cost,
            &prev.params,
            opts,
            child_seed(opts.seed, n as u64),
        );
        let residuals = cost.residuals(prep, &best.x, opts.tol_cost)?;
        debug!("step {n}: cost {:.3e} ({residuals:?})", best.f);
        if !residuals.converged {
            if opts.strict {
                return Err(Error::NotConverged(format!(
                    "Krylov step {n}: cost {:.3e}",
                    best.f
                )));
            }
            warn!("Krylov step {n} stopped at cost {:.3e}", best.f);
        }
        let chi = KrylovVector::prepare(prep, &best.x);
        let a_n = h_op.quadratic_form_real(&chi.state);
        steps.push(KrylovStep {
            n,
            params: best.x,
            a_n,
            b_n,
            cost_value: best.f,
            residuals,
        });
        vectors.push(chi);
    }

    let a = steps.iter().map(|s| s.a_n).collect();
    let b = steps[1..].iter().map(|s| s.b_n).collect();
    let mut coeffs = LanczosCoefficients::new(a, b, terminated)?;
    coeffs.residuals = steps[1..].iter().map(|s| s.residuals).collect();
    Ok(KvqaRun { coeffs, steps })
}

fn minimize_step(
    prep: &dyn StatePreparation,
    cost: &KrylovCost,
    warm: &[f64],
    opts: &KvqaOptions,
    seed: u64,
) -> OptimResult {
    let lbfgs = LbfgsOptions {
        max_iters: opts.max_iters,
        grad_tol: opts.grad_tol,
        ..LbfgsOptions::default()
    };
    let func = |x: &[f64]| {
        cost.objective()
            .value_and_gradient(prep, x, opts.gradient)
            .unwrap_or_else(|_| (f64::INFINITY, vec![0.0; x.len()]))
    };
    let n_warm = opts.warm_starts.max(1);
    let perturb = |_: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        warm.iter()
            .map(|t| t + opts.perturbation * rng.gen_range(-1.0..1.0))
            .collect()
    };
    let mut best = best_of(multistart(func, perturb, n_warm, seed, &lbfgs));
    if best.f > opts.tol_cost && opts.restarts > 0 {
        let random = |_: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
            (0..warm.len()).map(|_| rng.gen_range(-PI..PI)).collect()
        };
        let more = best_of(multistart(
            func,
            random,
            opts.restarts,
            child_seed(seed, 1),
            &lbfgs,
        ));
        if more.f < best.f {
            best = more;
        }
    }
    best
}
