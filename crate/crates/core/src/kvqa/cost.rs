use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ansatz::{Objective, QuadraticForm, StatePreparation};
use crate::emulator::{extrapolation_weights, trotter_step, SparseOperator, StateVector};
use crate::error::{Error, Result};
use crate::greens::StepResiduals;
use crate::pauli::PauliSum;

/// Step sizes for the Trotter estimate of `|<psi|H|chi>|`.
pub const DEFAULT_TROTTER_STEPS: [f64; 3] = [0.02, 0.01, 0.005];

/// How `|<psi|H|chi_{n-1}>|` is evaluated inside the cost function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatrixElementBackend {
    /// Inner product with `H|chi>` on the statevector.
    #[default]
    Direct,
    /// One-step Trotter overlaps at several step sizes, extrapolated
    /// linearly to zero step.
    Trotter { steps: Vec<f64> },
    /// Term-by-term Hadamard tests with an ancilla. Needs parameter-shift
    /// gradients.
    Hadamard,
}

impl MatrixElementBackend {
    pub fn trotter() -> Self {
        MatrixElementBackend::Trotter {
            steps: DEFAULT_TROTTER_STEPS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub w0: f64,
    pub w1: f64,
    pub w2: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            w0: 1.0,
            w1: 1.0,
            w2: 1.0,
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<()> {
        if [self.w0, self.w1, self.w2]
            .iter()
            .all(|w| *w > 0.0 && w.is_finite())
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "cost weights must be positive".into(),
            ))
        }
    }
}

/// A prepared Krylov vector: its parameters and real amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct KrylovVector {
    pub params: Vec<f64>,
    pub state: Vec<f64>,
}

impl KrylovVector {
    pub fn prepare(prep: &dyn StatePreparation, params: &[f64]) -> Self {
        Self {
            params: params.to_vec(),
            state: prep.prepare_real(params),
        }
    }
}

/// `(|m| / |b_n| - 1)^2`.
pub fn eps0_from_element(m: f64, b_n: f64) -> f64 {
    (m.abs() / b_n.abs() - 1.0).powi(2)
}

/// Squared overlap `|<0|U(theta)^dag U(theta')|0>|^2`; this is both
/// `eps_{n1}` (against `chi_{n-1}`) and `eps_{n2}` (against `chi_{n-2}`).
pub fn eps_overlap(prep: &dyn StatePreparation, theta: &[f64], theta_other: &[f64]) -> f64 {
    let a = prep.prepare_real(theta);
    let b = prep.prepare_real(theta_other);
    let o: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    o * o
}

/// Matrix element `|<0|U(theta)^dag H U(theta_prev)|0>|` through `backend`.
pub fn matrix_element_estimate(
    prep: &dyn StatePreparation,
    theta: &[f64],
    theta_prev: &[f64],
    h: &PauliSum,
    backend: &MatrixElementBackend,
) -> Result<f64> {
    let prev = KrylovVector::prepare(prep, theta_prev);
    let forms = ElementForms::build(prep, h, &prev, backend)?;
    let psi = prep.prepare_real(theta);
    let gates = prep.gates(theta);
    let q: Vec<f64> = forms
        .forms
        .iter()
        .map(|f| f.value(&psi, gates.as_deref()))
        .collect::<Result<_>>()?;
    Ok(combine_element(&forms.coefficients, &q).0)
}

/// `eps_{n0}`: squared relative deviation of the estimated matrix element
/// from `|b_n|`.
pub fn eps0(
    prep: &dyn StatePreparation,
    theta: &[f64],
    theta_prev: &[f64],
    h: &PauliSum,
    b_n: f64,
    backend: &MatrixElementBackend,
) -> Result<f64> {
    if b_n == 0.0 {
        return Err(Error::InvalidArgument(
            "b_n = 0: the recursion must stop instead".into(),
        ));
    }
    Ok(eps0_from_element(
        matrix_element_estimate(prep, theta, theta_prev, h, backend)?,
        b_n,
    ))
}

/// `b_n^2 = <chi|H^2|chi> - a_{n-1}^2 - b_{n-1}^2`, with `h2` the compiled
/// square of the Hamiltonian.
pub fn compute_b_squared(h2: &SparseOperator, chi: &[f64], a_prev: f64, b_prev: f64) -> f64 {
    h2.quadratic_form_real(chi) - a_prev * a_prev - b_prev * b_prev
}

/// The forms whose values determine the matrix-element estimate, and how
/// to combine them: `M = sum_k c_k sqrt(q_k)`.
/// `M = sum_k c_k sqrt(q_k)` and `dM/dq_k`.
fn combine_element(coefficients: &[f64], q: &[f64]) -> (f64, Vec<f64>) {
    let mut m = 0.0;
    let mut dm = Vec::with_capacity(q.len());
    for (&c, &qk) in coefficients.iter().zip(q) {
        let s = qk.max(0.0).sqrt();
        m += c * s;
        dm.push(c / (2.0 * s.max(1e-12)));
    }
    (m, dm)
}

struct ElementForms {
    forms: Vec<QuadraticForm>,
    coefficients: Vec<f64>,
}

impl ElementForms {
    fn build(
        prep: &dyn StatePreparation,
        h: &PauliSum,
        prev: &KrylovVector,
        backend: &MatrixElementBackend,
    ) -> Result<Self> {
        Ok(match backend {
            MatrixElementBackend::Direct => {
                let op = SparseOperator::from_pauli_sum(h)?;
                Self::direct(&op, prev)
            }
            MatrixElementBackend::Trotter { steps } => {
                let alphas = extrapolation_weights(steps)?;
                let chi = StateVector::from_real(&prev.state)?;
                let mut forms = Vec::with_capacity(steps.len());
                for &dt in steps {
                    if !(dt > 0.0) {
                        return Err(Error::InvalidArgument(
                            "Trotter steps must be positive".into(),
                        ));
                    }
                    let u = trotter_step(&chi, h, dt)?;
                    forms.push(QuadraticForm::Projector(Arc::new(u.into_amplitudes())));
                }
                let coefficients = alphas.iter().zip(steps).map(|(a, dt)| a / dt).collect();
                Self {
                    forms,
                    coefficients,
                }
            }
            MatrixElementBackend::Hadamard => {
                let right = prep.gates(&prev.params).ok_or_else(|| {
                    Error::InvalidArgument("Hadamard tests need a gate-based ansatz".into())
                })?;
                Self {
                    forms: vec![QuadraticForm::HadamardElement {
                        h: Arc::new(h.clone()),
                        right: Arc::new(right),
                    }],
                    coefficients: vec![1.0],
                }
            }
        })
    }

    fn direct(op: &SparseOperator, prev: &KrylovVector) -> Self {
        let h_chi = op.apply_real(&prev.state);
        Self {
            forms: vec![QuadraticForm::RealProjector(Arc::new(h_chi))],
            coefficients: vec![1.0],
        }
    }
}

/// The cost function `F_n = w_0 eps_{n0} + w_1 eps_{n1} + w_2 eps_{n2}` of
/// one Krylov step, ready for minimization.
#[derive(Debug, Clone)]
pub struct KrylovCost {
    objective: Objective,
    n_element_forms: usize,
    has_eps2: bool,
    coefficients: Vec<f64>,
    b_n: f64,
    weights: CostWeights,
}

impl KrylovCost {
    /// `h_op` is the compiled Hamiltonian (used by the direct backend).
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        prep: &dyn StatePreparation,
        h: &PauliSum,
        h_op: &SparseOperator,
        prev: &KrylovVector,
        prev2: Option<&KrylovVector>,
        b_n: f64,
        weights: CostWeights,
        backend: &MatrixElementBackend,
    ) -> Result<Self> {
        weights.validate()?;
        if !(b_n > 0.0) {
            return Err(Error::InvalidArgument("b_n must be positive".into()));
        }
        let element = match backend {
            MatrixElementBackend::Direct => ElementForms::direct(h_op, prev),
            other => ElementForms::build(prep, h, prev, other)?,
        };
        let n_element_forms = element.forms.len();
        let mut forms = element.forms;
        forms.push(QuadraticForm::RealProjector(Arc::new(prev.state.clone())));
        if let Some(p2) = prev2 {
            forms.push(QuadraticForm::RealProjector(Arc::new(p2.state.clone())));
        }
        let coefficients = element.coefficients;
        let has_eps2 = prev2.is_some();
        let outer = {
            let coefficients = coefficients.clone();
            move |q: &[f64]| {
                let (m, dm) = combine_element(&coefficients, &q[..n_element_forms]);
                let r = m / b_n - 1.0;
                let mut f = weights.w0 * r * r + weights.w1 * q[n_element_forms];
                let mut grad: Vec<f64> =
                    dm.iter().map(|d| weights.w0 * 2.0 * r / b_n * d).collect();
                grad.push(weights.w1);
                if has_eps2 {
                    f += weights.w2 * q[n_element_forms + 1];
                    grad.push(weights.w2);
                }
                (f, grad)
            }
        };
        Ok(Self {
            objective: Objective::new(forms, Arc::new(outer)),
            n_element_forms,
            has_eps2,
            coefficients,
            b_n,
            weights,
        })
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn value(&self, prep: &dyn StatePreparation, params: &[f64]) -> Result<f64> {
        self.objective.value(prep, params)
    }

    /// The three terms at `params`, with `converged` set against `tol_cost`.
    pub fn residuals(
        &self,
        prep: &dyn StatePreparation,
        params: &[f64],
        tol_cost: f64,
    ) -> Result<StepResiduals> {
        let q = self.objective.form_values(prep, params)?;
        let (m, _) = combine_element(&self.coefficients, &q[..self.n_element_forms]);
        let eps0 = eps0_from_element(m, self.b_n);
        let eps1 = q[self.n_element_forms];
        let eps2 = if self.has_eps2 {
            q[self.n_element_forms + 1]
        } else {
            0.0
        };
        let total = self.weights.w0 * eps0 + self.weights.w1 * eps1 + self.weights.w2 * eps2;
        Ok(StepResiduals {
            eps0,
            eps1,
            eps2,
            converged: total <= tol_cost,
        })
    }
}

/// `F_n(theta)` for a single parameter vector.
#[allow(clippy::too_many_arguments)]
pub fn krylov_cost(
    prep: &dyn StatePreparation,
    theta: &[f64],
    theta_prev: &[f64],
    theta_prev2: Option<&[f64]>,
    h: &PauliSum,
    b_n: f64,
    weights: CostWeights,
    backend: &MatrixElementBackend,
) -> Result<f64> {
    let op = SparseOperator::from_pauli_sum(h)?;
    let prev = KrylovVector::prepare(prep, theta_prev);
    let prev2 = theta_prev2.map(|t| KrylovVector::prepare(prep, t));
    KrylovCost::new(prep, h, &op, &prev, prev2.as_ref(), b_n, weights, backend)?.value(prep, theta)
}
