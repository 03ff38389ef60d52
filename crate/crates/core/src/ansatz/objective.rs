//! Objectives of the form `F(q_1(psi), ..., q_m(psi))`, where every `q_i` is
//! the expectation value of a hermitian operator in the prepared state.
//! This covers energies, fidelities and the Krylov cost, and lets gradients
//! be taken either by adjoint backpropagation or by the parameter-shift rule.

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::StatePreparation;
use crate::emulator::{hadamard_test, GateOp, SparseOperator};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// An expectation-valued functional of the prepared state.
#[derive(Debug, Clone)]
pub enum QuadraticForm {
    /// `<psi|A|psi>` for a real symmetric operator.
    Operator(Arc<SparseOperator>),
    /// `|<v|psi>|^2` for a real reference vector.
    RealProjector(Arc<Vec<f64>>),
    /// `|<v|psi>|^2` for a complex reference vector.
    Projector(Arc<Vec<Complex64>>),
    /// `|<psi|H|chi>|^2` measured term by term with Hadamard tests, where
    /// `chi` is prepared by `right`. Only available through circuits.
    HadamardElement {
        h: Arc<PauliSum>,
        right: Arc<Vec<GateOp>>,
    },
}

impl QuadraticForm {
    /// Value at the (real) state `psi`; `gates` prepares `psi` and is only
    /// consulted by circuit-level forms.
    pub fn value(&self, psi: &[f64], gates: Option<&[GateOp]>) -> Result<f64> {
        Ok(match self {
            QuadraticForm::Operator(op) => op.quadratic_form_real(psi),
            QuadraticForm::RealProjector(v) => {
                let o: f64 = v.iter().zip(psi).map(|(a, b)| a * b).sum();
                o * o
            }
            QuadraticForm::Projector(v) => {
                let o: Complex64 = v.iter().zip(psi).map(|(a, &b)| a.conj() * b).sum();
                o.norm_sqr()
            }
            QuadraticForm::HadamardElement { h, right } => {
                let left = gates.ok_or_else(|| {
                    Error::InvalidArgument(
                        "Hadamard-test matrix elements need a gate-based ansatz".into(),
                    )
                })?;
                let n = h.n_qubits();
                let mut acc = Complex64::new(0.0, 0.0);
                for t in h.terms() {
                    acc += t.coeff * hadamard_test(left, &t.string, right, n)?;
                }
                acc.norm_sqr()
            }
        })
    }

    /// Adds `scale * d q / d psi` to `out`.
    fn accumulate_state_gradient(&self, psi: &[f64], scale: f64, out: &mut [f64]) -> Result<()> {
        match self {
            QuadraticForm::Operator(op) => {
                let ap = op.apply_real(psi);
                out.iter_mut()
                    .zip(&ap)
                    .for_each(|(o, a)| *o += 2.0 * scale * a);
            }
            QuadraticForm::RealProjector(v) => {
                let o: f64 = v.iter().zip(psi).map(|(a, b)| a * b).sum();
                out.iter_mut()
                    .zip(v.iter())
                    .for_each(|(g, a)| *g += 2.0 * scale * o * a);
            }
            QuadraticForm::Projector(v) => {
                let o: Complex64 = v.iter().zip(psi).map(|(a, &b)| a.conj() * b).sum();
                out.iter_mut()
                    .zip(v.iter())
                    .for_each(|(g, a)| *g += 2.0 * scale * (o * a).re);
            }
            QuadraticForm::HadamardElement { .. } => {
                return Err(Error::InvalidArgument(
                    "Hadamard-test matrix elements only support parameter-shift gradients".into(),
                ))
            }
        }
        Ok(())
    }

    fn needs_gates(&self) -> bool {
        matches!(self, QuadraticForm::HadamardElement { .. })
    }
}

/// Outer function: maps form values to `(F, dF/dq)`.
pub type OuterFn = dyn Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    /// Reverse-mode differentiation through the statevector simulation.
    Adjoint,
    /// Two-term shift rule on every form value, combined by the chain rule.
    ParameterShift,
}

#[derive(Clone)]
pub struct Objective {
    forms: Vec<QuadraticForm>,
    outer: Arc<OuterFn>,
}

impl std::fmt::Debug for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Objective")
            .field("forms", &self.forms.len())
            .finish()
    }
}

impl Objective {
    pub fn new(forms: Vec<QuadraticForm>, outer: Arc<OuterFn>) -> Self {
        Self { forms, outer }
    }

    /// `F = sum_i w_i q_i`.
    pub fn linear(forms: Vec<QuadraticForm>, weights: Vec<f64>) -> Self {
        assert_eq!(forms.len(), weights.len());
        let outer = move |q: &[f64]| {
            (
                q.iter().zip(&weights).map(|(a, b)| a * b).sum(),
                weights.clone(),
            )
        };
        Self {
            forms,
            outer: Arc::new(outer),
        }
    }

    pub fn forms(&self) -> &[QuadraticForm] {
        &self.forms
    }

    fn gates_for(&self, prep: &dyn StatePreparation, params: &[f64]) -> Option<Vec<GateOp>> {
        if self.forms.iter().any(QuadraticForm::needs_gates) {
            prep.gates(params)
        } else {
            None
        }
    }

    pub fn form_values(&self, prep: &dyn StatePreparation, params: &[f64]) -> Result<Vec<f64>> {
        let psi = prep.prepare_real(params);
        let gates = self.gates_for(prep, params);
        self.forms
            .iter()
            .map(|f| f.value(&psi, gates.as_deref()))
            .collect()
    }

    pub fn value(&self, prep: &dyn StatePreparation, params: &[f64]) -> Result<f64> {
        Ok((self.outer)(&self.form_values(prep, params)?).0)
    }

    pub fn value_and_gradient(
        &self,
        prep: &dyn StatePreparation,
        params: &[f64],
        method: GradientMethod,
    ) -> Result<(f64, Vec<f64>)> {
        match method {
            GradientMethod::Adjoint => {
                let psi = prep.prepare_real(params);
                let q: Vec<f64> = self
                    .forms
                    .iter()
                    .map(|f| f.value(&psi, None))
                    .collect::<Result<_>>()?;
                let (val, dq) = (self.outer)(&q);
                let mut sg = vec![0.0; psi.len()];
                for (form, &d) in self.forms.iter().zip(&dq) {
                    if d != 0.0 {
                        form.accumulate_state_gradient(&psi, d, &mut sg)?;
                    }
                }
                let mut grad = vec![0.0; params.len()];
                prep.backpropagate(params, &psi, &sg, &mut grad);
                Ok((val, grad))
            }
            GradientMethod::ParameterShift => {
                if !prep.supports_parameter_shift() {
                    return Err(Error::InvalidArgument(
                        "ansatz does not admit the shift rule".into(),
                    ));
                }
                let q = self.form_values(prep, params)?;
                let (val, dq) = (self.outer)(&q);
                let mut shifted = params.to_vec();
                let mut grad = vec![0.0; params.len()];
                for k in 0..params.len() {
                    shifted[k] = params[k] + FRAC_PI_2;
                    let plus = self.form_values(prep, &shifted)?;
                    shifted[k] = params[k] - FRAC_PI_2;
                    let minus = self.form_values(prep, &shifted)?;
                    shifted[k] = params[k];
                    grad[k] = dq
                        .iter()
                        .zip(plus.iter().zip(&minus))
                        .map(|(d, (p, m))| d * 0.5 * (p - m))
                        .sum();
                }
                Ok((val, grad))
            }
        }
    }
}

/// Shift-rule gradient of an expectation-valued objective of a circuit with
/// one `Ry` per parameter: `(f(theta + pi/2 e_k) - f(theta - pi/2 e_k)) / 2`.
pub fn parameter_shift_gradient<F: Fn(&[f64]) -> f64>(objective: F, params: &[f64]) -> Vec<f64> {
    let mut shifted = params.to_vec();
    (0..params.len())
        .map(|k| {
            shifted[k] = params[k] + FRAC_PI_2;
            let plus = objective(&shifted);
            shifted[k] = params[k] - FRAC_PI_2;
            let minus = objective(&shifted);
            shifted[k] = params[k];
            0.5 * (plus - minus)
        })
        .collect()
}
