use serde::{Deserialize, Serialize};

use crate::emulator::{GateOp, StateVector};
use crate::error::{Error, Result};

/// Real rotation angles (radians) of a parametrized circuit.
pub type ParameterVector = Vec<f64>;

/// One slot of the circuit template.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    Ry { qubit: usize, param: usize },
    Cnot { control: usize, target: usize },
}

/// Anything that maps real parameters to a real-amplitude state and can
/// push a state-space gradient back to parameter space.
pub trait StatePreparation: Send + Sync {
    fn n_qubits(&self) -> usize;

    fn parameter_count(&self) -> usize;

    /// Real amplitudes of `U(params)|0>`.
    fn prepare_real(&self, params: &[f64]) -> Vec<f64>;

    /// Adds `sum_i state_grad[i] * d psi_i / d params_k` to `grad[k]`, where
    /// `state` is `prepare_real(params)`.
    fn backpropagate(&self, params: &[f64], state: &[f64], state_grad: &[f64], grad: &mut [f64]);

    /// Whether every parameter enters through a single `exp(-i t P / 2)`
    /// factor, so the two-term shift rule is exact.
    fn supports_parameter_shift(&self) -> bool;

    /// Gate list, for circuit-level protocols.
    fn gates(&self, params: &[f64]) -> Option<Vec<GateOp>>;

    fn prepare(&self, params: &[f64]) -> StateVector {
        StateVector::from_real(&self.prepare_real(params)).expect("power-of-two register")
    }
}

/// Hardware-efficient ansatz: a column of `Ry` rotations, then `n_layers`
/// repetitions of a two-sublayer linear CNOT ladder followed by another `Ry`
/// column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzCircuit {
    n_qubits: usize,
    n_layers: usize,
    template: Vec<Slot>,
}

pub fn build_hea(n_qubits: usize, n_layers: usize) -> AnsatzCircuit {
    assert!(n_qubits >= 1, "ansatz needs at least one qubit");
    let mut template = Vec::new();
    let mut param = 0;
    let mut ry_column = |template: &mut Vec<Slot>| {
        for q in 0..n_qubits {
            template.push(Slot::Ry { qubit: q, param });
            param += 1;
        }
    };
    ry_column(&mut template);
    for _ in 0..n_layers {
        for start in [0, 1] {
            for c in (start..n_qubits.saturating_sub(1)).step_by(2) {
                template.push(Slot::Cnot {
                    control: c,
                    target: c + 1,
                });
            }
        }
        ry_column(&mut template);
    }
    AnsatzCircuit {
        n_qubits,
        n_layers,
        template,
    }
}

#[inline]
fn ry_real(state: &mut [f64], qubit: usize, c: f64, s: f64) {
    let bit = 1usize << qubit;
    for i in 0..state.len() {
        if i & bit == 0 {
            let (a, b) = (state[i], state[i | bit]);
            state[i] = c * a - s * b;
            state[i | bit] = s * a + c * b;
        }
    }
}

#[inline]
fn cnot_real(state: &mut [f64], control: usize, target: usize) {
    let (cb, tb) = (1usize << control, 1usize << target);
    for i in 0..state.len() {
        if i & cb != 0 && i & tb == 0 {
            state.swap(i, i | tb);
        }
    }
}

impl AnsatzCircuit {
    pub fn n_layers(&self) -> usize {
        self.n_layers
    }

    pub fn template(&self) -> &[Slot] {
        &self.template
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.parameter_count() {
            return Err(Error::DimensionMismatch {
                expected: self.parameter_count(),
                found: params.len(),
            });
        }
        Ok(())
    }
}

impl StatePreparation for AnsatzCircuit {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn parameter_count(&self) -> usize {
        self.n_qubits * (self.n_layers + 1)
    }

    fn prepare_real(&self, params: &[f64]) -> Vec<f64> {
        assert_eq!(params.len(), self.parameter_count(), "parameter count");
        let mut state = vec![0.0; 1 << self.n_qubits];
        state[0] = 1.0;
        for slot in &self.template {
            match *slot {
                Slot::Ry { qubit, param } => {
                    let (s, c) = (params[param] / 2.0).sin_cos();
                    ry_real(&mut state, qubit, c, s);
                }
                Slot::Cnot { control, target } => cnot_real(&mut state, control, target),
            }
        }
        state
    }

    fn backpropagate(&self, params: &[f64], state: &[f64], state_grad: &[f64], grad: &mut [f64]) {
        // Walk the circuit backwards, uncomputing the forward state and
        // carrying the adjoint vector; each Ry contributes <lambda|dRy|phi>.
        let mut phi = state.to_vec();
        let mut lam = state_grad.to_vec();
        for slot in self.template.iter().rev() {
            match *slot {
                Slot::Cnot { control, target } => {
                    cnot_real(&mut phi, control, target);
                    cnot_real(&mut lam, control, target);
                }
                Slot::Ry { qubit, param } => {
                    let (s, c) = (params[param] / 2.0).sin_cos();
                    ry_real(&mut phi, qubit, c, -s);
                    let bit = 1usize << qubit;
                    let mut g = 0.0;
                    for i in 0..phi.len() {
                        if i & bit == 0 {
                            let (a, b) = (phi[i], phi[i | bit]);
                            g += lam[i] * (-s * a - c * b) + lam[i | bit] * (c * a - s * b);
                        }
                    }
                    grad[param] += 0.5 * g;
                    ry_real(&mut lam, qubit, c, -s);
                }
            }
        }
    }

    fn supports_parameter_shift(&self) -> bool {
        true
    }

    fn gates(&self, params: &[f64]) -> Option<Vec<GateOp>> {
        Some(
            self.template
                .iter()
                .map(|slot| match *slot {
                    Slot::Ry { qubit, param } => GateOp::Ry {
                        qubit,
                        angle: params[param],
                    },
                    Slot::Cnot { control, target } => GateOp::Cnot { control, target },
                })
                .collect(),
        )
    }
}

/// `U(params)|0...0>` for a circuit, with a length check.
pub fn prepare_state(circuit: &AnsatzCircuit, params: &[f64]) -> Result<StateVector> {
    circuit.check_params(params)?;
    let mut s = StateVector::zero(circuit.n_qubits);
    s.apply_all(&circuit.gates(params).expect("circuit has gates"))?;
    Ok(s)
}

/// Unconstrained real amplitudes `psi = p / |p|`, one parameter per basis
/// state. Reaches every real state exactly, which isolates algorithmic
/// error from ansatz expressivity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmplitudeAnsatz {
    n_qubits: usize,
}

impl AmplitudeAnsatz {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits }
    }
}

impl StatePreparation for AmplitudeAnsatz {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn parameter_count(&self) -> usize {
        1 << self.n_qubits
    }

    fn prepare_real(&self, params: &[f64]) -> Vec<f64> {
        let n: f64 = params.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            let mut v = vec![0.0; params.len()];
            v[0] = 1.0;
            return v;
        }
        params.iter().map(|x| x / n).collect()
    }

    fn backpropagate(&self, params: &[f64], state: &[f64], state_grad: &[f64], grad: &mut [f64]) {
        let n: f64 = params.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 {
            return;
        }
        let proj: f64 = state.iter().zip(state_grad).map(|(a, b)| a * b).sum();
        for ((g, &sg), &s) in grad.iter_mut().zip(state_grad).zip(state) {
            *g += (sg - proj * s) / n;
        }
    }

    fn supports_parameter_shift(&self) -> bool {
        false
    }

    fn gates(&self, _params: &[f64]) -> Option<Vec<GateOp>> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn parameter_counts() {
        assert_eq!(build_hea(1, 0).parameter_count(), 1);
        assert_eq!(build_hea(8, 6).parameter_count(), 56);
    }

    #[test]
    fn single_qubit_pi_rotation() {
        let s = prepare_state(&build_hea(1, 0), &[PI]).unwrap();
        assert!((s.amplitudes()[1].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_qubit_one_layer_by_hand() {
        // Ry(pi/2) on both qubits gives the uniform superposition, which the
        // CNOT leaves alone; the second column maps |+>|+> to |11>.
        let c = build_hea(2, 1);
        let s = prepare_state(&c, &[FRAC_PI_2; 4]).unwrap();
        let real = c.prepare_real(&[FRAC_PI_2; 4]);
        for (a, b) in s.amplitudes().iter().zip(&real) {
            assert!((a.re - b).abs() < 1e-14 && a.im.abs() < 1e-15);
        }
        assert!((real[3] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_angles_give_reference_state() {
        let c = build_hea(5, 3);
        let s = c.prepare_real(&vec![0.0; c.parameter_count()]);
        assert_eq!(s[0], 1.0);
        assert!(s[1..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn wrong_parameter_count_is_rejected() {
        assert!(prepare_state(&build_hea(2, 1), &[0.0; 3]).is_err());
    }
}
