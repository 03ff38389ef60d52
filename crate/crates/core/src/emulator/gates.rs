use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::state::StateVector;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Gate set of the emulator.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    /// `exp(-i angle Y / 2)`.
    Ry {
        qubit: usize,
        angle: f64,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Hadamard {
        qubit: usize,
    },
    /// `diag(1, i)`.
    Phase {
        qubit: usize,
    },
    /// `diag(1, -i)`.
    PhaseDagger {
        qubit: usize,
    },
    /// A bare Pauli string.
    Pauli {
        string: PauliString,
    },
    /// `exp(i angle P)`.
    PauliExp {
        string: PauliString,
        angle: f64,
    },
    /// `gate` applied only where `control` is |1>.
    Controlled {
        control: usize,
        gate: Box<GateOp>,
    },
}

impl GateOp {
    pub fn controlled(self, control: usize) -> GateOp {
        GateOp::Controlled {
            control,
            gate: Box::new(self),
        }
    }

    pub fn inverse(&self) -> GateOp {
        match self {
            GateOp::Ry { qubit, angle } => GateOp::Ry {
                qubit: *qubit,
                angle: -angle,
            },
            GateOp::Phase { qubit } => GateOp::PhaseDagger { qubit: *qubit },
            GateOp::PhaseDagger { qubit } => GateOp::Phase { qubit: *qubit },
            GateOp::PauliExp { string, angle } => GateOp::PauliExp {
                string: *string,
                angle: -angle,
            },
            GateOp::Controlled { control, gate } => GateOp::Controlled {
                control: *control,
                gate: Box::new(gate.inverse()),
            },
            other => other.clone(),
        }
    }

    /// Qubits the gate touches, controls included.
    pub fn support(&self) -> Vec<usize> {
        match self {
            GateOp::Ry { qubit, .. }
            | GateOp::Hadamard { qubit }
            | GateOp::Phase { qubit }
            | GateOp::PhaseDagger { qubit } => vec![*qubit],
            GateOp::Cnot { control, target } => vec![*control, *target],
            GateOp::Pauli { string } | GateOp::PauliExp { string, .. } => {
                let mask = string.x_mask() | string.z_mask();
                (0..64).filter(|q| mask >> q & 1 == 1).collect()
            }
            GateOp::Controlled { control, gate } => {
                let mut s = vec![*control];
                s.extend(gate.support());
                s
            }
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        if let GateOp::Pauli { string } | GateOp::PauliExp { string, .. } = self {
            if string.n_qubits() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    found: string.n_qubits(),
                });
            }
        }
        let support = self.support();
        let mut seen = 0u64;
        for &q in &support {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if seen >> q & 1 == 1 {
                return Err(Error::RepeatedQubit(q));
            }
            seen |= 1 << q;
        }
        Ok(())
    }

    /// Applies the gate in place.
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.validate(state.n_qubits())?;
        self.apply_masked(state.amplitudes_mut(), 0);
        Ok(())
    }

    /// Acts only on basis states where every bit of `cmask` is set.
    fn apply_masked(&self, amps: &mut [Complex64], cmask: usize) {
        let active = |i: usize| i & cmask == cmask;
        match self {
            GateOp::Ry { qubit, angle } => {
                let (s, c) = (angle / 2.0).sin_cos();
                let bit = 1 << qubit;
                for i in 0..amps.len() {
                    if i & bit == 0 && active(i) {
                        let (a, b) = (amps[i], amps[i | bit]);
                        amps[i] = a * c - b * s;
                        amps[i | bit] = a * s + b * c;
                    }
                }
            }
            GateOp::Cnot { control, target } => {
                let (cb, tb) = (1 << control, 1 << target);
                for i in 0..amps.len() {
                    if i & cb != 0 && i & tb == 0 && active(i) {
                        amps.swap(i, i | tb);
                    }
                }
            }
            GateOp::Hadamard { qubit } => {
                let bit = 1 << qubit;
                for i in 0..amps.len() {
                    if i & bit == 0 && active(i) {
                        let (a, b) = (amps[i], amps[i | bit]);
                        amps[i] = (a + b) * FRAC_1_SQRT_2;
                        amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            GateOp::Phase { qubit } | GateOp::PhaseDagger { qubit } => {
                let ph = if matches!(self, GateOp::Phase { .. }) {
                    Complex64::i()
                } else {
                    -Complex64::i()
                };
                let bit = 1 << qubit;
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 && active(i) {
                        *a *= ph;
                    }
                }
            }
            GateOp::Pauli { string } => {
                let src: Vec<Complex64> = amps.to_vec();
                for (i, &a) in src.iter().enumerate() {
                    if active(i) {
                        let (phase, j) = string.apply_to_basis(i);
                        amps[j] = phase * a;
                    }
                }
            }
            GateOp::PauliExp { string, angle } => {
                let (s, c) = angle.sin_cos();
                let src: Vec<Complex64> = amps.to_vec();
                for (i, a) in amps.iter_mut().enumerate() {
                    if active(i) {
                        *a *= c;
                    }
                }
                let is = Complex64::new(0.0, s);
                for (i, &a) in src.iter().enumerate() {
                    if active(i) {
                        let (phase, j) = string.apply_to_basis(i);
                        amps[j] += is * phase * a;
                    }
                }
            }
            GateOp::Controlled { control, gate } => gate.apply_masked(amps, cmask | 1 << control),
        }
    }
}

/// Returns `gate |state>` without modifying the input.
pub fn apply_gate(state: &StateVector, gate: &GateOp) -> Result<StateVector> {
    let mut out = state.clone();
    gate.apply(&mut out)?;
    Ok(out)
}

/// Returns `exp(i t P) |state>`; the Pauli coefficient is expected to be
/// folded into `t` already.
pub fn apply_pauli_exponential(
    state: &StateVector,
    p: &PauliString,
    t: f64,
) -> Result<StateVector> {
    apply_gate(
        state,
        &GateOp::PauliExp {
            string: *p,
            angle: t,
        },
    )
}

/// Inverse of a gate sequence.
pub fn inverse_circuit(gates: &[GateOp]) -> Vec<GateOp> {
    gates.iter().rev().map(GateOp::inverse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::state::overlap;
    use crate::pauli::Pauli;
    use std::f64::consts::PI;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn ry_pi_flips_zero_to_one() {
        let s = apply_gate(
            &StateVector::zero(1),
            &GateOp::Ry {
                qubit: 0,
                angle: PI,
            },
        )
        .unwrap();
        assert!(close(s.amplitudes()[1], Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn cnot_entangles_after_hadamard() {
        let mut s = StateVector::zero(2);
        s.apply(&GateOp::Hadamard { qubit: 0 }).unwrap();
        s.apply(&GateOp::Cnot {
            control: 0,
            target: 1,
        })
        .unwrap();
        let a = s.amplitudes();
        assert!(close(a[0], Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(a[3], Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(a[1], Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn pauli_exponential_of_z_is_a_phase() {
        let z = PauliString::single(1, 0, Pauli::Z).unwrap();
        let s = apply_pauli_exponential(&StateVector::basis(1, 1), &z, 0.3).unwrap();
        assert!(close(s.amplitudes()[1], Complex64::from_polar(1.0, -0.3)));
    }

    #[test]
    fn circuit_inverse_restores_state() {
        let x = PauliString::from_ops(&[Pauli::X, Pauli::Y, Pauli::Z]).unwrap();
        let gates = vec![
            GateOp::Hadamard { qubit: 2 },
            GateOp::Ry {
                qubit: 0,
                angle: 0.7,
            },
            GateOp::Phase { qubit: 1 },
            GateOp::Cnot {
                control: 0,
                target: 1,
            },
            GateOp::PauliExp {
                string: x,
                angle: 0.4,
            },
            GateOp::Ry {
                qubit: 1,
                angle: -1.1,
            }
            .controlled(2),
        ];
        let mut s = StateVector::basis(3, 5);
        s.apply_all(&gates).unwrap();
        s.apply_all(&inverse_circuit(&gates)).unwrap();
        assert!(close(
            overlap(&StateVector::basis(3, 5), &s).unwrap(),
            Complex64::new(1.0, 0.0)
        ));
    }

    #[test]
    fn invalid_qubits_are_rejected() {
        let mut s = StateVector::zero(2);
        assert!(matches!(
            s.apply(&GateOp::Hadamard { qubit: 2 }),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            s.apply(&GateOp::Cnot {
                control: 1,
                target: 1
            }),
            Err(Error::RepeatedQubit(1))
        ));
        let z = PauliString::single(2, 0, Pauli::Z).unwrap();
        assert!(matches!(
            s.apply(&GateOp::Pauli { string: z }.controlled(0)),
            Err(Error::RepeatedQubit(0))
        ));
    }

    #[test]
    fn controlled_gate_acts_only_on_set_control() {
        let g = GateOp::Ry {
            qubit: 0,
            angle: PI,
        }
        .controlled(1);
        let s = apply_gate(&StateVector::zero(2), &g).unwrap();
        assert!(close(s.amplitudes()[0], Complex64::new(1.0, 0.0)));
        let s = apply_gate(&StateVector::basis(2, 2), &g).unwrap();
        assert!(close(s.amplitudes()[3], Complex64::new(1.0, 0.0)));
    }
}
