use num_complex::Complex64;

use super::gates::GateOp;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Largest register the emulator accepts.
pub const MAX_EMULATOR_QUBITS: usize = 24;

/// Dense statevector over `2^n_qubits` computational-basis amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        assert!(n_qubits <= MAX_EMULATOR_QUBITS, "register too large");
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps raw amplitudes; the length must be a power of two. No
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_EMULATOR_QUBITS {
            return Err(Error::TooLarge {
                n_qubits,
                limit: MAX_EMULATOR_QUBITS,
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> f64 {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
        n
    }

    /// Real parts, if every imaginary part is below `tol`.
    pub fn to_real(&self, tol: f64) -> Option<Vec<f64>> {
        if self.amps.iter().any(|a| a.im.abs() > tol) {
            return None;
        }
        Some(self.amps.iter().map(|a| a.re).collect())
    }

    /// Probability of each basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.apply(self)
    }

    pub fn apply_all(&mut self, gates: &[GateOp]) -> Result<()> {
        gates.iter().try_for_each(|g| g.apply(self))
    }

    /// `P |psi>` for a bare Pauli string.
    pub fn apply_pauli(&self, p: &PauliString) -> StateVector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, &a) in self.amps.iter().enumerate() {
            let (phase, b2) = p.apply_to_basis(b);
            out[b2] += phase * a;
        }
        StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        }
    }

    /// `H |psi>` for a Pauli sum, term by term.
    pub fn apply_pauli_sum(&self, h: &PauliSum) -> Result<StateVector> {
        check_qubits(self.n_qubits, h.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for t in h.terms() {
            for (b, &a) in self.amps.iter().enumerate() {
                let (phase, b2) = t.string.apply_to_basis(b);
                out[b2] += t.coeff * phase * a;
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amps: out,
        })
    }
}

pub(crate) fn check_qubits(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `<a|b>`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    check_qubits(a.n_qubits, b.n_qubits)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `<a|h|b>` evaluated term by term.
pub fn matrix_element(a: &StateVector, h: &PauliSum, b: &StateVector) -> Result<Complex64> {
    check_qubits(a.n_qubits, b.n_qubits)?;
    check_qubits(a.n_qubits, h.n_qubits())?;
    let mut acc = Complex64::new(0.0, 0.0);
    for t in h.terms() {
        let mut s = Complex64::new(0.0, 0.0);
        for (idx, &amp) in b.amps.iter().enumerate() {
            let (phase, idx2) = t.string.apply_to_basis(idx);
            s += a.amps[idx2].conj() * phase * amp;
        }
        acc += t.coeff * s;
    }
    Ok(acc)
}

/// `<psi|h|psi>` for hermitian `h`.
pub fn expectation(state: &StateVector, h: &PauliSum) -> Result<f64> {
    if !h.is_hermitian(1e-12) {
        return Err(Error::NotHermitian(
            "expectation requires real Pauli coefficients".into(),
        ));
    }
    let v = matrix_element(state, h, state)?;
    let scale = 1.0 + h.terms().iter().map(|t| t.coeff.norm()).sum::<f64>();
    assert!(
        v.im.abs() <= 1e-10 * scale,
        "imaginary expectation value {}",
        v.im
    );
    Ok(v.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Pauli, PauliTerm};

    #[test]
    fn z_expectation_on_basis_states() {
        let h = PauliSum::from_terms(1, vec![PauliTerm::real(&[Pauli::Z], 1.0).unwrap()]).unwrap();
        assert_eq!(expectation(&StateVector::zero(1), &h).unwrap(), 1.0);
        assert_eq!(expectation(&StateVector::basis(1, 1), &h).unwrap(), -1.0);
    }

    #[test]
    fn non_hermitian_expectation_is_rejected() {
        let h = PauliSum::from_terms(
            1,
            vec![PauliTerm::new(&[Pauli::X], Complex64::i()).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            expectation(&StateVector::zero(1), &h),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn orthogonal_basis_states() {
        let o = overlap(&StateVector::zero(1), &StateVector::basis(1, 1)).unwrap();
        assert_eq!(o, Complex64::new(0.0, 0.0));
        assert!(overlap(&StateVector::zero(1), &StateVector::zero(2)).is_err());
    }

    #[test]
    fn amplitude_count_must_be_power_of_two() {
        assert!(StateVector::from_real(&[1.0, 0.0, 0.0]).is_err());
    }
}
