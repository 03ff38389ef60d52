//! Circuit-level estimators for overlaps and transition matrix elements.

use num_complex::Complex64;

use super::gates::{inverse_circuit, GateOp};
use super::state::{check_qubits, overlap, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Complex overlap `<0| U_l^dagger P U_r |0>` from two Hadamard-test
/// circuits with an ancilla on the most significant qubit.
///
/// The real part comes from preparing the ancilla in |+>, the imaginary
/// part from `(|0> + i|1>)/sqrt(2)`; both read `<Z>` on the ancilla.
pub fn hadamard_test(
    left: &[GateOp],
    p: &PauliString,
    right: &[GateOp],
    n_qubits: usize,
) -> Result<Complex64> {
    check_qubits(n_qubits, p.n_qubits())?;
    let anc = n_qubits;
    let wide = widen(p, n_qubits + 1);
    let mut controlled: Vec<GateOp> = right.iter().map(|g| g.clone().controlled(anc)).collect();
    controlled.push(GateOp::Pauli { string: wide }.controlled(anc));
    controlled.extend(inverse_circuit(left).into_iter().map(|g| g.controlled(anc)));

    let run = |imaginary: bool| -> Result<f64> {
        let mut s = StateVector::zero(n_qubits + 1);
        s.apply(&GateOp::Hadamard { qubit: anc })?;
        if imaginary {
            s.apply(&GateOp::Phase { qubit: anc })?;
        }
        s.apply_all(&controlled)?;
        s.apply(&GateOp::Hadamard { qubit: anc })?;
        let bit = 1usize << anc;
        Ok(s.amplitudes()
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if i & bit == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    };
    Ok(Complex64::new(run(false)?, -run(true)?))
}

/// Pads a Pauli string with identities up to `n` qubits.
fn widen(p: &PauliString, n: usize) -> PauliString {
    let mut ops = p.ops();
    ops.resize(n, crate::pauli::Pauli::I);
    PauliString::from_ops(&ops).expect("widened string within limits")
}

/// One first-order Trotter step `prod_j exp(i h_j P_j dt)` in the canonical
/// term order of `h`.
pub fn trotter_step(state: &StateVector, h: &PauliSum, dt: f64) -> Result<StateVector> {
    check_qubits(state.n_qubits(), h.n_qubits())?;
    let h = h.simplify(0.0);
    let mut s = state.clone();
    for t in h.terms() {
        if t.coeff.im.abs() > 1e-12 {
            return Err(Error::NotHermitian(
                "Trotter step needs real coefficients".into(),
            ));
        }
        s.apply(&GateOp::PauliExp {
            string: t.string,
            angle: t.coeff.re * dt,
        })?;
    }
    Ok(s)
}

/// Least-squares weights `alpha` such that the zero intercept of the
/// straight-line fit through `(xs[k], y_k)` is `sum_k alpha_k y_k`.
pub fn extrapolation_weights(xs: &[f64]) -> Result<Vec<f64>> {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let det = n * sxx - sx * sx;
    if xs.len() < 2 || det.abs() < 1e-300 {
        return Err(Error::InvalidArgument(
            "need at least two distinct step sizes".into(),
        ));
    }
    Ok(xs.iter().map(|x| (sxx - x * sx) / det).collect())
}

/// Zero intercept of the least-squares line through the samples.
pub fn linear_extrapolate_to_zero(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    Ok(extrapolation_weights(xs)?
        .iter()
        .zip(ys)
        .map(|(a, y)| a * y)
        .sum())
}

/// Finite-step estimates `|<a| T(dt) |b>| / dt` for each step size.
pub fn trotter_samples(
    a: &StateVector,
    h: &PauliSum,
    b: &StateVector,
    dt_list: &[f64],
) -> Result<Vec<f64>> {
    check_dt_list(dt_list)?;
    dt_list
        .iter()
        .map(|&dt| Ok(overlap(a, &trotter_step(b, h, dt)?)?.norm() / dt))
        .collect()
}

/// `|<a|H|b>|` for near-orthogonal `a`, `b`, estimated from one-step
/// Trotter overlaps and extrapolated linearly to zero step.
pub fn trotter_matrix_element(
    a: &StateVector,
    h: &PauliSum,
    b: &StateVector,
    dt_list: &[f64],
) -> Result<f64> {
    let ys = trotter_samples(a, h, b, dt_list)?;
    linear_extrapolate_to_zero(dt_list, &ys)
}

/// Circuit form of [`trotter_matrix_element`]: `U_l |0>` and `U_r |0>` are
/// the two states.
pub fn trotter_overlap(
    left: &[GateOp],
    h: &PauliSum,
    right: &[GateOp],
    dt_list: &[f64],
) -> Result<f64> {
    let n = h.n_qubits();
    let mut a = StateVector::zero(n);
    a.apply_all(left)?;
    let mut b = StateVector::zero(n);
    b.apply_all(right)?;
    trotter_matrix_element(&a, h, &b, dt_list)
}

fn check_dt_list(dt_list: &[f64]) -> Result<()> {
    if dt_list.iter().any(|&dt| !(dt > 0.0) || !dt.is_finite()) {
        return Err(Error::InvalidArgument(
            "Trotter steps must be positive".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::matrix_element;
    use crate::pauli::{Pauli, PauliTerm};

    fn prep(angles: &[f64]) -> Vec<GateOp> {
        let mut g = vec![];
        for (q, &a) in angles.iter().enumerate() {
            g.push(GateOp::Ry { qubit: q, angle: a });
            g.push(GateOp::Phase { qubit: q });
        }
        g.push(GateOp::Cnot {
            control: 0,
            target: 1,
        });
        g
    }

    #[test]
    fn hadamard_test_matches_direct_overlap() {
        let left = prep(&[0.3, -1.2, 2.0]);
        let right = prep(&[1.7, 0.4, -0.6]);
        let p = PauliString::from_ops(&[Pauli::Y, Pauli::Z, Pauli::X]).unwrap();
        let got = hadamard_test(&left, &p, &right, 3).unwrap();

        let mut a = StateVector::zero(3);
        a.apply_all(&left).unwrap();
        let mut b = StateVector::zero(3);
        b.apply_all(&right).unwrap();
        let want = overlap(&a, &b.apply_pauli(&p)).unwrap();
        assert!((got - want).norm() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn extrapolation_recovers_a_line_exactly() {
        let xs = [0.02, 0.01, 0.005];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 - 3.0 * x).collect();
        assert!((linear_extrapolate_to_zero(&xs, &ys).unwrap() - 1.5).abs() < 1e-14);
        assert!(extrapolation_weights(&[0.01]).is_err());
        assert!(extrapolation_weights(&[0.01, 0.01]).is_err());
    }

    #[test]
    fn commuting_terms_give_exact_trotter_estimate() {
        // Single term: the one-step product is exact, |<a|e^{iHdt}|b>| =
        // |sin(h dt)| |<a|P|b>| for orthogonal a, b with P a -> b.
        let h = PauliSum::from_terms(1, vec![PauliTerm::real(&[Pauli::X], 0.8).unwrap()]).unwrap();
        let a = StateVector::basis(1, 1);
        let b = StateVector::zero(1);
        let ys = trotter_samples(&a, &h, &b, &[0.01]).unwrap();
        assert!((ys[0] - (0.8f64 * 0.01).sin() / 0.01).abs() < 1e-14);
        let est = trotter_matrix_element(&a, &h, &b, &[0.02, 0.01, 0.005]).unwrap();
        let exact = matrix_element(&a, &h, &b).unwrap().norm();
        assert!((est - exact).abs() < 1e-4);
    }

    #[test]
    fn bad_step_sizes_are_rejected() {
        let h = PauliSum::identity(1);
        let s = StateVector::zero(1);
        assert!(trotter_samples(&s, &h, &s, &[0.01, -0.1]).is_err());
    }
}
