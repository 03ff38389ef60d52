use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::state::MAX_EMULATOR_QUBITS;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Below this dimension products run on the calling thread; callers
/// parallelize over independent evaluations instead.
const PARALLEL_DIM: usize = 1 << 12;

/// A Pauli sum compiled to a compressed-sparse-row matrix on the full
/// computational basis. Products with it dominate every variational loop.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    n_qubits: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
    real_vals: Option<Vec<f64>>,
}

impl SparseOperator {
    pub fn from_pauli_sum(h: &PauliSum) -> Result<Self> {
        let n = h.n_qubits();
        if n > MAX_EMULATOR_QUBITS {
            return Err(Error::TooLarge {
                n_qubits: n,
                limit: MAX_EMULATOR_QUBITS,
            });
        }
        let dim = 1usize << n;
        let rows: Vec<(Vec<usize>, Vec<Complex64>)> = (0..dim)
            .into_par_iter()
            .map(|row| {
                // <row|P|col> is nonzero only for col = row ^ x; the phase
                // follows from P|col> = phase |row>.
                let mut entries: Vec<(usize, Complex64)> = h
                    .terms()
                    .iter()
                    .map(|t| {
                        let col = row ^ t.string.x_mask() as usize;
                        let (phase, _) = t.string.apply_to_basis(col);
                        (col, t.coeff * phase)
                    })
                    .collect();
                entries.sort_unstable_by_key(|e| e.0);
                let mut cols = Vec::with_capacity(entries.len());
                let mut vals: Vec<Complex64> = Vec::with_capacity(entries.len());
                for (c, v) in entries {
                    if cols.last() == Some(&c) {
                        *vals.last_mut().unwrap() += v;
                    } else {
                        cols.push(c);
                        vals.push(v);
                    }
                }
                let keep: Vec<bool> = vals.iter().map(|v| v.norm() > 1e-14).collect();
                let cols = cols
                    .into_iter()
                    .zip(&keep)
                    .filter(|(_, &k)| k)
                    .map(|(c, _)| c)
                    .collect();
                let vals = vals
                    .into_iter()
                    .zip(&keep)
                    .filter(|(_, &k)| k)
                    .map(|(v, _)| v)
                    .collect();
                (cols, vals)
            })
            .collect();

        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for (c, v) in rows {
            cols.extend(c);
            vals.extend(v);
            row_ptr.push(cols.len());
        }
        let real_vals = if vals.iter().all(|v: &Complex64| v.im.abs() < 1e-14) {
            Some(vals.iter().map(|v| v.re).collect())
        } else {
            None
        };
        Ok(Self {
            n_qubits: n,
            row_ptr,
            cols,
            vals,
            real_vals,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Whether every matrix element is real.
    pub fn is_real(&self) -> bool {
        self.real_vals.is_some()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply_into(v, &mut out);
        out
    }

    pub fn apply_into(&self, v: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(v.len(), self.dim());
        let row = |(r, o): (usize, &mut Complex64)| {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            *o = (a..b).map(|k| self.vals[k] * v[self.cols[k]]).sum();
        };
        if self.dim() >= PARALLEL_DIM {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }

    /// Product with a real vector; panics if the matrix is not real.
    pub fn apply_real(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_real_into(v, &mut out);
        out
    }

    pub fn apply_real_into(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.dim());
        let vals = self
            .real_vals
            .as_ref()
            .expect("operator has complex matrix elements");
        let row = |(r, o): (usize, &mut f64)| {
            let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
            *o = (a..b).map(|k| vals[k] * v[self.cols[k]]).sum();
        };
        if self.dim() >= PARALLEL_DIM {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }

    /// `<v|A|v>` for real `v`.
    pub fn quadratic_form_real(&self, v: &[f64]) -> f64 {
        let av = self.apply_real(v);
        v.iter().zip(&av).map(|(a, b)| a * b).sum()
    }

    /// `<a|A|b>`.
    pub fn matrix_element(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let ab = self.apply(b);
        a.iter().zip(&ab).map(|(x, y)| x.conj() * y).sum()
    }

    /// Dense copy, for small registers.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for r in 0..d {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emulator::StateVector;
    use crate::pauli::{Pauli, PauliTerm};

    #[test]
    fn compiled_operator_matches_term_by_term_action() {
        let h = PauliSum::from_terms(
            3,
            vec![
                PauliTerm::real(&[Pauli::X, Pauli::Z, Pauli::I], 0.7).unwrap(),
                PauliTerm::real(&[Pauli::Y, Pauli::Y, Pauli::Z], -0.3).unwrap(),
                PauliTerm::real(&[Pauli::I, Pauli::I, Pauli::I], 1.1).unwrap(),
                PauliTerm::new(&[Pauli::Z, Pauli::X, Pauli::Y], Complex64::new(0.2, 0.0)).unwrap(),
            ],
        )
        .unwrap();
        let op = SparseOperator::from_pauli_sum(&h).unwrap();
        let amps: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(k as f64 * 0.1, 1.0 - k as f64 * 0.05))
            .collect();
        let s = StateVector::from_amplitudes(amps.clone()).unwrap();
        let want = s.apply_pauli_sum(&h).unwrap();
        for (a, b) in op.apply(&amps).iter().zip(want.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        let dense = op.to_dense();
        assert!((dense.adjoint() - &dense).norm() < 1e-12);
    }

    #[test]
    fn y_pair_is_real() {
        let h = PauliSum::from_terms(
            2,
            vec![PauliTerm::real(&[Pauli::Y, Pauli::Y], 1.0).unwrap()],
        )
        .unwrap();
        assert!(SparseOperator::from_pauli_sum(&h).unwrap().is_real());
        let h = PauliSum::from_terms(1, vec![PauliTerm::real(&[Pauli::Y], 1.0).unwrap()]).unwrap();
        assert!(!SparseOperator::from_pauli_sum(&h).unwrap().is_real());
    }
}
