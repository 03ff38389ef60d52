//! Jordan-Wigner mapping of fermionic ladder operators.
//!
//! Modes are laid out with all spin-up modes first (impurity sites, then bath
//! sites) followed by all spin-down modes, so mode `site + n_sites * spin`
//! lives on the qubit of the same index. The annihilator on mode `j` is
//! `Z_0 ... Z_{j-1} (X_j + i Y_j) / 2`, i.e. qubit state |1> is occupied.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Pauli, PauliString, PauliSum, PauliTerm, SIMPLIFY_TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// A (site, spin) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeIndex {
    pub site: usize,
    pub spin: Spin,
}

impl ModeIndex {
    pub fn new(site: usize, spin: Spin) -> Self {
        Self { site, spin }
    }

    /// Flat mode (= qubit) index in the spin-block ordering.
    pub fn flat(self, n_sites: usize) -> usize {
        self.site + n_sites * self.spin.index()
    }
}

/// Creation (`dagger = true`) or annihilation operator on a flat mode index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FermionOperator {
    pub mode: usize,
    pub dagger: bool,
}

impl FermionOperator {
    pub fn create(mode: usize) -> Self {
        Self { mode, dagger: true }
    }

    pub fn annihilate(mode: usize) -> Self {
        Self {
            mode,
            dagger: false,
        }
    }

    pub fn adjoint(self) -> Self {
        Self {
            mode: self.mode,
            dagger: !self.dagger,
        }
    }
}

/// Pauli image of a single ladder operator on `n_modes` qubits.
pub fn jordan_wigner(op: FermionOperator, n_modes: usize) -> Result<PauliSum> {
    if op.mode >= n_modes {
        return Err(Error::ModeOutOfRange {
            mode: op.mode,
            n_modes,
        });
    }
    let mut ops = vec![Pauli::I; n_modes];
    for p in ops.iter_mut().take(op.mode) {
        *p = Pauli::Z;
    }
    ops[op.mode] = Pauli::X;
    let x_term = PauliTerm::new(&ops, Complex64::new(0.5, 0.0))?;
    ops[op.mode] = Pauli::Y;
    let y_coeff = if op.dagger {
        Complex64::new(0.0, -0.5)
    } else {
        Complex64::new(0.0, 0.5)
    };
    let y_term = PauliTerm::new(&ops, y_coeff)?;
    PauliSum::from_terms(n_modes, vec![x_term, y_term])
}

/// Pauli image of an ordered product `ops[0] ops[1] ... ops[k-1]`.
pub fn ladder_product(ops: &[FermionOperator], n_modes: usize) -> Result<PauliSum> {
    let mut acc = PauliSum::identity(n_modes);
    for &op in ops {
        acc = acc.mul(&jordan_wigner(op, n_modes)?)?;
    }
    Ok(acc.simplify(SIMPLIFY_TOL))
}

/// `c^dagger_p c_q` as a Pauli sum.
pub fn hopping(p: usize, q: usize, n_modes: usize) -> Result<PauliSum> {
    ladder_product(
        &[FermionOperator::create(p), FermionOperator::annihilate(q)],
        n_modes,
    )
}

/// Occupation `n_p = c^dagger_p c_p = (I - Z_p) / 2`.
pub fn occupation(p: usize, n_modes: usize) -> Result<PauliSum> {
    if p >= n_modes {
        return Err(Error::ModeOutOfRange { mode: p, n_modes });
    }
    let half = Complex64::new(0.5, 0.0);
    let z = PauliTerm {
        string: PauliString::single(n_modes, p, Pauli::Z)?,
        coeff: -half,
    };
    PauliSum::from_terms(n_modes, vec![PauliTerm::identity(n_modes, half), z])
}

#[cfg(test)]
mod tests {
    use super::*;
    use Pauli::*;

    #[test]
    fn single_mode_annihilator() {
        let c = jordan_wigner(FermionOperator::annihilate(0), 1).unwrap();
        let t = c.terms();
        assert_eq!(t[0].ops(), vec![X]);
        assert_eq!(t[0].coeff, Complex64::new(0.5, 0.0));
        assert_eq!(t[1].ops(), vec![Y]);
        assert_eq!(t[1].coeff, Complex64::new(0.0, 0.5));
    }

    #[test]
    fn creation_on_second_mode_carries_z_string() {
        let c = jordan_wigner(FermionOperator::create(1), 2)
            .unwrap()
            .simplify(0.0);
        let t = c.terms();
        assert_eq!(t[0].ops(), vec![Z, X]);
        assert_eq!(t[0].coeff, Complex64::new(0.5, 0.0));
        assert_eq!(t[1].ops(), vec![Z, Y]);
        assert_eq!(t[1].coeff, Complex64::new(0.0, -0.5));
    }

    #[test]
    fn mode_out_of_range() {
        assert!(matches!(
            jordan_wigner(FermionOperator::create(3), 3),
            Err(Error::ModeOutOfRange {
                mode: 3,
                n_modes: 3
            })
        ));
    }

    #[test]
    fn occupation_equals_hopping_diagonal() {
        let a = occupation(2, 4).unwrap().simplify(0.0);
        let b = hopping(2, 2, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mode_layout_is_spin_blocked() {
        assert_eq!(ModeIndex::new(0, Spin::Up).flat(4), 0);
        assert_eq!(ModeIndex::new(3, Spin::Up).flat(4), 3);
        assert_eq!(ModeIndex::new(0, Spin::Down).flat(4), 4);
        assert_eq!(ModeIndex::new(2, Spin::Down).flat(4), 6);
    }
}
