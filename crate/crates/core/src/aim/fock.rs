//! Occupation-number basis built directly from the anticommutation rules.
//!
//! Basis state `b` has mode `p` occupied when bit `p` is set; operators are
//! normal-ordered by mode index, so `c_p` picks up the sign
//! `(-1)^(number of occupied modes below p)`.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{AimModel, FermionTerms};
use crate::error::{Error, Result};
use crate::pauli::FermionOperator;

/// Largest register the dense oracle accepts.
pub const MAX_ORACLE_QUBITS: usize = 14;

/// `op |b>` as `(sign, b')`, or `None` when it annihilates the state.
#[inline]
pub fn apply_ladder(op: FermionOperator, b: usize) -> Option<(f64, usize)> {
    let bit = 1usize << op.mode;
    let occupied = b & bit != 0;
    if occupied == op.dagger {
        return None;
    }
    let sign = if (b & (bit - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    Some((sign, b ^ bit))
}

/// Applies a product `ops[0] ops[1] ... ` (rightmost first) to `|b>`.
pub fn apply_product(ops: &[FermionOperator], b: usize) -> Option<(f64, usize)> {
    let mut sign = 1.0;
    let mut state = b;
    for &op in ops.iter().rev() {
        let (s, next) = apply_ladder(op, state)?;
        sign *= s;
        state = next;
    }
    Some((sign, state))
}

/// `op |v>` for a full Fock-space vector.
pub fn apply_ladder_to_vector(op: FermionOperator, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for (b, &x) in v.iter().enumerate() {
        if x != 0.0 {
            if let Some((s, b2)) = apply_ladder(op, b) {
                out[b2] += s * x;
            }
        }
    }
    out
}

/// Occupation numbers `(n_up, n_down)` of a basis state.
pub fn sector_of(b: usize, n_sites: usize) -> (usize, usize) {
    let up_mask = (1usize << n_sites) - 1;
    (
        (b & up_mask).count_ones() as usize,
        (b >> n_sites).count_ones() as usize,
    )
}

/// All basis states with `n_up` up and `n_down` down electrons, ascending.
pub fn sector_basis(n_sites: usize, n_up: usize, n_down: usize) -> Vec<usize> {
    (0..1usize << (2 * n_sites))
        .filter(|&b| sector_of(b, n_sites) == (n_up, n_down))
        .collect()
}

/// Every `(n_up, n_down)` pair for `n_sites` sites.
pub fn all_sectors(n_sites: usize) -> Vec<(usize, usize)> {
    (0..=n_sites)
        .flat_map(|u| (0..=n_sites).map(move |d| (u, d)))
        .collect()
}

fn check_size(model: &AimModel) -> Result<()> {
    model.validate()?;
    if model.n_qubits() > MAX_ORACLE_QUBITS {
        return Err(Error::TooLarge {
            n_qubits: model.n_qubits(),
            limit: MAX_ORACLE_QUBITS,
        });
    }
    Ok(())
}

/// Matrix elements `<b'|H|b>` of the model Hamiltonian for one ket.
fn hamiltonian_column(terms: &FermionTerms, b: usize) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = Vec::new();
    for &(p, q, c) in &terms.one_body {
        if let Some((s, b2)) = apply_product(
            &[FermionOperator::create(p), FermionOperator::annihilate(q)],
            b,
        ) {
            out.push((b2, s * c));
        }
    }
    for &([p, q, r, s], c) in &terms.two_body {
        let ops = [
            FermionOperator::create(p),
            FermionOperator::create(q),
            FermionOperator::annihilate(r),
            FermionOperator::annihilate(s),
        ];
        if let Some((sg, b2)) = apply_product(&ops, b) {
            out.push((b2, sg * c));
        }
    }
    out
}

/// Dense Hamiltonian on the full `2^(2 N_s)` Fock space.
pub fn dense_hamiltonian(model: &AimModel) -> Result<DMatrix<f64>> {
    check_size(model)?;
    let dim = 1usize << model.n_qubits();
    let terms = model.fermion_terms();
    let mut h = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        for (b2, v) in hamiltonian_column(&terms, b) {
            h[(b2, b)] += v;
        }
    }
    Ok(h)
}

/// Hamiltonian block of one `(n_up, n_down)` sector.
#[derive(Debug, Clone)]
pub struct SectorHamiltonian {
    pub n_up: usize,
    pub n_down: usize,
    pub basis: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

pub fn sector_hamiltonian(
    model: &AimModel,
    n_up: usize,
    n_down: usize,
) -> Result<SectorHamiltonian> {
    check_size(model)?;
    let ns = model.n_sites();
    if n_up > ns || n_down > ns {
        return Err(Error::InvalidArgument(format!(
            "sector ({n_up}, {n_down}) does not fit {ns} sites"
        )));
    }
    let basis = sector_basis(ns, n_up, n_down);
    let index: HashMap<usize, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let terms = model.fermion_terms();
    let mut matrix = DMatrix::zeros(basis.len(), basis.len());
    for (j, &b) in basis.iter().enumerate() {
        for (b2, v) in hamiltonian_column(&terms, b) {
            let i = index[&b2];
            matrix[(i, j)] += v;
        }
    }
    Ok(SectorHamiltonian {
        n_up,
        n_down,
        basis,
        matrix,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_signs_count_lower_occupied_modes() {
        // |b> = modes 0 and 2 occupied.
        assert_eq!(
            apply_ladder(FermionOperator::annihilate(2), 0b101),
            Some((-1.0, 0b001))
        );
        assert_eq!(
            apply_ladder(FermionOperator::annihilate(0), 0b101),
            Some((1.0, 0b100))
        );
        assert_eq!(
            apply_ladder(FermionOperator::create(1), 0b101),
            Some((-1.0, 0b111))
        );
        assert_eq!(apply_ladder(FermionOperator::create(0), 0b101), None);
    }

    #[test]
    fn sector_sizes_are_binomial_products() {
        assert_eq!(sector_basis(4, 2, 2).len(), 36);
        assert_eq!(sector_basis(4, 3, 2).len(), 24);
        assert_eq!(
            all_sectors(4)
                .iter()
                .map(|&(u, d)| sector_basis(4, u, d).len())
                .sum::<usize>(),
            256
        );
    }

    #[test]
    fn atomic_limit_spectrum() {
        let m = AimModel::single_orbital(0.0, 4.0, vec![], vec![]).unwrap();
        let h = dense_hamiltonian(&m).unwrap();
        let (e, _) = crate::linalg::symmetric_eigen(&h).unwrap();
        assert_eq!(e.as_slice(), &[0.0, 0.0, 0.0, 4.0]);
    }
}
