//! Qubit Hamiltonians from fermionic models.

use std::collections::HashMap;

use num_complex::Complex64;

use super::fermion::{jordan_wigner, occupation};
use super::{FermionOperator, PauliSum, SIMPLIFY_TOL};
use crate::aim::AimModel;
use crate::error::{Error, Result};

/// Jordan-Wigner image of the impurity model, on `2 * n_sites` qubits.
pub fn fermion_hamiltonian_to_pauli(model: &AimModel) -> Result<PauliSum> {
    model.validate()?;
    let n = model.n_qubits();
    let mut cache: HashMap<FermionOperator, PauliSum> = HashMap::new();
    let mut jw = |op: FermionOperator| -> Result<PauliSum> {
        if let Some(s) = cache.get(&op) {
            return Ok(s.clone());
        }
        let s = jordan_wigner(op, n)?;
        cache.insert(op, s.clone());
        Ok(s)
    };

    let terms = model.fermion_terms();
    let mut h = PauliSum::zero(n);
    for (p, q, coeff) in terms.one_body {
        let prod = jw(FermionOperator::create(p))?.mul(&jw(FermionOperator::annihilate(q))?)?;
        h = h.add(&prod.scale(Complex64::new(coeff, 0.0)))?;
    }
    for ([p, q, r, s], coeff) in terms.two_body {
        let prod = jw(FermionOperator::create(p))?
            .mul(&jw(FermionOperator::create(q))?)?
            .mul(&jw(FermionOperator::annihilate(r))?)?
            .mul(&jw(FermionOperator::annihilate(s))?)?;
        h = h.add(&prod.scale(Complex64::new(coeff, 0.0)))?;
    }
    let h = h.simplify(SIMPLIFY_TOL);
    if !h.is_hermitian(1e-12) {
        return Err(Error::NotHermitian(
            "Pauli image has complex coefficients".into(),
        ));
    }
    Ok(h)
}

/// Total particle number on `n_modes` modes.
pub fn number_operator(n_modes: usize) -> Result<PauliSum> {
    let mut acc = PauliSum::zero(n_modes);
    for p in 0..n_modes {
        acc = acc.add(&occupation(p, n_modes)?)?;
    }
    Ok(acc)
}

/// `N_up - N_down` (twice the spin projection) for `n_sites` sites.
pub fn sz_operator(n_sites: usize) -> Result<PauliSum> {
    let n = 2 * n_sites;
    let mut acc = PauliSum::zero(n);
    for site in 0..n_sites {
        acc = acc.add(&occupation(site, n)?)?;
        acc = acc.add(&occupation(site + n_sites, n)?.scale(Complex64::new(-1.0, 0.0)))?;
    }
    Ok(acc)
}
