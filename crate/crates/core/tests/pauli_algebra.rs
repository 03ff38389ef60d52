mod common;

use common::{aim_matrix, annihilator, c, string_matrix, sum_matrix, to_complex};
use kvqa::aim::{dense_hamiltonian, random_aim, random_aim_with_bath, AimModel};
use kvqa::pauli::{
    fermion_hamiltonian_to_pauli, jordan_wigner, number_operator, pauli_mul, sz_operator,
    FermionOperator, Pauli, PauliSum, PauliTerm, SIMPLIFY_TOL,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn max_diff(a: &nalgebra::DMatrix<Complex64>, b: &nalgebra::DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn pauli_strategy(n: usize) -> impl Strategy<Value = Vec<Pauli>> {
    proptest::collection::vec(
        prop_oneof![
            Just(Pauli::I),
            Just(Pauli::X),
            Just(Pauli::Y),
            Just(Pauli::Z)
        ],
        n,
    )
}

fn pauli_sum_strategy(n: usize) -> impl Strategy<Value = PauliSum> {
    proptest::collection::vec((pauli_strategy(n), -2.0..2.0f64, -2.0..2.0f64), 1..6).prop_map(
        move |terms| {
            let terms = terms
                .into_iter()
                .map(|(ops, re, im)| PauliTerm::new(&ops, c(re, im)).unwrap())
                .collect();
            PauliSum::from_terms(n, terms).unwrap()
        },
    )
}

#[test]
fn every_single_qubit_product_matches_the_matrices() {
    for a in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
        for b in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            let (phase, p) = a.mul(b);
            let lhs = common::pauli_matrix(a) * common::pauli_matrix(b);
            let rhs = common::pauli_matrix(p) * phase;
            assert!(max_diff(&lhs, &rhs) < 1e-15, "{a}{b}");
        }
    }
}

proptest! {
    #[test]
    fn string_products_match_dense_products(a in pauli_strategy(4), b in pauli_strategy(4), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let ta = PauliTerm::new(&a, c(re, im)).unwrap();
        let tb = PauliTerm::real(&b, 0.7).unwrap();
        let t = pauli_mul(&ta, &tb).unwrap();
        let dense = string_matrix(&a) * c(re, im) * string_matrix(&b) * c(0.7, 0.0);
        prop_assert!(max_diff(&(string_matrix(&t.ops()) * t.coeff), &dense) < 1e-12);
    }

    #[test]
    fn sum_product_and_dagger_match_dense(a in pauli_sum_strategy(3), b in pauli_sum_strategy(3)) {
        let prod = a.mul(&b).unwrap();
        prop_assert!(max_diff(&sum_matrix(&prod), &(sum_matrix(&a) * sum_matrix(&b))) < 1e-11);
        prop_assert!(max_diff(&sum_matrix(&a.dagger()), &sum_matrix(&a).adjoint()) < 1e-12);
    }

    #[test]
    fn simplify_preserves_the_operator(a in pauli_sum_strategy(3), b in pauli_sum_strategy(3)) {
        let mut terms = a.terms().to_vec();
        terms.extend_from_slice(b.terms());
        terms.extend_from_slice(a.terms());
        let raw = PauliSum::from_terms(3, terms).unwrap();
        let s = raw.simplify(0.0);
        prop_assert!(max_diff(&sum_matrix(&s), &sum_matrix(&raw)) < 1e-12);
        let strings: Vec<_> = s.terms().iter().map(|t| t.string).collect();
        prop_assert!(strings.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn commutation_flag_matches_dense_commutator(a in pauli_strategy(3), b in pauli_strategy(3)) {
        let (sa, sb) = (string_matrix(&a), string_matrix(&b));
        let commutes = max_diff(&(&sa * &sb), &(&sb * &sa)) < 1e-12;
        let pa = kvqa::pauli::PauliString::from_ops(&a).unwrap();
        let pb = kvqa::pauli::PauliString::from_ops(&b).unwrap();
        prop_assert_eq!(pa.commutes_with(&pb), commutes);
    }
}

#[test]
fn jordan_wigner_images_satisfy_canonical_anticommutation() {
    let n = 4;
    let ops: Vec<_> = (0..n)
        .map(|p| {
            let a = sum_matrix(&jordan_wigner(FermionOperator::annihilate(p), n).unwrap());
            let ad = sum_matrix(&jordan_wigner(FermionOperator::create(p), n).unwrap());
            (a, ad)
        })
        .collect();
    let id = nalgebra::DMatrix::<Complex64>::identity(1 << n, 1 << n);
    let zero = nalgebra::DMatrix::<Complex64>::zeros(1 << n, 1 << n);
    for p in 0..n {
        assert!(max_diff(&ops[p].1, &ops[p].0.adjoint()) < 1e-15);
        for q in 0..n {
            let acomm = &ops[p].0 * &ops[q].1 + &ops[q].1 * &ops[p].0;
            let expected = if p == q { &id } else { &zero };
            assert!(max_diff(&acomm, expected) < 1e-14, "{{c_{p}, c+_{q}}}");
            let aa = &ops[p].0 * &ops[q].0 + &ops[q].0 * &ops[p].0;
            assert!(max_diff(&aa, &zero) < 1e-14);
        }
    }
}

#[test]
fn jordan_wigner_matches_the_explicit_ladder_matrices() {
    let n = 5;
    for p in 0..n {
        let jw = sum_matrix(&jordan_wigner(FermionOperator::annihilate(p), n).unwrap());
        assert!(max_diff(&jw, &to_complex(&annihilator(p, n))) < 1e-15);
    }
}

#[test]
fn qubit_hamiltonian_matches_term_by_term_construction() {
    for n_bath in 0..=3 {
        for seed in 0..4 {
            let model = random_aim_with_bath(seed * 10 + n_bath as u64, n_bath);
            let h = fermion_hamiltonian_to_pauli(&model).unwrap();
            assert!(h.is_hermitian(1e-14));
            let reference = to_complex(&aim_matrix(&model));
            let d = max_diff(&sum_matrix(&h), &reference);
            assert!(d < 1e-11, "n_bath {n_bath} seed {seed}: {d:e}");
            // The crate's occupation-number builder is a second, independent path.
            let fock = to_complex(&dense_hamiltonian(&model).unwrap());
            assert!(max_diff(&fock, &reference) < 1e-11);
        }
    }
}

#[test]
fn two_site_hamiltonian_by_hand() {
    let model = AimModel::single_orbital(-2.0, 4.0, vec![1.0], vec![vec![0.0]]).unwrap();
    let h = sum_matrix(&fermion_hamiltonian_to_pauli(&model).unwrap());
    // Modes: 0 imp up, 1 bath up, 2 imp down, 3 bath down.
    let doubly_occupied_impurity = 0b0101;
    assert!(
        (h[(doubly_occupied_impurity, doubly_occupied_impurity)] - c(-2.0 - 2.0 + 4.0, 0.0)).norm()
            < 1e-14
    );
    let single_up = 0b0001;
    assert!((h[(single_up, single_up)] - c(-2.0, 0.0)).norm() < 1e-14);
    // f+_up c_up moves the electron from mode 0 to mode 1 with sign +1.
    assert!((h[(0b0010, single_up)] - c(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn particle_number_and_spin_are_conserved() {
    let model = random_aim(5);
    let h = sum_matrix(&fermion_hamiltonian_to_pauli(&model).unwrap());
    let n = sum_matrix(&number_operator(model.n_qubits()).unwrap());
    let sz = sum_matrix(&sz_operator(model.n_sites()).unwrap());
    assert!(max_diff(&(&h * &n), &(&n * &h)) < 1e-10);
    assert!(max_diff(&(&h * &sz), &(&sz * &h)) < 1e-10);
}

#[test]
fn add_simplifies_cancelling_terms() {
    let a = jordan_wigner(FermionOperator::create(1), 3).unwrap();
    let sum = a.add(&a.scale(c(-1.0, 0.0))).unwrap();
    assert!(sum.simplify(SIMPLIFY_TOL).is_empty());
}
