mod common;

use std::sync::Arc;

use common::{aim_matrix, eigh, sum_matrix};
use kvqa::aim::AimModel;
use kvqa::ansatz::{
    build_hea, parameter_shift_gradient, prepare_state, vqe_excited_states, vqe_ground_state,
    GradientMethod, Objective, QuadraticForm, StatePreparation, VqeOptions,
};
use kvqa::emulator::{expectation, SparseOperator};
use kvqa::pauli::{fermion_hamiltonian_to_pauli, Pauli, PauliSum, PauliTerm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random Pauli sum with an even number of Y factors per string, so its
/// matrix is real symmetric.
fn random_real_hamiltonian(rng: &mut ChaCha8Rng, n: usize, n_terms: usize) -> PauliSum {
    let mut terms = Vec::new();
    while terms.len() < n_terms {
        let ops: Vec<Pauli> = (0..n)
            .map(|_| [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..4)])
            .collect();
        if ops.iter().filter(|p| **p == Pauli::Y).count() % 2 == 0 {
            terms.push(PauliTerm::real(&ops, rng.gen_range(-1.0..1.0)).unwrap());
        }
    }
    PauliSum::from_terms(n, terms).unwrap().simplify(0.0)
}

#[test]
fn shift_rule_and_adjoint_gradients_match_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..30 {
        let n = rng.gen_range(1..=4);
        let layers = rng.gen_range(0..=3);
        let circuit = build_hea(n, layers);
        let h = random_real_hamiltonian(&mut rng, n, 6);
        let params: Vec<f64> = (0..circuit.parameter_count())
            .map(|_| rng.gen_range(-3.0..3.0))
            .collect();
        // Energies through the gate-level circuit, independent of the fast
        // real-amplitude path used by the optimizer.
        let energy = |p: &[f64]| expectation(&prepare_state(&circuit, p).unwrap(), &h).unwrap();
        let shift = parameter_shift_gradient(energy, &params);
        let step = 1e-5;
        let mut x = params.clone();
        for k in 0..params.len() {
            x[k] = params[k] + step;
            let up = energy(&x);
            x[k] = params[k] - step;
            let down = energy(&x);
            x[k] = params[k];
            let fd = (up - down) / (2.0 * step);
            assert!(
                (shift[k] - fd).abs() < 1e-6,
                "param {k}: {} vs {fd}",
                shift[k]
            );
        }
        let op = Arc::new(SparseOperator::from_pauli_sum(&h).unwrap());
        let obj = Objective::linear(vec![QuadraticForm::Operator(op)], vec![1.0]);
        let (_, adjoint) = obj
            .value_and_gradient(&circuit, &params, GradientMethod::Adjoint)
            .unwrap();
        let (_, shifted) = obj
            .value_and_gradient(&circuit, &params, GradientMethod::ParameterShift)
            .unwrap();
        for k in 0..params.len() {
            assert!((adjoint[k] - shift[k]).abs() < 1e-10);
            assert!((shifted[k] - shift[k]).abs() < 1e-10);
        }
    }
}

#[test]
fn real_amplitude_path_matches_gate_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let circuit = build_hea(5, 3);
    let params: Vec<f64> = (0..circuit.parameter_count())
        .map(|_| rng.gen_range(-3.0..3.0))
        .collect();
    let fast = circuit.prepare_real(&params);
    let gates = prepare_state(&circuit, &params).unwrap();
    for (a, b) in fast.iter().zip(gates.amplitudes()) {
        assert!((a - b.re).abs() < 1e-14 && b.im.abs() < 1e-14);
    }
}

#[test]
fn parameter_count_is_checked() {
    let circuit = build_hea(3, 2);
    assert_eq!(circuit.parameter_count(), 9);
    assert!(prepare_state(&circuit, &[0.0; 8]).is_err());
}

#[test]
fn vqe_reaches_the_two_site_ground_state() {
    let model = AimModel::single_orbital(-2.0, 4.0, vec![1.0], vec![vec![0.0]]).unwrap();
    let h = fermion_hamiltonian_to_pauli(&model).unwrap();
    let exact = eigh(&aim_matrix(&model)).0.min();
    let r = vqe_ground_state(
        &h,
        &build_hea(4, 4),
        &VqeOptions {
            restarts: 8,
            ..VqeOptions::default()
        },
    )
    .unwrap();
    assert!(r.energy >= exact - 1e-10);
    assert!(
        r.energy - exact <= 1e-6,
        "VQE {} vs exact {exact}",
        r.energy
    );
}

#[test]
fn penalized_vqe_finds_the_lowest_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let h = random_real_hamiltonian(&mut rng, 2, 5);
    let mut levels: Vec<f64> = eigh(&sum_matrix(&h).map(|x| x.re))
        .0
        .iter()
        .copied()
        .collect();
    levels.sort_by(f64::total_cmp);
    let found = vqe_excited_states(
        &h,
        &build_hea(2, 3),
        3,
        &VqeOptions {
            restarts: 8,
            ..VqeOptions::default()
        },
    )
    .unwrap();
    for (r, e) in found.iter().zip(&levels) {
        assert!((r.energy - e).abs() < 1e-6, "{} vs {e}", r.energy);
    }
}
