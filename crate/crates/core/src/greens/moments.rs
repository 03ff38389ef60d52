use std::sync::Arc;

use log::warn;
use serde::{Deserialize, Serialize};

use super::continued::{moments_from_tridiagonal, LanczosCoefficients};
use crate::ansatz::{minimize_objective, Objective, QuadraticForm, StatePreparation, VqeOptions};
use crate::emulator::SparseOperator;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::rng::child_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentOrigin {
    IterativeQuantum,
    Tridiagonal,
    Direct,
}

/// `mu[n] = <phi|H^n|phi>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub mu: Vec<f64>,
    pub origin: MomentOrigin,
    /// Per-order flag: the auxiliary state behind this moment was prepared
    /// below the fidelity threshold.
    #[serde(default)]
    pub flagged: Vec<bool>,
}

impl MomentSequence {
    fn unflagged(mu: Vec<f64>, origin: MomentOrigin) -> Self {
        let flagged = vec![false; mu.len()];
        Self {
            mu,
            origin,
            flagged,
        }
    }

    /// `|mu_n / reference_n - 1|` per order (absolute difference where the
    /// reference vanishes).
    pub fn relative_errors(&self, reference: &MomentSequence) -> Vec<f64> {
        self.mu
            .iter()
            .zip(&reference.mu)
            .map(|(a, b)| {
                if *b == 0.0 {
                    (a - b).abs()
                } else {
                    ((a - b) / b).abs()
                }
            })
            .collect()
    }
}

/// Moments by repeated application of `H` to the statevector.
pub fn direct_moments(h: &SparseOperator, phi: &[f64], max_order: usize) -> MomentSequence {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut mu = vec![dot(phi, phi)];
    let mut v = phi.to_vec();
    // mu_{2k} = |H^k phi|^2 and mu_{2k+1} = <H^k phi|H|H^k phi>.
    while mu.len() <= max_order {
        let hv = h.apply_real(&v);
        mu.push(dot(&v, &hv));
        if mu.len() <= max_order {
            mu.push(dot(&hv, &hv));
        }
        v = hv;
    }
    MomentSequence::unflagged(mu, MomentOrigin::Direct)
}

/// Moments `0..=max_order` of the tridiagonal matrix of a Lanczos run.
pub fn tridiagonal_moments(coeffs: &LanczosCoefficients, max_order: usize) -> MomentSequence {
    let mu = (0..=max_order)
        .map(|n| moments_from_tridiagonal(coeffs, n))
        .collect();
    MomentSequence::unflagged(mu, MomentOrigin::Tridiagonal)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MomentOptions {
    pub fit: VqeOptions,
    /// Auxiliary states prepared below this fidelity flag their moments.
    pub min_fidelity: f64,
    /// `<H^2>` of an auxiliary state at or below this ends the sequence
    /// with zeros.
    pub tol_mu2: f64,
}

impl Default for MomentOptions {
    fn default() -> Self {
        Self {
            fit: VqeOptions {
                restarts: 8,
                ..VqeOptions::default()
            },
            min_fidelity: 0.999,
            tol_mu2: 1e-12,
        }
    }
}

/// Moments of `U(phi_params)|0>` from normalized auxiliary states
/// `Phi_{2(n+1)} ~ H Phi_{2n}`, each prepared variationally:
/// `mu_{2n+1} = mu_{2n} <Phi_{2n}|H|Phi_{2n}>`,
/// `mu_{2n+2} = mu_{2n} <Phi_{2n}|H^2|Phi_{2n}>`.
pub fn compute_moments_iterative(
    prep: &dyn StatePreparation,
    phi_params: &[f64],
    h: &PauliSum,
    max_order: usize,
    opts: &MomentOptions,
) -> Result<MomentSequence> {
    if max_order == 0 {
        return Err(Error::InvalidArgument(
            "max_order must be at least 1".into(),
        ));
    }
    if phi_params.len() != prep.parameter_count() {
        return Err(Error::DimensionMismatch {
            expected: prep.parameter_count(),
            found: phi_params.len(),
        });
    }
    let h_op = SparseOperator::from_pauli_sum(h)?;
    let h2_op = SparseOperator::from_pauli_sum(&h.mul(h)?.simplify(0.0))?;
    if !h_op.is_real() {
        return Err(Error::InvalidArgument(
            "the real-amplitude ansatz needs a real Hamiltonian matrix".into(),
        ));
    }

    let mut mu = vec![1.0];
    let mut flagged = vec![false];
    let mut params = phi_params.to_vec();
    let mut state = prep.prepare_real(&params);
    let mut state_flag = false;
    let mut step = 0u64;
    while mu.len() <= max_order {
        let base = *mu.last().expect("mu_0");
        let e1 = h_op.quadratic_form_real(&state);
        let e2 = h2_op.quadratic_form_real(&state);
        if e2 <= opts.tol_mu2 {
            mu.resize(max_order + 1, 0.0);
            flagged.resize(max_order + 1, state_flag);
            break;
        }
        mu.push(base * e1);
        flagged.push(state_flag);
        if mu.len() > max_order {
            break;
        }
        mu.push(base * e2);
        flagged.push(state_flag);
        if mu.len() > max_order {
            break;
        }
        // Next auxiliary state: the normalized H |Phi_{2n}>.
        let mut target = h_op.apply_real(&state);
        let norm = e2.sqrt();
        target.iter_mut().for_each(|x| *x /= norm);
        let objective = Objective::linear(
            vec![QuadraticForm::RealProjector(Arc::new(target))],
            vec![-1.0],
        );
        let fit_opts = VqeOptions {
            seed: child_seed(opts.fit.seed, step),
            ..opts.fit.clone()
        };
        let r = minimize_objective(&objective, prep, &fit_opts, Some(&params))?;
        let fidelity = -r.energy;
        if fidelity < opts.min_fidelity {
            warn!(
                "auxiliary state {} prepared with fidelity {fidelity:.6}",
                2 * (step + 1)
            );
            state_flag = true;
        }
        params = r.params;
        state = prep.prepare_real(&params);
        step += 1;
    }
    Ok(MomentSequence {
        mu,
        origin: MomentOrigin::IterativeQuantum,
        flagged,
    })
}
