use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::branch::BranchSolver;
use crate::emulator::SparseOperator;
use crate::error::{Error, Result};
use crate::greens::{
    assemble_gf, BranchKind, EnergyGrid, GfBranch, GreensFunction, OrbitalLabel, BRANCH_WEIGHT_TOL,
};
use crate::pauli::{jordan_wigner, FermionOperator};
use crate::rng::child_seed;

/// An (approximate) eigenstate with real amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub energy: f64,
    pub state: Vec<f64>,
    /// Circuit parameters that prepared it, when known.
    #[serde(default)]
    pub params: Option<Vec<f64>>,
}

/// What happened on one branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub state: usize,
    pub kind: BranchKind,
    pub weight: f64,
    pub fidelity: f64,
    pub depth: usize,
    pub all_converged: bool,
}

#[derive(Debug, Clone)]
pub struct AssembledGf {
    pub gf: GreensFunction,
    /// `(state probability, branch)` pairs.
    pub branches: Vec<(f64, GfBranch)>,
    pub reports: Vec<BranchReport>,
}

/// `c^dagger` and `c` of one mode, compiled, plus `c c^dagger` and
/// `c^dagger c` for the branch weights.
struct LadderOps {
    create: SparseOperator,
    annihilate: SparseOperator,
    particle_weight: SparseOperator,
    hole_weight: SparseOperator,
}

impl LadderOps {
    fn new(mode: usize, n_modes: usize) -> Result<Self> {
        let cd = jordan_wigner(FermionOperator::create(mode), n_modes)?;
        let c = jordan_wigner(FermionOperator::annihilate(mode), n_modes)?;
        let tol = crate::pauli::SIMPLIFY_TOL;
        Ok(Self {
            create: SparseOperator::from_pauli_sum(&cd)?,
            annihilate: SparseOperator::from_pauli_sum(&c)?,
            particle_weight: SparseOperator::from_pauli_sum(&c.mul(&cd)?.simplify(tol))?,
            hole_weight: SparseOperator::from_pauli_sum(&cd.mul(&c)?.simplify(tol))?,
        })
    }

    /// Branch weight and normalized start vector, or `None` below tolerance.
    fn start_vector(&self, kind: BranchKind, psi: &[f64]) -> Option<(f64, Vec<f64>)> {
        let (weight_op, ladder) = match kind {
            BranchKind::Particle => (&self.particle_weight, &self.create),
            BranchKind::Hole => (&self.hole_weight, &self.annihilate),
        };
        let weight = weight_op.quadratic_form_real(psi);
        if weight <= BRANCH_WEIGHT_TOL {
            return None;
        }
        let mut phi = ladder.apply_real(psi);
        let norm = phi.iter().map(|x| x * x).sum::<f64>().sqrt();
        phi.iter_mut().for_each(|x| *x /= norm);
        Some((weight, phi))
    }
}

/// `G = sum_k p_k [w+_k g+_k(z + E_k) - w-_k g-_k(E_k - z)]` over the given
/// `(p_k, state)` pairs.
pub fn assemble_weighted(
    states: &[(f64, &ThermalState)],
    mode: usize,
    label: OrbitalLabel,
    grid: &EnergyGrid,
    solver: &dyn BranchSolver,
    seed: u64,
) -> Result<AssembledGf> {
    let Some((_, first)) = states.first() else {
        return Err(Error::InvalidArgument("no states to assemble from".into()));
    };
    let dim = first.state.len();
    if !dim.is_power_of_two() || states.iter().any(|(_, s)| s.state.len() != dim) {
        return Err(Error::InvalidArgument(
            "states must share one register size".into(),
        ));
    }
    let n_modes = dim.trailing_zeros() as usize;
    let ops = LadderOps::new(mode, n_modes)?;

    let jobs: Vec<(usize, BranchKind)> = (0..states.len())
        .flat_map(|k| [(k, BranchKind::Particle), (k, BranchKind::Hole)])
        .collect();
    let solved: Vec<Option<(f64, GfBranch, BranchReport)>> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(k, kind))| {
            let (p, s) = states[k];
            let Some((weight, phi)) = ops.start_vector(kind, &s.state) else {
                return Ok(None);
            };
            let out = solver.solve(&phi, s.params.as_deref(), child_seed(seed, j as u64))?;
            let report = BranchReport {
                state: k,
                kind,
                weight,
                fidelity: out.fidelity,
                depth: out.coeffs.depth(),
                all_converged: out.coeffs.residuals.iter().all(|r| r.converged),
            };
            Ok(Some((
                p,
                GfBranch {
                    kind,
                    weight,
                    e_ref: s.energy,
                    coeffs: out.coeffs,
                },
                report,
            )))
        })
        .collect::<Result<_>>()?;

    let mut branches = Vec::new();
    let mut reports = Vec::new();
    for (p, b, r) in solved.into_iter().flatten() {
        branches.push((p, b));
        reports.push(r);
    }
    if branches.is_empty() {
        log::warn!("both branch weights vanish for mode {mode}; returning a zero Green's function");
    }
    let gf = assemble_gf(&branches, grid, label)?;
    Ok(AssembledGf {
        gf,
        branches,
        reports,
    })
}

/// Zero-temperature Green's function, averaged with equal weights over the
/// supplied (degenerate) ground states.
pub fn assemble_zero_t_gf(
    ground: &[ThermalState],
    mode: usize,
    label: OrbitalLabel,
    grid: &EnergyGrid,
    solver: &dyn BranchSolver,
    seed: u64,
) -> Result<AssembledGf> {
    let p = 1.0 / ground.len().max(1) as f64;
    let states: Vec<(f64, &ThermalState)> = ground.iter().map(|s| (p, s)).collect();
    assemble_weighted(&states, mode, label, grid, solver, seed)
}

/// Boltzmann probabilities `exp(-beta (E_k - E_0)) / Z` over the supplied
/// states, with `Z` summed over all of them.
pub fn boltzmann_weights(energies: &[f64], beta: f64) -> Result<Vec<f64>> {
    if !(beta > 0.0) {
        return Err(Error::InvalidArgument("beta must be positive".into()));
    }
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = energies.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / z).collect())
}

/// Finite-temperature Green's function. A state contributes when its
/// Boltzmann probability exceeds `omega_b`; the lowest state always does.
/// Probabilities are renormalized over the contributing states, so
/// `omega_b >= 1` reproduces the ground-state result.
#[allow(clippy::too_many_arguments)]
pub fn assemble_finite_t_gf(
    states: &[ThermalState],
    beta: f64,
    omega_b: f64,
    mode: usize,
    label: OrbitalLabel,
    grid: &EnergyGrid,
    solver: &dyn BranchSolver,
    seed: u64,
) -> Result<AssembledGf> {
    if states.is_empty() {
        return Err(Error::InvalidArgument("no eigenstates supplied".into()));
    }
    let energies: Vec<f64> = states.iter().map(|s| s.energy).collect();
    let probs = boltzmann_weights(&energies, beta)?;
    let top = probs.iter().cloned().fold(0.0, f64::max);
    let kept: Vec<(f64, &ThermalState)> = probs
        .iter()
        .zip(states)
        .filter(|(p, _)| **p > omega_b || **p == top)
        .map(|(p, s)| (*p, s))
        .collect();
    let z: f64 = kept.iter().map(|(p, _)| p).sum();
    let kept: Vec<(f64, &ThermalState)> = kept.into_iter().map(|(p, s)| (p / z, s)).collect();
    assemble_weighted(&kept, mode, label, grid, solver, seed)
}
