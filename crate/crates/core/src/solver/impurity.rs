use serde::{Deserialize, Serialize};

use super::assemble::{
    assemble_finite_t_gf, assemble_zero_t_gf, AssembledGf, BranchReport, ThermalState,
};
use super::branch::{ClassicalBranchSolver, KvqaBranchSolver};
use crate::aim::{exact_diagonalize, exact_gf, AimModel, Temperature, DEGENERACY_TOL};
use crate::ansatz::{
    build_hea, vqe_excited_states, vqe_ground_state, StatePreparation, VqeOptions,
};
use crate::error::{Error, Result};
use crate::greens::{assemble_gf, EnergyGrid, GreensFunction, OrbitalLabel};
use crate::kvqa::{sector_of_state, KvqaOptions};
use crate::pauli::{fermion_hamiltonian_to_pauli, Spin};
use crate::rng::child_seed;

/// Settings of the variational (emulated quantum) solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KvqaSolverOptions {
    pub layers: usize,
    pub vqe: VqeOptions,
    /// Fit of the normalized `c^dagger|GS>` / `c|GS>` onto the circuit.
    pub fit: VqeOptions,
    pub kvqa: KvqaOptions,
    /// Number of variational eigenstates at finite temperature.
    pub thermal_states: usize,
    /// Boltzmann cutoff at finite temperature.
    pub omega_b: f64,
}

impl Default for KvqaSolverOptions {
    fn default() -> Self {
        Self {
            layers: 6,
            vqe: VqeOptions {
                restarts: 16,
                ..VqeOptions::default()
            },
            fit: VqeOptions {
                restarts: 8,
                ..VqeOptions::default()
            },
            kvqa: KvqaOptions::default(),
            thermal_states: 4,
            omega_b: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SolverBackend {
    /// Exact diagonalization with resolvent (zero T) or Lehmann (finite T)
    /// evaluation.
    Oracle,
    /// Exact eigenstates with classical Lanczos continued fractions.
    Lanczos,
    /// VQE ground state, variational start vectors and KVQA.
    Kvqa(KvqaSolverOptions),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    pub ground_energy: f64,
    /// Exact ground energy, when it was computed.
    pub exact_ground_energy: Option<f64>,
    /// Particle number and `2 S_z` of the (first) ground state.
    pub sector: (usize, i64),
    pub n_ground_states: usize,
    pub branches: Vec<BranchReport>,
}

#[derive(Debug, Clone)]
pub struct ImpuritySolution {
    pub gf: GreensFunction,
    pub diagnostics: SolveDiagnostics,
    pub assembled: Option<AssembledGf>,
}

impl ImpuritySolution {
    /// The same Green's function on another grid: the solved branches are
    /// re-evaluated, or the oracle is rerun when there are none.
    pub fn on_grid(
        &self,
        model: &AimModel,
        grid: &EnergyGrid,
        temperature: Temperature,
    ) -> Result<GreensFunction> {
        match &self.assembled {
            Some(a) => assemble_gf(&a.branches, grid, self.gf.label),
            None => exact_gf(
                model,
                grid,
                self.gf.label.orbital,
                self.gf.label.spin,
                temperature,
            ),
        }
    }
}

/// Swaps the spin-up and spin-down halves of the register. Within one
/// `(N_up, N_down)` sector this is global spin reversal up to an overall
/// sign `(-1)^(N_up N_down)`.
pub fn spin_flip(state: &[f64]) -> Vec<f64> {
    let n = state.len().trailing_zeros() as usize;
    let half = n / 2;
    let mask = (1usize << half) - 1;
    let mut out = vec![0.0; state.len()];
    for (b, &a) in state.iter().enumerate() {
        out[(b & mask) << half | b >> half] = a;
    }
    out
}

fn exact_states(
    model: &AimModel,
    temperature: Temperature,
) -> Result<(Vec<ThermalState>, f64, (usize, i64))> {
    let spec = exact_diagonalize(model)?;
    let picked = match temperature {
        Temperature::Zero => spec.ground_manifold(DEGENERACY_TOL),
        Temperature::Beta(_) => spec.states.clone(),
    };
    let states: Vec<ThermalState> = picked
        .iter()
        .map(|s| ThermalState {
            energy: s.energy,
            state: spec.full_vector(s),
            params: None,
        })
        .collect();
    let (nu, nd) = spec.sector_of(&picked[0]);
    Ok((
        states,
        spec.ground_energy(),
        (nu + nd, nu as i64 - nd as i64),
    ))
}

/// Diagonal Green's function of impurity `orbital` and `spin` on `grid`.
pub fn solve_impurity_gf(
    model: &AimModel,
    grid: &EnergyGrid,
    orbital: usize,
    spin: Spin,
    temperature: Temperature,
    backend: &SolverBackend,
    seed: u64,
) -> Result<ImpuritySolution> {
    model.validate()?;
    grid.validate()?;
    if orbital >= model.n_imp {
        return Err(Error::InvalidArgument(format!(
            "orbital {orbital} is not an impurity orbital"
        )));
    }
    let label = OrbitalLabel { orbital, spin };
    let mode = model.mode(orbital, spin.index());
    match backend {
        SolverBackend::Oracle => {
            let gf = exact_gf(model, grid, orbital, spin, temperature)?;
            let (ground, e0, sector) = exact_states(model, Temperature::Zero)?;
            let diagnostics = SolveDiagnostics {
                ground_energy: e0,
                exact_ground_energy: Some(e0),
                sector,
                n_ground_states: ground.len(),
                branches: Vec::new(),
            };
            Ok(ImpuritySolution {
                gf,
                diagnostics,
                assembled: None,
            })
        }
        SolverBackend::Lanczos => {
            let h = fermion_hamiltonian_to_pauli(model)?;
            let solver = ClassicalBranchSolver::new(&h)?;
            let (states, e0, sector) = exact_states(model, temperature)?;
            let n_ground = states
                .iter()
                .filter(|s| s.energy - e0 <= DEGENERACY_TOL)
                .count();
            let assembled = match temperature {
                Temperature::Zero => assemble_zero_t_gf(&states, mode, label, grid, &solver, seed)?,
                Temperature::Beta(beta) => {
                    assemble_finite_t_gf(&states, beta, 0.0, mode, label, grid, &solver, seed)?
                }
            };
            let diagnostics = SolveDiagnostics {
                ground_energy: e0,
                exact_ground_energy: Some(e0),
                sector,
                n_ground_states: n_ground,
                branches: assembled.reports.clone(),
            };
            Ok(ImpuritySolution {
                gf: assembled.gf.clone(),
                diagnostics,
                assembled: Some(assembled),
            })
        }
        SolverBackend::Kvqa(opts) => solve_kvqa(model, grid, mode, label, temperature, opts, seed),
    }
}

fn solve_kvqa(
    model: &AimModel,
    grid: &EnergyGrid,
    mode: usize,
    label: OrbitalLabel,
    temperature: Temperature,
    opts: &KvqaSolverOptions,
    seed: u64,
) -> Result<ImpuritySolution> {
    let h = fermion_hamiltonian_to_pauli(model)?;
    let circuit = build_hea(model.n_qubits(), opts.layers);
    let solver = KvqaBranchSolver {
        circuit: circuit.clone(),
        h: h.clone(),
        fit: opts.fit.clone(),
        kvqa: opts.kvqa.clone(),
    };
    let vqe_opts = VqeOptions {
        seed: child_seed(seed, 0),
        ..opts.vqe.clone()
    };

    let (states, assembled) = match temperature {
        Temperature::Zero => {
            let r = vqe_ground_state(&h, &circuit, &vqe_opts)?;
            if !r.energy.is_finite() {
                return Err(Error::NotConverged("VQE produced no finite energy".into()));
            }
            if !r.converged {
                log::warn!(
                    "VQE stopped before the gradient tolerance (energy {:.6})",
                    r.energy
                );
            }
            let psi = circuit.prepare_real(&r.params);
            let mut ground = vec![ThermalState {
                energy: r.energy,
                state: psi.clone(),
                params: Some(r.params),
            }];
            // An odd particle number leaves a Kramers doublet; its spin
            // partner is the spin-reversed state.
            let (n, _) = sector_of_state(&psi, circuit.n_qubits());
            if n % 2 == 1 && model.n_imp == 1 {
                ground.push(ThermalState {
                    energy: r.energy,
                    state: spin_flip(&psi),
                    params: None,
                });
            }
            let a = assemble_zero_t_gf(&ground, mode, label, grid, &solver, child_seed(seed, 1))?;
            (ground, a)
        }
        Temperature::Beta(beta) => {
            let found = vqe_excited_states(&h, &circuit, opts.thermal_states.max(1), &vqe_opts)?;
            let states: Vec<ThermalState> = found
                .into_iter()
                .map(|r| ThermalState {
                    energy: r.energy,
                    state: circuit.prepare_real(&r.params),
                    params: Some(r.params),
                })
                .collect();
            let a = assemble_finite_t_gf(
                &states,
                beta,
                opts.omega_b,
                mode,
                label,
                grid,
                &solver,
                child_seed(seed, 1),
            )?;
            (states, a)
        }
    };
    let diagnostics = SolveDiagnostics {
        ground_energy: states[0].energy,
        exact_ground_energy: None,
        sector: sector_of_state(&states[0].state, circuit.n_qubits()),
        n_ground_states: states
            .iter()
            .filter(|s| s.energy - states[0].energy <= DEGENERACY_TOL)
            .count(),
        branches: assembled.reports.clone(),
    };
    Ok(ImpuritySolution {
        gf: assembled.gf.clone(),
        diagnostics,
        assembled: Some(assembled),
    })
}
