//! Random-model benchmarks of the variational solver against the oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aim::{exact_diagonalize, exact_gf, random_aim, AimModel, Temperature};
use crate::ansatz::{build_hea, vqe_ground_state, StatePreparation, VqeOptions};
use crate::emulator::SparseOperator;
use crate::error::{Error, Result};
use crate::greens::{
    compute_moments_iterative, direct_moments, dos, spectral_weight, tridiagonal_moments,
    EnergyGrid, MomentOptions,
};
use crate::pauli::{fermion_hamiltonian_to_pauli, Spin};
use crate::rng::child_seed;
use crate::solver::{
    solve_impurity_gf, BranchSolver, ClassicalBranchSolver, KvqaSolverOptions, SolverBackend,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchBackend {
    Kvqa,
    /// Compares the oracle with itself (or, for moments, dense Lanczos
    /// moments with dense powers); a check of the machinery.
    Oracle,
}

/// Mean and standard deviation of one column of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n_layers: usize,
    /// Frequency index or moment order.
    pub index: usize,
    pub mean: f64,
    pub std: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn aggregate(layers: &[usize], per_run: &[(usize, Vec<f64>)]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for &l in layers {
        let runs: Vec<&Vec<f64>> = per_run
            .iter()
            .filter(|(nl, _)| *nl == l)
            .map(|(_, v)| v)
            .collect();
        let Some(first) = runs.first() else { continue };
        for i in 0..first.len() {
            let col: Vec<f64> = runs.iter().map(|r| r[i]).collect();
            let (mean, std) = mean_std(&col);
            rows.push(AggregateRow {
                n_layers: l,
                index: i,
                mean,
                std,
            });
        }
    }
    rows
}

/// The `i`-th benchmark model under `seed`.
pub fn benchmark_model(seed: u64, i: usize) -> AimModel {
    random_aim(child_seed(seed, i as u64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GfBenchmarkConfig {
    pub n_models: usize,
    pub layers: Vec<usize>,
    pub seed: u64,
    pub beta: f64,
    pub n_freq: usize,
    pub backend: BenchBackend,
    /// Solver settings; `layers` is overridden per run.
    pub kvqa: KvqaSolverOptions,
    /// Grid of the sum-rule and positivity checks.
    pub real_grid: EnergyGrid,
}

impl Default for GfBenchmarkConfig {
    fn default() -> Self {
        Self {
            n_models: 20,
            layers: vec![2, 4, 6],
            seed: 0,
            beta: 50.0,
            n_freq: 100,
            backend: BenchBackend::Kvqa,
            kvqa: KvqaSolverOptions::default(),
            real_grid: EnergyGrid::default_real_axis(),
        }
    }
}

impl GfBenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_models == 0 || self.layers.is_empty() {
            return Err(Error::InvalidArgument(
                "need at least one model and one layer count".into(),
            ));
        }
        if self.layers.contains(&0) {
            return Err(Error::InvalidArgument(
                "layer counts must be positive".into(),
            ));
        }
        EnergyGrid::matsubara(self.beta, self.n_freq)?;
        self.real_grid.validate()
    }
}

/// One (model, layer count) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfRun {
    pub model: usize,
    pub n_layers: usize,
    /// `|G - G_ref| / |G_ref|` per Matsubara frequency.
    pub delta_g: Vec<f64>,
    pub ground_energy: f64,
    pub exact_ground_energy: f64,
    /// Total particle plus hole weight.
    pub spectral_weight: f64,
    /// Smallest `A(omega)` on the real grid.
    pub min_dos: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfBenchmark {
    pub runs: Vec<GfRun>,
    pub aggregate: Vec<AggregateRow>,
}

impl GfBenchmark {
    /// Largest per-frequency mean over the runs with `n_layers`.
    pub fn max_mean(&self, n_layers: usize) -> Option<f64> {
        self.aggregate
            .iter()
            .filter(|r| r.n_layers == n_layers)
            .map(|r| r.mean)
            .reduce(f64::max)
    }

    /// CSV with columns `n_layers,omega_index,mean_dG,std_dG`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n_layers,omega_index,mean_dG,std_dG\n");
        for r in &self.aggregate {
            s.push_str(&format!(
                "{},{},{:e},{:e}\n",
                r.n_layers, r.index, r.mean, r.std
            ));
        }
        s
    }

    /// CSV with one row per (model, layer count, frequency).
    pub fn runs_csv(&self) -> String {
        let mut s = String::from("model,n_layers,omega_index,dG\n");
        for r in &self.runs {
            for (i, d) in r.delta_g.iter().enumerate() {
                s.push_str(&format!("{},{},{},{:e}\n", r.model, r.n_layers, i, d));
            }
        }
        s
    }
}

fn gf_run(cfg: &GfBenchmarkConfig, model_index: usize, n_layers: usize) -> Result<GfRun> {
    let model = benchmark_model(cfg.seed, model_index);
    let grid = EnergyGrid::matsubara(cfg.beta, cfg.n_freq)?;
    let reference = exact_gf(&model, &grid, 0, Spin::Up, Temperature::Zero)?;
    let backend = match cfg.backend {
        BenchBackend::Kvqa => SolverBackend::Kvqa(KvqaSolverOptions {
            layers: n_layers,
            ..cfg.kvqa.clone()
        }),
        BenchBackend::Oracle => SolverBackend::Oracle,
    };
    let seed = child_seed(child_seed(cfg.seed, model_index as u64), n_layers as u64);
    let sol = solve_impurity_gf(
        &model,
        &grid,
        0,
        Spin::Up,
        Temperature::Zero,
        &backend,
        seed,
    )?;
    let real = sol.on_grid(&model, &cfg.real_grid, Temperature::Zero)?;
    let weight = match &sol.assembled {
        Some(a) => spectral_weight(&a.branches),
        None => 1.0,
    };
    Ok(GfRun {
        model: model_index,
        n_layers,
        delta_g: sol.gf.relative_deviations(&reference)?,
        ground_energy: sol.diagnostics.ground_energy,
        exact_ground_energy: exact_diagonalize(&model)?.ground_energy(),
        spectral_weight: weight,
        min_dos: dos(&real)?.into_iter().fold(f64::INFINITY, f64::min),
    })
}

/// Relative Green's-function error of the chosen backend over random models
/// and layer counts.
pub fn run_gf_benchmark(cfg: &GfBenchmarkConfig) -> Result<GfBenchmark> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .layers
        .iter()
        .flat_map(|&l| (0..cfg.n_models).map(move |m| (m, l)))
        .collect();
    let runs: Vec<GfRun> = jobs
        .par_iter()
        .map(|&(m, l)| gf_run(cfg, m, l))
        .collect::<Result<_>>()?;
    let per_run: Vec<(usize, Vec<f64>)> = runs
        .iter()
        .map(|r| (r.n_layers, r.delta_g.clone()))
        .collect();
    Ok(GfBenchmark {
        aggregate: aggregate(&cfg.layers, &per_run),
        runs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentsBenchmarkConfig {
    pub n_models: usize,
    pub layers: Vec<usize>,
    pub max_order: usize,
    pub seed: u64,
    pub backend: BenchBackend,
    pub vqe: VqeOptions,
    pub moments: MomentOptions,
}

impl Default for MomentsBenchmarkConfig {
    fn default() -> Self {
        Self {
            n_models: 10,
            layers: vec![4, 6],
            max_order: 10,
            seed: 0,
            backend: BenchBackend::Kvqa,
            vqe: VqeOptions {
                restarts: 16,
                ..VqeOptions::default()
            },
            moments: MomentOptions::default(),
        }
    }
}

impl MomentsBenchmarkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_models == 0 || self.layers.is_empty() || self.layers.contains(&0) {
            return Err(Error::InvalidArgument(
                "need at least one model and positive layer counts".into(),
            ));
        }
        if self.max_order == 0 {
            return Err(Error::InvalidArgument(
                "max_order must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsRun {
    pub model: usize,
    pub n_layers: usize,
    /// Relative error per order `1..=max_order`.
    pub relative_error: Vec<f64>,
    pub flagged: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentsBenchmark {
    pub runs: Vec<MomentsRun>,
    /// `index` is the moment order.
    pub aggregate: Vec<AggregateRow>,
}

impl MomentsBenchmark {
    pub fn mean_error(&self, n_layers: usize, order: usize) -> Option<f64> {
        self.aggregate
            .iter()
            .find(|r| r.n_layers == n_layers && r.index == order)
            .map(|r| r.mean)
    }

    /// CSV with columns `n_layers,order,mean_rel_err,std_rel_err`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n_layers,order,mean_rel_err,std_rel_err\n");
        for r in &self.aggregate {
            s.push_str(&format!(
                "{},{},{:e},{:e}\n",
                r.n_layers, r.index, r.mean, r.std
            ));
        }
        s
    }
}

fn moments_run(
    cfg: &MomentsBenchmarkConfig,
    model_index: usize,
    n_layers: usize,
) -> Result<MomentsRun> {
    let model = benchmark_model(cfg.seed, model_index);
    let h = fermion_hamiltonian_to_pauli(&model)?;
    let h_op = SparseOperator::from_pauli_sum(&h)?;
    let circuit = build_hea(model.n_qubits(), n_layers);
    let seed = child_seed(child_seed(cfg.seed, model_index as u64), n_layers as u64);
    let vqe = vqe_ground_state(
        &h,
        &circuit,
        &VqeOptions {
            seed: child_seed(seed, 0),
            ..cfg.vqe.clone()
        },
    )?;
    let phi = circuit.prepare_real(&vqe.params);
    let reference = direct_moments(&h_op, &phi, cfg.max_order);
    let computed = match cfg.backend {
        BenchBackend::Kvqa => {
            let opts = MomentOptions {
                fit: VqeOptions {
                    seed: child_seed(seed, 1),
                    ..cfg.moments.fit.clone()
                },
                ..cfg.moments.clone()
            };
            compute_moments_iterative(&circuit, &vqe.params, &h, cfg.max_order, &opts)?
        }
        BenchBackend::Oracle => {
            let out = ClassicalBranchSolver::new(&h)?.solve(&phi, None, 0)?;
            tridiagonal_moments(&out.coeffs, cfg.max_order)
        }
    };
    let errors = computed.relative_errors(&reference);
    Ok(MomentsRun {
        model: model_index,
        n_layers,
        relative_error: errors[1..].to_vec(),
        flagged: computed
            .flagged
            .get(1..)
            .map(<[bool]>::to_vec)
            .unwrap_or_default(),
    })
}

/// Relative errors of the iterative moments of the prepared VQE ground state
/// against dense powers of `H` on the same vector.
pub fn run_moments_benchmark(cfg: &MomentsBenchmarkConfig) -> Result<MomentsBenchmark> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .layers
        .iter()
        .flat_map(|&l| (0..cfg.n_models).map(move |m| (m, l)))
        .collect();
    let runs: Vec<MomentsRun> = jobs
        .par_iter()
        .map(|&(m, l)| moments_run(cfg, m, l))
        .collect::<Result<_>>()?;
    // Aggregate over orders 1..=max_order, reported with their true order.
    let per_run: Vec<(usize, Vec<f64>)> = runs
        .iter()
        .map(|r| {
            (
                r.n_layers,
                std::iter::once(0.0)
                    .chain(r.relative_error.iter().copied())
                    .collect(),
            )
        })
        .collect();
    let aggregate = aggregate(&cfg.layers, &per_run)
        .into_iter()
        .filter(|r| r.index > 0)
        .collect();
    Ok(MomentsBenchmark { runs, aggregate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_population_std() {
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn aggregate_groups_by_layer() {
        let rows = aggregate(
            &[2, 4],
            &[
                (2, vec![1.0, 2.0]),
                (4, vec![0.0, 0.0]),
                (2, vec![3.0, 2.0]),
            ],
        );
        assert_eq!(rows.len(), 4);
        assert_eq!(
            rows[0],
            AggregateRow {
                n_layers: 2,
                index: 0,
                mean: 2.0,
                std: 1.0
            }
        );
        assert_eq!(rows[3].mean, 0.0);
    }
}
