use std::fmt::Write as _;
use std::path::Path;

use log::info;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bath::{fit_bath, hybridization_from_bath, BathFit, BathFitOptions, Hybridization};
use super::lattice::{bethe_self_consistency, dyson_self_energy, lattice_local_gf, weiss_inverse};
use crate::aim::{AimModel, Temperature};
use crate::error::{Error, Result};
use crate::greens::{dos, EnergyGrid, GreensFunction, OrbitalLabel};
use crate::pauli::Spin;
use crate::rng::child_seed;
use crate::solver::{solve_impurity_gf, SolverBackend};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DmftConfig {
    /// Bethe-lattice hopping; half-bandwidth `2t`.
    pub t: f64,
    pub u: f64,
    /// Chemical potential; `U/2` (half filling) when absent.
    pub mu: Option<f64>,
    pub beta: f64,
    pub n_freq: usize,
    pub n_bath: usize,
    pub solver: SolverBackend,
    pub mixing: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub fit: BathFitOptions,
    /// Fit particle-hole symmetric baths; defaults to `mu == U/2`.
    pub symmetric_bath: Option<bool>,
    pub real_grid: EnergyGrid,
    pub seed: u64,
}

impl Default for DmftConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            u: 0.0,
            mu: None,
            beta: 50.0,
            n_freq: 200,
            n_bath: 3,
            solver: SolverBackend::Oracle,
            mixing: 0.5,
            max_iter: 50,
            tol: 1e-4,
            fit: BathFitOptions::default(),
            symmetric_bath: None,
            real_grid: EnergyGrid::default_real_axis(),
            seed: 0,
        }
    }
}

impl DmftConfig {
    pub fn chemical_potential(&self) -> f64 {
        self.mu.unwrap_or(self.u / 2.0)
    }

    pub fn symmetric(&self) -> bool {
        self.symmetric_bath
            .unwrap_or(self.chemical_potential() == self.u / 2.0)
    }

    pub fn matsubara_grid(&self) -> Result<EnergyGrid> {
        EnergyGrid::matsubara(self.beta, self.n_freq)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad("t must be finite and non-negative");
        }
        if !self.u.is_finite() || !self.chemical_potential().is_finite() {
            return bad("U and mu must be finite");
        }
        if self.n_bath == 0 {
            return bad("n_bath must be at least 1");
        }
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return bad("mixing must lie in (0, 1]");
        }
        if self.max_iter == 0 || !(self.tol > 0.0) {
            return bad("max_iter and tol must be positive");
        }
        if self.fit.starts == 0 {
            return bad("fit.starts must be at least 1");
        }
        self.matsubara_grid()?;
        self.real_grid.validate()?;
        if self.real_grid.is_matsubara() {
            return bad("real_grid must be a real-axis grid");
        }
        Ok(())
    }
}

/// Everything recorded for one pass of the loop.
#[derive(Debug, Clone)]
pub struct DmftIteration {
    pub iteration: usize,
    /// Hybridization the bath was fitted to.
    pub delta_target: Hybridization,
    pub bath: BathFit,
    pub g_imp: GreensFunction,
    pub g_imp_real: GreensFunction,
    pub sigma: Vec<Complex64>,
    /// Lattice local Green's function built from `sigma`.
    pub g_loc: Vec<Complex64>,
    pub metric: f64,
    pub ground_energy: f64,
    pub n_ground_states: usize,
}

impl DmftIteration {
    pub fn degenerate(&self) -> bool {
        self.n_ground_states > 1
    }
}

#[derive(Debug, Clone)]
pub struct DmftState {
    pub iteration: usize,
    pub converged: bool,
    /// `max_n |G_imp^(k) - G_imp^(k-1)|`; the first entry compares with the
    /// initial lattice Green's function.
    pub history: Vec<f64>,
    pub iterations: Vec<DmftIteration>,
}

impl DmftState {
    pub fn last(&self) -> &DmftIteration {
        self.iterations.last().expect("the loop runs at least once")
    }

    pub fn bath(&self) -> &BathFit {
        &self.last().bath
    }

    pub fn g_imp(&self) -> &GreensFunction {
        &self.last().g_imp
    }

    pub fn sigma(&self) -> &[Complex64] {
        &self.last().sigma
    }

    /// `A(omega)` of the last impurity Green's function at the real-grid
    /// point closest to `omega`.
    pub fn spectral_at(&self, omega: f64) -> Result<f64> {
        let g = &self.last().g_imp_real;
        let a = dos(g)?;
        let k = g
            .points()
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1.re - omega).abs().total_cmp(&(y.1.re - omega).abs()))
            .map(|(k, _)| k)
            .expect("non-empty grid");
        Ok(a[k])
    }

    pub fn summary(&self) -> DmftSummary {
        DmftSummary {
            converged: self.converged,
            iterations: self
                .iterations
                .iter()
                .map(|it| IterationSummary {
                    iteration: it.iteration,
                    metric: it.metric,
                    fit_residual: it.bath.residual,
                    ground_energy: it.ground_energy,
                    n_ground_states: it.n_ground_states,
                    degenerate: it.degenerate(),
                    bath: it.bath.clone(),
                })
                .collect(),
        }
    }

    /// One directory per iteration with `gf_matsubara.csv`, `gf_real.csv`,
    /// `dos.csv`, `sigma_matsubara.csv`, `g_loc_matsubara.csv` and
    /// `bath.csv`.
    pub fn write_run_dir(&self, dir: &Path) -> Result<Vec<String>> {
        let mut written = Vec::new();
        for it in &self.iterations {
            let name = format!("iteration_{:03}", it.iteration);
            let sub = dir.join(&name);
            std::fs::create_dir_all(&sub)?;
            it.g_imp.write_csv(&sub.join("gf_matsubara.csv"))?;
            it.g_imp_real.write_csv(&sub.join("gf_real.csv"))?;
            std::fs::write(sub.join("dos.csv"), dos_csv(&it.g_imp_real)?)?;
            let label = it.g_imp.label;
            GreensFunction::new(it.g_imp.grid.clone(), it.sigma.clone(), label)?
                .write_csv(&sub.join("sigma_matsubara.csv"))?;
            GreensFunction::new(it.g_imp.grid.clone(), it.g_loc.clone(), label)?
                .write_csv(&sub.join("g_loc_matsubara.csv"))?;
            std::fs::write(sub.join("bath.csv"), bath_csv(&it.bath))?;
            for f in [
                "gf_matsubara.csv",
                "gf_real.csv",
                "dos.csv",
                "sigma_matsubara.csv",
                "g_loc_matsubara.csv",
                "bath.csv",
            ] {
                written.push(format!("{name}/{f}"));
            }
        }
        Ok(written)
    }
}

/// Serializable per-iteration record for manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationSummary {
    pub iteration: usize,
    pub metric: f64,
    pub fit_residual: f64,
    pub ground_energy: f64,
    pub n_ground_states: usize,
    pub degenerate: bool,
    pub bath: BathFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DmftSummary {
    pub converged: bool,
    pub iterations: Vec<IterationSummary>,
}

fn dos_csv(g: &GreensFunction) -> Result<String> {
    let a = dos(g)?;
    let mut s = String::from("omega,A\n");
    for (z, v) in g.points().iter().zip(a) {
        writeln!(s, "{:e},{:e}", z.re, v).unwrap();
    }
    Ok(s)
}

fn bath_csv(b: &BathFit) -> String {
    let mut s = String::from("site,V,eps\n");
    for (i, (v, e)) in b.v.iter().zip(&b.eps).enumerate() {
        writeln!(s, "{i},{v:e},{e:e}").unwrap();
    }
    s
}

/// Self-consistency loop for the single-band Hubbard model on the Bethe
/// lattice. The first lattice Green's function carries only the static
/// paramagnetic Hartree shift `Sigma = U/2`.
pub fn run_dmft(config: &DmftConfig) -> Result<DmftState> {
    config.validate()?;
    let grid = config.matsubara_grid()?;
    let mu = config.chemical_potential();
    let label = OrbitalLabel {
        orbital: 0,
        spin: Spin::Up,
    };
    let fit_opts = BathFitOptions {
        particle_hole_symmetric: config.symmetric(),
        ..config.fit.clone()
    };

    let hartree = vec![Complex64::new(config.u / 2.0, 0.0); grid.len()];
    let g_start = GreensFunction::new(
        grid.clone(),
        lattice_local_gf(&grid, mu, &hartree, config.t)?,
        label,
    )?;
    let mut delta = bethe_self_consistency(&g_start, config.t);
    let mut g_prev = g_start.values;
    let mut state = DmftState {
        iteration: 0,
        converged: false,
        history: Vec::new(),
        iterations: Vec::new(),
    };
    let mut warm: Option<BathFit> = None;

    for k in 1..=config.max_iter {
        let bath = fit_bath(&delta, config.n_bath, &fit_opts, warm.as_ref())?;
        let model = AimModel::star(-mu, config.u, bath.v.clone(), &bath.eps)?;
        let sol = solve_impurity_gf(
            &model,
            &grid,
            0,
            Spin::Up,
            Temperature::Zero,
            &config.solver,
            child_seed(config.seed, k as u64),
        )?;
        let g_imp_real = sol.on_grid(&model, &config.real_grid, Temperature::Zero)?;

        let delta_fit = hybridization_from_bath(&bath.v, &bath.eps_matrix(), &grid)?;
        let sigma = dyson_self_energy(&weiss_inverse(&delta_fit, mu), &sol.gf.values)?;
        let g_loc = lattice_local_gf(&grid, mu, &sigma, config.t)?;
        let delta_new = bethe_self_consistency(
            &GreensFunction::new(grid.clone(), g_loc.clone(), label)?,
            config.t,
        );

        let metric = sol
            .gf
            .values
            .iter()
            .zip(&g_prev)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        info!(
            "dmft iteration {k}: metric {metric:.3e}, fit residual {:.3e}, ground states {}",
            bath.residual, sol.diagnostics.n_ground_states
        );
        let m = config.mixing;
        let mixed: Vec<Complex64> = delta_new
            .values
            .iter()
            .zip(&delta.values)
            .map(|(n, o)| m * n + (1.0 - m) * o)
            .collect();

        g_prev = sol.gf.values.clone();
        state.history.push(metric);
        state.iteration = k;
        state.iterations.push(DmftIteration {
            iteration: k,
            delta_target: delta.clone(),
            bath: bath.clone(),
            g_imp: sol.gf,
            g_imp_real,
            sigma,
            g_loc,
            metric,
            ground_energy: sol.diagnostics.ground_energy,
            n_ground_states: sol.diagnostics.n_ground_states,
        });
        delta = Hybridization::new(grid.clone(), mixed)?;
        warm = Some(bath);
        if metric <= config.tol {
            state.converged = true;
            break;
        }
    }
    Ok(state)
}
