use std::path::Path;
use std::time::Instant;

use kvqa::aim::{exact_gf, Temperature};
use kvqa::bench::{
    run_gf_benchmark, run_moments_benchmark, BenchBackend, GfBenchmarkConfig,
    MomentsBenchmarkConfig,
};
use kvqa::dmft::{run_dmft, DmftConfig};
use kvqa::greens::spectral_weight;
use kvqa::solver::{solve_impurity_gf, ImpuritySolution, KvqaSolverOptions, SolverBackend};
use serde::Serialize;
use serde_json::json;

use crate::config::{load, Backend, SolveGfConfig};
use crate::{Cli, CliError, ConfigKind};

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    version: &'a str,
    seed: u64,
    config: &'a C,
    duration_s: f64,
    outputs: Vec<String>,
    results: serde_json::Value,
}

fn write_manifest<C: Serialize>(
    out: &Path,
    command: &str,
    seed: u64,
    config: &C,
    started: Instant,
    outputs: Vec<String>,
    results: serde_json::Value,
) -> Result<(), CliError> {
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        config,
        duration_s: started.elapsed().as_secs_f64(),
        outputs,
        results,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(kvqa::Error::from)?;
    std::fs::write(out.join("manifest.json"), text + "\n").map_err(kvqa::Error::from)?;
    Ok(())
}

fn create_out(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out).map_err(|e| CliError::Run(kvqa::Error::from(e)))
}

fn write(out: &Path, name: &str, text: &str, outputs: &mut Vec<String>) -> Result<(), CliError> {
    std::fs::write(out.join(name), text).map_err(kvqa::Error::from)?;
    outputs.push(name.to_string());
    Ok(())
}

fn invalid(e: kvqa::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Which exit status a finished command should report.
pub enum Outcome {
    Done,
    NotConverged(String),
}

pub fn solve_gf(cli: &Cli) -> Result<Outcome, CliError> {
    let mut cfg: SolveGfConfig = load(cli.config.as_deref())?
        .ok_or_else(|| CliError::Config("solve-gf needs --config with a model".into()))?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(b) = cli.backend {
        cfg.backend = b;
    }
    if let Some(l) = cli.layers.as_ref().and_then(|l| l.first()) {
        cfg.layers = *l;
    }
    cfg.validate().map_err(invalid)?;
    let started = Instant::now();

    let temperature = cfg.beta.map_or(Temperature::Zero, Temperature::Beta);
    let (solve, lanczos_source) = match cfg.backend {
        Backend::Kvqa => {
            let opts = KvqaSolverOptions {
                layers: cfg.layers,
                ..cfg.kvqa.clone()
            };
            (SolverBackend::Kvqa(opts), None)
        }
        // The oracle supplies the Green's function; exact Lanczos supplies
        // the coefficient file.
        Backend::Oracle => (SolverBackend::Oracle, Some(SolverBackend::Lanczos)),
    };
    let run = |backend: &SolverBackend| {
        solve_impurity_gf(
            &cfg.model,
            &cfg.matsubara,
            cfg.orbital,
            cfg.spin,
            temperature,
            backend,
            cfg.seed,
        )
    };
    let sol = run(&solve)?;
    let gf_real = sol.on_grid(&cfg.model, &cfg.real_grid, temperature)?;
    let with_branches: ImpuritySolution = match &lanczos_source {
        Some(b) => run(b)?,
        None => sol.clone(),
    };
    let assembled = with_branches
        .assembled
        .as_ref()
        .expect("branch solvers keep their branches");
    let lanczos: Vec<serde_json::Value> = assembled
        .branches
        .iter()
        .zip(&assembled.reports)
        .map(|((p, b), r)| {
            json!({
                "state": r.state,
                "probability": p,
                "kind": b.kind,
                "weight": b.weight,
                "e_ref": b.e_ref,
                "fidelity": r.fidelity,
                "a": b.coeffs.a,
                "b": b.coeffs.b,
                "terminated": b.coeffs.terminated,
                "residuals": b.coeffs.residuals,
            })
        })
        .collect();

    let mut results = json!({
        "ground_energy": sol.diagnostics.ground_energy,
        "exact_ground_energy": sol.diagnostics.exact_ground_energy,
        "sector": sol.diagnostics.sector,
        "n_ground_states": sol.diagnostics.n_ground_states,
        "degenerate": sol.diagnostics.n_ground_states > 1,
        "spectral_weight": spectral_weight(&assembled.branches),
    });
    if cfg.backend == Backend::Kvqa && cfg.compare_oracle {
        let reference = exact_gf(
            &cfg.model,
            &cfg.matsubara,
            cfg.orbital,
            cfg.spin,
            temperature,
        )?;
        results["oracle_max_relative_deviation"] =
            json!(sol.gf.max_relative_deviation(&reference)?);
    }

    let out = cli.out.as_path();
    create_out(out)?;
    let mut outputs = Vec::new();
    write(out, "gf_matsubara.csv", &sol.gf.to_csv(), &mut outputs)?;
    write(out, "gf_real.csv", &gf_real.to_csv(), &mut outputs)?;
    let lanczos_text = serde_json::to_string_pretty(&lanczos).map_err(kvqa::Error::from)? + "\n";
    write(out, "lanczos.json", &lanczos_text, &mut outputs)?;
    write_manifest(out, "solve-gf", cfg.seed, &cfg, started, outputs, results)?;
    Ok(Outcome::Done)
}

fn bench_backend(b: Backend) -> BenchBackend {
    match b {
        Backend::Kvqa => BenchBackend::Kvqa,
        Backend::Oracle => BenchBackend::Oracle,
    }
}

pub fn benchmark_gf(cli: &Cli) -> Result<Outcome, CliError> {
    let mut cfg: GfBenchmarkConfig = load(cli.config.as_deref())?.unwrap_or_default();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(b) = cli.backend {
        cfg.backend = bench_backend(b);
    }
    if let Some(l) = &cli.layers {
        cfg.layers = l.clone();
    }
    cfg.validate().map_err(invalid)?;
    let started = Instant::now();
    let bench = run_gf_benchmark(&cfg)?;

    let out = cli.out.as_path();
    create_out(out)?;
    let mut outputs = Vec::new();
    write(out, "benchmark_gf.csv", &bench.to_csv(), &mut outputs)?;
    write(
        out,
        "benchmark_gf_runs.csv",
        &bench.runs_csv(),
        &mut outputs,
    )?;
    let runs: Vec<serde_json::Value> = bench
        .runs
        .iter()
        .map(|r| {
            json!({
                "model": r.model,
                "n_layers": r.n_layers,
                "ground_energy": r.ground_energy,
                "exact_ground_energy": r.exact_ground_energy,
                "spectral_weight": r.spectral_weight,
                "min_dos": r.min_dos,
            })
        })
        .collect();
    let max_mean: Vec<serde_json::Value> = cfg
        .layers
        .iter()
        .map(|&l| json!({"n_layers": l, "max_mean_dG": bench.max_mean(l)}))
        .collect();
    let results = json!({ "max_mean_dG": max_mean, "runs": runs });
    write_manifest(
        out,
        "benchmark-gf",
        cfg.seed,
        &cfg,
        started,
        outputs,
        results,
    )?;
    Ok(Outcome::Done)
}

pub fn benchmark_moments(cli: &Cli) -> Result<Outcome, CliError> {
    let mut cfg: MomentsBenchmarkConfig = load(cli.config.as_deref())?.unwrap_or_default();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(b) = cli.backend {
        cfg.backend = bench_backend(b);
    }
    if let Some(l) = &cli.layers {
        cfg.layers = l.clone();
    }
    cfg.validate().map_err(invalid)?;
    let started = Instant::now();
    let bench = run_moments_benchmark(&cfg)?;

    let out = cli.out.as_path();
    create_out(out)?;
    let mut outputs = Vec::new();
    write(out, "benchmark_moments.csv", &bench.to_csv(), &mut outputs)?;
    let results = json!({ "runs": bench.runs });
    write_manifest(
        out,
        "benchmark-moments",
        cfg.seed,
        &cfg,
        started,
        outputs,
        results,
    )?;
    Ok(Outcome::Done)
}

pub fn dmft(cli: &Cli) -> Result<Outcome, CliError> {
    let mut cfg: DmftConfig = load(cli.config.as_deref())?.unwrap_or_default();
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let layers = cli.layers.as_ref().and_then(|l| l.first().copied());
    match (cli.backend, &mut cfg.solver) {
        (Some(Backend::Oracle), s) => *s = SolverBackend::Oracle,
        (Some(Backend::Kvqa), s @ (SolverBackend::Oracle | SolverBackend::Lanczos)) => {
            *s = SolverBackend::Kvqa(KvqaSolverOptions::default())
        }
        _ => {}
    }
    if let (Some(l), SolverBackend::Kvqa(opts)) = (layers, &mut cfg.solver) {
        opts.layers = l;
    }
    cfg.validate().map_err(invalid)?;
    let started = Instant::now();
    let state = run_dmft(&cfg)?;

    let out = cli.out.as_path();
    create_out(out)?;
    let outputs = state.write_run_dir(out)?;
    let summary = state.summary();
    let results = json!({
        "converged": summary.converged,
        "iterations": state.iteration,
        "history": state.history,
        "a_at_zero": state.spectral_at(0.0)?,
        "per_iteration": summary.iterations,
    });
    write_manifest(out, "dmft", cfg.seed, &cfg, started, outputs, results)?;
    if state.converged {
        Ok(Outcome::Done)
    } else {
        Ok(Outcome::NotConverged(format!(
            "DMFT loop did not converge in {} iterations (last change {:.3e})",
            state.iteration,
            state.history.last().copied().unwrap_or(f64::NAN)
        )))
    }
}

pub fn validate_config(cli: &Cli, kind: ConfigKind) -> Result<Outcome, CliError> {
    if cli.config.is_none() {
        return Err(CliError::Config("validate-config needs --config".into()));
    }
    let path = cli.config.as_deref();
    match kind {
        ConfigKind::SolveGf => load::<SolveGfConfig>(path)?
            .expect("path given")
            .validate()
            .map_err(invalid)?,
        ConfigKind::BenchmarkGf => load::<GfBenchmarkConfig>(path)?
            .expect("path given")
            .validate()
            .map_err(invalid)?,
        ConfigKind::BenchmarkMoments => load::<MomentsBenchmarkConfig>(path)?
            .expect("path given")
            .validate()
            .map_err(invalid)?,
        ConfigKind::Dmft => load::<DmftConfig>(path)?
            .expect("path given")
            .validate()
            .map_err(invalid)?,
    }
    println!("ok");
    Ok(Outcome::Done)
}
