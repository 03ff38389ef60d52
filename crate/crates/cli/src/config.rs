use std::path::Path;

use kvqa::aim::AimModel;
use kvqa::greens::EnergyGrid;
use kvqa::pauli::Spin;
use kvqa::solver::KvqaSolverOptions;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Kvqa,
    Oracle,
}

fn default_backend() -> Backend {
    Backend::Kvqa
}

fn default_layers() -> usize {
    6
}

fn default_spin() -> Spin {
    Spin::Up
}

fn default_true() -> bool {
    true
}

/// Single Green's-function solve of one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveGfConfig {
    pub model: AimModel,
    #[serde(default = "default_backend")]
    pub backend: Backend,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default)]
    pub kvqa: KvqaSolverOptions,
    #[serde(default)]
    pub orbital: usize,
    #[serde(default = "default_spin")]
    pub spin: Spin,
    /// Inverse temperature; zero temperature when absent.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "EnergyGrid::default_matsubara")]
    pub matsubara: EnergyGrid,
    #[serde(default = "EnergyGrid::default_real_axis")]
    pub real_grid: EnergyGrid,
    #[serde(default)]
    pub seed: u64,
    /// Report the deviation from the oracle in the manifest.
    #[serde(default = "default_true")]
    pub compare_oracle: bool,
}

impl SolveGfConfig {
    pub fn validate(&self) -> kvqa::Result<()> {
        self.model.validate()?;
        self.matsubara.validate()?;
        self.real_grid.validate()?;
        let bad = |m: &str| Err(kvqa::Error::InvalidArgument(m.into()));
        if !self.matsubara.is_matsubara() {
            return bad("matsubara must be a Matsubara grid");
        }
        if self.real_grid.is_matsubara() {
            return bad("real_grid must be a real-axis grid");
        }
        if self.orbital >= self.model.n_imp {
            return bad("orbital is not an impurity orbital");
        }
        if self.layers == 0 {
            return bad("layers must be positive");
        }
        if let Some(b) = self.beta {
            if !(b > 0.0 && b.is_finite()) {
                return bad("beta must be positive and finite");
            }
        }
        Ok(())
    }
}

/// A config file may also be a manifest written by an earlier run, in which
/// case its `config` entry is used.
#[derive(Deserialize)]
struct Wrapped<T> {
    config: T,
}

pub fn load<T: DeserializeOwned>(path: Option<&Path>) -> Result<Option<T>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let located = |e: serde_json::Error| CliError::Config(format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(located)?;
    let is_manifest = value.get("command").is_some() && value.get("config").is_some();
    if is_manifest {
        Ok(Some(
            serde_json::from_str::<Wrapped<T>>(&text)
                .map_err(located)?
                .config,
        ))
    } else {
        Ok(Some(serde_json::from_str(&text).map_err(located)?))
    }
}
