use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::continued::{continued_fraction, LanczosCoefficients};
use super::grid::{EnergyGrid, GreensFunction, OrbitalLabel};
use crate::error::Result;

/// Branch weights at or below this are treated as absent.
pub const BRANCH_WEIGHT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    /// Start vector `c^dagger |k> / ||c^dagger |k>||`.
    Particle,
    /// Start vector `c |k> / ||c |k>||`.
    Hole,
}

/// One term of a Green's function: the continued fraction of a normalized
/// start vector, its squared norm before normalization and the energy of
/// the state it was built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GfBranch {
    pub kind: BranchKind,
    pub weight: f64,
    pub e_ref: f64,
    pub coeffs: LanczosCoefficients,
}

impl GfBranch {
    /// Particle: `w g(z + E)`; hole: `-w g(E - z)`, where `g` is the
    /// continued fraction of the absolute Hamiltonian.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        Ok(match self.kind {
            BranchKind::Particle => self.weight * continued_fraction(z + self.e_ref, &self.coeffs)?,
            BranchKind::Hole => -self.weight * continued_fraction(self.e_ref - z, &self.coeffs)?,
        })
    }
}

/// `sum_k p_k B_k(z)` over `(p_k, B_k)` pairs.
pub fn assemble_gf(
    branches: &[(f64, GfBranch)],
    grid: &EnergyGrid,
    label: OrbitalLabel,
) -> Result<GreensFunction> {
    grid.validate()?;
    let values = grid
        .points()
        .into_iter()
        .map(|z| {
            branches
                .iter()
                .map(|(p, b)| Ok(p * b.evaluate(z)?))
                .sum::<Result<Complex64>>()
        })
        .collect::<Result<_>>()?;
    GreensFunction::new(grid.clone(), values, label)
}

/// Total spectral weight `sum_k p_k w_k`; 1 for a complete set of branches.
pub fn spectral_weight(branches: &[(f64, GfBranch)]) -> f64 {
    branches.iter().map(|(p, b)| p * b.weight).sum()
}
