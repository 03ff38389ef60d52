use num_complex::Complex64;

use super::bath::Hybridization;
use crate::error::{Error, Result};
use crate::greens::{EnergyGrid, GreensFunction};

/// Local Green's function of the Bethe lattice with half-bandwidth `d`,
/// `G(zeta) = 2 (zeta - sqrt(zeta - d) sqrt(zeta + d)) / d^2`, on the
/// physical sheet for `Im zeta != 0`.
pub fn semicircle_gf(zeta: Complex64, d: f64) -> Complex64 {
    if d == 0.0 {
        return 1.0 / zeta;
    }
    let root = (zeta - d).sqrt() * (zeta + d).sqrt();
    2.0 * (zeta - root) / (d * d)
}

/// `Sigma = G0^{-1} - G^{-1}`.
pub fn dyson_self_energy(g0_inv: &[Complex64], g: &[Complex64]) -> Result<Vec<Complex64>> {
    if g0_inv.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            found: g0_inv.len(),
        });
    }
    g0_inv
        .iter()
        .zip(g)
        .enumerate()
        .map(|(i, (a, gi))| {
            if gi.norm() == 0.0 {
                Err(Error::SingularPoint(i))
            } else {
                Ok(a - 1.0 / gi)
            }
        })
        .collect()
}

/// `G0^{-1}(z) = z + mu - Delta(z)`.
pub fn weiss_inverse(delta: &Hybridization, mu: f64) -> Vec<Complex64> {
    delta
        .grid
        .points()
        .iter()
        .zip(&delta.values)
        .map(|(z, d)| z + mu - d)
        .collect()
}

/// Bethe-lattice closure `Delta = t^2 G`.
pub fn bethe_self_consistency(g: &GreensFunction, t: f64) -> Hybridization {
    Hybridization {
        grid: g.grid.clone(),
        values: g.values.iter().map(|x| t * t * x).collect(),
    }
}

/// Lattice local Green's function `G_loc(z) = G_sc(z + mu - Sigma(z))` for
/// hopping `t` (half-bandwidth `2t`).
pub fn lattice_local_gf(
    grid: &EnergyGrid,
    mu: f64,
    sigma: &[Complex64],
    t: f64,
) -> Result<Vec<Complex64>> {
    if sigma.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: sigma.len(),
        });
    }
    Ok(grid
        .points()
        .iter()
        .zip(sigma)
        .map(|(z, s)| semicircle_gf(z + mu - s, 2.0 * t))
        .collect())
}
