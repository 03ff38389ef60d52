use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frequency grid on which Green's functions are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnergyGrid {
    /// `i (2n+1) pi / beta`, `n = 0 .. n_freq`.
    Matsubara { beta: f64, n_freq: usize },
    /// `omega_k + i eta` on an evenly spaced real interval.
    RealAxis {
        omega_min: f64,
        omega_max: f64,
        n_points: usize,
        eta: f64,
    },
}

impl EnergyGrid {
    pub fn matsubara(beta: f64, n_freq: usize) -> Result<Self> {
        let g = EnergyGrid::Matsubara { beta, n_freq };
        g.validate()?;
        Ok(g)
    }

    pub fn real_axis(omega_min: f64, omega_max: f64, n_points: usize, eta: f64) -> Result<Self> {
        let g = EnergyGrid::RealAxis {
            omega_min,
            omega_max,
            n_points,
            eta,
        };
        g.validate()?;
        Ok(g)
    }

    /// beta = 50 / eV, 200 frequencies.
    pub fn default_matsubara() -> Self {
        EnergyGrid::Matsubara {
            beta: 50.0,
            n_freq: 200,
        }
    }

    /// [-12, 12] eV, 1201 points, eta = 0.05 eV.
    pub fn default_real_axis() -> Self {
        EnergyGrid::RealAxis {
            omega_min: -12.0,
            omega_max: 12.0,
            n_points: 1201,
            eta: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EnergyGrid::Matsubara { beta, n_freq } => {
                if !(beta > 0.0 && beta.is_finite()) || n_freq == 0 {
                    return Err(Error::InvalidArgument(
                        "Matsubara grid needs beta > 0 and n_freq > 0".into(),
                    ));
                }
            }
            EnergyGrid::RealAxis {
                omega_min,
                omega_max,
                n_points,
                eta,
            } => {
                if !(eta > 0.0) || n_points < 2 || !(omega_max > omega_min) {
                    return Err(Error::InvalidArgument(
                        "real-axis grid needs eta > 0, omega_max > omega_min and at least two points".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        match *self {
            EnergyGrid::Matsubara { n_freq, .. } => n_freq,
            EnergyGrid::RealAxis { n_points, .. } => n_points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_matsubara(&self) -> bool {
        matches!(self, EnergyGrid::Matsubara { .. })
    }

    pub fn points(&self) -> Vec<Complex64> {
        match *self {
            EnergyGrid::Matsubara { beta, n_freq } => (0..n_freq)
                .map(|n| Complex64::new(0.0, (2 * n + 1) as f64 * PI / beta))
                .collect(),
            EnergyGrid::RealAxis {
                omega_min,
                omega_max,
                n_points,
                eta,
            } => {
                let step = (omega_max - omega_min) / (n_points - 1) as f64;
                (0..n_points)
                    .map(|k| Complex64::new(omega_min + k as f64 * step, eta))
                    .collect()
            }
        }
    }
}

/// Orbital/spin label of a diagonal Green's function element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitalLabel {
    pub orbital: usize,
    pub spin: crate::pauli::Spin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GreensFunction {
    pub grid: EnergyGrid,
    pub values: Vec<Complex64>,
    pub label: OrbitalLabel,
}

impl GreensFunction {
    pub fn new(grid: EnergyGrid, values: Vec<Complex64>, label: OrbitalLabel) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            grid,
            values,
            label,
        })
    }

    /// Evaluates `f` on every grid point.
    pub fn from_fn(
        grid: &EnergyGrid,
        label: OrbitalLabel,
        f: impl Fn(Complex64) -> Complex64,
    ) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Self {
            grid: grid.clone(),
            values,
            label,
        }
    }

    pub fn points(&self) -> Vec<Complex64> {
        self.grid.points()
    }

    /// CSV with columns `re_z,im_z,re_G,im_G` at full precision.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("re_z,im_z,re_G,im_G\n");
        for (z, g) in self.points().iter().zip(&self.values) {
            writeln!(s, "{:e},{:e},{:e},{:e}", z.re, z.im, g.re, g.im).unwrap();
        }
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Parses the `(z, G)` columns written by [`GreensFunction::to_csv`].
    pub fn read_csv_columns(text: &str) -> Result<Vec<(Complex64, Complex64)>> {
        let mut lines = text.lines();
        match lines.next() {
            Some("re_z,im_z,re_G,im_G") => {}
            _ => {
                return Err(Error::InvalidArgument(
                    "missing Green's function CSV header".into(),
                ))
            }
        }
        lines
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, line)| {
                let cols: Vec<f64> = line
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::InvalidArgument(format!("CSV row {}: {e}", i + 2)))?;
                if cols.len() != 4 {
                    return Err(Error::InvalidArgument(format!(
                        "CSV row {} has {} columns",
                        i + 2,
                        cols.len()
                    )));
                }
                Ok((
                    Complex64::new(cols[0], cols[1]),
                    Complex64::new(cols[2], cols[3]),
                ))
            })
            .collect()
    }

    /// Largest `|G_self - G_other| / |G_other|` over the grid.
    pub fn max_relative_deviation(&self, reference: &GreensFunction) -> Result<f64> {
        Ok(self
            .relative_deviations(reference)?
            .into_iter()
            .fold(0.0, f64::max))
    }

    pub fn relative_deviations(&self, reference: &GreensFunction) -> Result<Vec<f64>> {
        if self.values.len() != reference.values.len() {
            return Err(Error::DimensionMismatch {
                expected: reference.values.len(),
                found: self.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm() / b.norm())
            .collect())
    }

    /// Largest `|G_self - G_other|` over the grid.
    pub fn max_abs_deviation(&self, other: &GreensFunction) -> Result<f64> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch {
                expected: other.values.len(),
                found: self.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

/// Spectral function `A(omega) = -Im G(omega + i eta) / pi`.
pub fn dos(gf: &GreensFunction) -> Result<Vec<f64>> {
    if gf.grid.is_matsubara() {
        return Err(Error::WrongGrid("spectral function needs a real-axis grid"));
    }
    Ok(gf.values.iter().map(|g| -g.im / PI).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Spin;

    const LABEL: OrbitalLabel = OrbitalLabel {
        orbital: 0,
        spin: Spin::Up,
    };

    #[test]
    fn matsubara_points_are_odd_multiples() {
        let p = EnergyGrid::matsubara(10.0, 3).unwrap().points();
        assert!((p[2].im - 5.0 * PI / 10.0).abs() < 1e-15);
        assert_eq!(p[0].re, 0.0);
    }

    #[test]
    fn lorentzian_peak_height() {
        let grid = EnergyGrid::real_axis(-2.0, 0.0, 201, 0.05).unwrap();
        let gf = GreensFunction::from_fn(&grid, LABEL, |z| 1.0 / (z + 1.0));
        let a = dos(&gf).unwrap();
        assert!((a[100] - 1.0 / (PI * 0.05)).abs() < 1e-9);
    }

    #[test]
    fn dos_rejects_matsubara() {
        let grid = EnergyGrid::default_matsubara();
        let gf = GreensFunction::from_fn(&grid, LABEL, |z| 1.0 / z);
        assert!(dos(&gf).is_err());
    }

    #[test]
    fn csv_round_trip_is_lossless() {
        let grid = EnergyGrid::matsubara(50.0, 7).unwrap();
        let gf = GreensFunction::from_fn(&grid, LABEL, |z| 1.0 / (z - 0.123456789012345));
        let rows = GreensFunction::read_csv_columns(&gf.to_csv()).unwrap();
        for ((z, g), (z0, g0)) in rows.iter().zip(gf.points().iter().zip(&gf.values)) {
            assert_eq!(z, z0);
            assert_eq!(g, g0);
        }
    }

    #[test]
    fn bad_grids_are_rejected() {
        assert!(EnergyGrid::matsubara(0.0, 10).is_err());
        assert!(EnergyGrid::real_axis(-1.0, 1.0, 10, 0.0).is_err());
    }
}
