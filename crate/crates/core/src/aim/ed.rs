//! Sector-blocked exact diagonalization and exact Green's functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::fock::{apply_ladder, sector_hamiltonian};
use super::AimModel;
use crate::error::{Error, Result};
use crate::greens::{EnergyGrid, GreensFunction, OrbitalLabel};
use crate::linalg::symmetric_eigen;
use crate::pauli::{FermionOperator, Spin};

/// Ground states closer than this (eV) are treated as one degenerate
/// manifold and averaged with equal weights.
pub const DEGENERACY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    pub n_up: usize,
    pub n_down: usize,
    pub basis: Vec<usize>,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Eigenvectors as columns, in the sector basis.
    pub vectors: DMatrix<f64>,
}

impl SectorSpectrum {
    fn local_index(&self, b: usize) -> Option<usize> {
        self.basis.binary_search(&b).ok()
    }
}

/// One eigenstate, addressed by sector and column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateRef {
    pub energy: f64,
    pub sector: usize,
    pub column: usize,
}

/// Full spectrum of a model, blocked by `(n_up, n_down)`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub n_sites: usize,
    pub sectors: Vec<SectorSpectrum>,
    /// All eigenstates in ascending energy.
    pub states: Vec<StateRef>,
}

impl SpectralDecomposition {
    pub fn ground_energy(&self) -> f64 {
        self.states[0].energy
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }

    /// States within `tol` of the ground energy.
    pub fn ground_manifold(&self, tol: f64) -> Vec<StateRef> {
        let e0 = self.ground_energy();
        self.states
            .iter()
            .take_while(|s| s.energy - e0 <= tol)
            .copied()
            .collect()
    }

    pub fn sector_of(&self, s: &StateRef) -> (usize, usize) {
        let sec = &self.sectors[s.sector];
        (sec.n_up, sec.n_down)
    }

    /// Eigenvector embedded in the full Fock space.
    pub fn full_vector(&self, s: &StateRef) -> Vec<f64> {
        let sec = &self.sectors[s.sector];
        let mut v = vec![0.0; 1 << (2 * self.n_sites)];
        for (i, &b) in sec.basis.iter().enumerate() {
            v[b] = sec.vectors[(i, s.column)];
        }
        v
    }

    fn find_sector(&self, n_up: usize, n_down: usize) -> Option<usize> {
        self.sectors
            .iter()
            .position(|s| s.n_up == n_up && s.n_down == n_down)
    }

    /// Matrix `<l|op|k>` between all eigenstates of sector `from` and of the
    /// sector the operator maps it to, or `None` if `op` empties the sector.
    fn transition_matrix(&self, op: FermionOperator, from: usize) -> Option<(usize, DMatrix<f64>)> {
        let src = &self.sectors[from];
        let ns = self.n_sites;
        let delta = if op.dagger { 1isize } else { -1 };
        let (mut nu, mut nd) = (src.n_up as isize, src.n_down as isize);
        if op.mode < ns {
            nu += delta;
        } else {
            nd += delta;
        }
        if nu < 0 || nd < 0 {
            return None;
        }
        let to = self.find_sector(nu as usize, nd as usize)?;
        let dst = &self.sectors[to];
        let mut c = DMatrix::zeros(dst.basis.len(), src.basis.len());
        for (j, &b) in src.basis.iter().enumerate() {
            if let Some((s, b2)) = apply_ladder(op, b) {
                c[(
                    dst.local_index(b2).expect("target sector contains image"),
                    j,
                )] = s;
            }
        }
        Some((to, dst.vectors.transpose() * c * &src.vectors))
    }
}

/// Diagonalizes every `(n_up, n_down)` block of the model.
pub fn exact_diagonalize(model: &AimModel) -> Result<SpectralDecomposition> {
    let ns = model.n_sites();
    let pairs = super::fock::all_sectors(ns);
    let sectors: Vec<SectorSpectrum> = pairs
        .par_iter()
        .map(|&(nu, nd)| {
            let block = sector_hamiltonian(model, nu, nd)?;
            let (values, vectors) = symmetric_eigen(&block.matrix)?;
            let energies = values.iter().copied().collect();
            Ok(SectorSpectrum {
                n_up: nu,
                n_down: nd,
                basis: block.basis,
                energies,
                vectors,
            })
        })
        .collect::<Result<_>>()?;
    let mut states: Vec<StateRef> = sectors
        .iter()
        .enumerate()
        .flat_map(|(si, s)| {
            s.energies.iter().enumerate().map(move |(c, &e)| StateRef {
                energy: e,
                sector: si,
                column: c,
            })
        })
        .collect();
    states.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.sector.cmp(&b.sector)));
    Ok(SpectralDecomposition {
        n_sites: ns,
        sectors,
        states,
    })
}

/// Temperature of a Green's function evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Temperature {
    /// Equal-weight average over the degenerate ground manifold.
    Zero,
    /// Inverse temperature in 1/eV.
    Beta(f64),
}

/// Pole expansion `G(z) = sum_k r_k / (z - p_k)`.
#[derive(Debug, Clone, Default)]
pub struct LehmannPoles {
    pub poles: Vec<f64>,
    pub residues: Vec<f64>,
}

impl LehmannPoles {
    pub fn evaluate(&self, z: Complex64) -> Complex64 {
        self.poles
            .iter()
            .zip(&self.residues)
            .map(|(&p, &r)| r / (z - p))
            .sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.residues.iter().sum()
    }
}

/// Thermal (or ground-manifold) weights of every eigenstate, normalized.
pub fn state_weights(spec: &SpectralDecomposition, temperature: Temperature) -> Vec<f64> {
    let e0 = spec.ground_energy();
    let raw: Vec<f64> = match temperature {
        Temperature::Zero => spec
            .states
            .iter()
            .map(|s| {
                if s.energy - e0 <= DEGENERACY_TOL {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
        Temperature::Beta(beta) => spec
            .states
            .iter()
            .map(|s| (-beta * (s.energy - e0)).exp())
            .collect(),
    };
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// Poles and residues of the diagonal Green's function of flat mode `mode`.
pub fn lehmann_poles(
    spec: &SpectralDecomposition,
    mode: usize,
    temperature: Temperature,
) -> Result<LehmannPoles> {
    if mode >= 2 * spec.n_sites {
        return Err(Error::ModeOutOfRange {
            mode,
            n_modes: 2 * spec.n_sites,
        });
    }
    let weights = state_weights(spec, temperature);
    let mut by_sector: Vec<Vec<(usize, f64)>> = vec![Vec::new(); spec.sectors.len()];
    for (s, &w) in spec.states.iter().zip(&weights) {
        if w > 0.0 {
            by_sector[s.sector].push((s.column, w));
        }
    }
    let mut out = LehmannPoles::default();
    for (si, members) in by_sector.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        let src = &spec.sectors[si];
        for (op, sign) in [
            (FermionOperator::create(mode), 1.0),
            (FermionOperator::annihilate(mode), -1.0),
        ] {
            let Some((to, m)) = spec.transition_matrix(op, si) else {
                continue;
            };
            let dst = &spec.sectors[to];
            for &(k, w) in members {
                for (l, &el) in dst.energies.iter().enumerate() {
                    let amp = m[(l, k)];
                    if amp != 0.0 {
                        // Particle poles sit at E_l - E_k, hole poles at E_k - E_l.
                        out.poles.push(sign * (el - src.energies[k]));
                        out.residues.push(w * amp * amp);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Zero-temperature Green's function by linear solves in the `N +/- 1`
/// sectors, averaged over the degenerate ground manifold.
pub fn resolvent_gf(
    spec: &SpectralDecomposition,
    model: &AimModel,
    mode: usize,
    points: &[Complex64],
) -> Result<Vec<Complex64>> {
    if mode >= 2 * spec.n_sites {
        return Err(Error::ModeOutOfRange {
            mode,
            n_modes: 2 * spec.n_sites,
        });
    }
    let manifold = spec.ground_manifold(DEGENERACY_TOL);
    let weight = 1.0 / manifold.len() as f64;
    let mut total = vec![Complex64::new(0.0, 0.0); points.len()];
    for gs in &manifold {
        let src = &spec.sectors[gs.sector];
        let e0 = gs.energy;
        for (op, sign) in [
            (FermionOperator::create(mode), 1.0),
            (FermionOperator::annihilate(mode), -1.0),
        ] {
            let (mut nu, mut nd) = (src.n_up as isize, src.n_down as isize);
            let d = if op.dagger { 1 } else { -1 };
            if mode < spec.n_sites {
                nu += d;
            } else {
                nd += d;
            }
            if nu < 0 || nd < 0 || nu as usize > spec.n_sites || nd as usize > spec.n_sites {
                continue;
            }
            let block = sector_hamiltonian(model, nu as usize, nd as usize)?;
            let mut rhs = DVector::<f64>::zeros(block.basis.len());
            for (i, &b) in src.basis.iter().enumerate() {
                if let Some((s, b2)) = apply_ladder(op, b) {
                    let j = block
                        .basis
                        .binary_search(&b2)
                        .expect("image in target sector");
                    rhs[j] += s * src.vectors[(i, gs.column)];
                }
            }
            if rhs.norm() == 0.0 {
                continue;
            }
            let rhs_c = rhs.map(|x| Complex64::new(x, 0.0));
            let hc = block.matrix.map(|x| Complex64::new(x, 0.0));
            let n = hc.nrows();
            let vals: Vec<Complex64> = points
                .par_iter()
                .map(|&z| {
                    // Particle: (z + E0 - H)^{-1}; hole: (z - E0 + H)^{-1}.
                    let shift = DMatrix::<Complex64>::identity(n, n) * (z + sign * e0);
                    let a = shift - &hc * Complex64::new(sign, 0.0);
                    let x = a.lu().solve(&rhs_c).ok_or(Error::SingularPoint(0))?;
                    Ok(rhs_c.dot(&x))
                })
                .collect::<Result<_>>()?;
            for (t, v) in total.iter_mut().zip(vals) {
                *t += weight * v;
            }
        }
    }
    Ok(total)
}

/// Exact diagonal Green's function of impurity `orbital` with `spin`.
pub fn exact_gf(
    model: &AimModel,
    grid: &EnergyGrid,
    orbital: usize,
    spin: Spin,
    temperature: Temperature,
) -> Result<GreensFunction> {
    grid.validate()?;
    if orbital >= model.n_sites() {
        return Err(Error::InvalidArgument(format!(
            "orbital {orbital} outside {} sites",
            model.n_sites()
        )));
    }
    let spec = exact_diagonalize(model)?;
    let mode = model.mode(orbital, spin.index());
    let points = grid.points();
    let values = match temperature {
        Temperature::Zero => resolvent_gf(&spec, model, mode, &points)?,
        Temperature::Beta(beta) => {
            if !(beta > 0.0) {
                return Err(Error::InvalidArgument("beta must be positive".into()));
            }
            let poles = lehmann_poles(&spec, mode, temperature)?;
            points.iter().map(|&z| poles.evaluate(z)).collect()
        }
    };
    GreensFunction::new(grid.clone(), values, OrbitalLabel { orbital, spin })
}
