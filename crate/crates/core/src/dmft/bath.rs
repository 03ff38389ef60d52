use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::greens::EnergyGrid;
use crate::linalg::symmetric_eigen;
use crate::optim::{best_of, minimize_lbfgs, multistart, LbfgsOptions};

/// Hybridization function `Delta(z)` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Hybridization {
    pub grid: EnergyGrid,
    pub values: Vec<Complex64>,
}

impl Hybridization {
    pub fn new(grid: EnergyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    /// `Im Delta(i w_n) <= tol` at every positive Matsubara frequency.
    pub fn is_causal(&self, tol: f64) -> bool {
        self.grid.is_matsubara() && self.values.iter().all(|d| d.im <= tol)
    }
}

/// `Delta(z) = V^T (z - eps)^{-1} V` for a single impurity orbital, computed
/// from the eigenmodes of `eps`.
pub fn hybridization_from_bath(
    v: &[f64],
    eps: &[Vec<f64>],
    grid: &EnergyGrid,
) -> Result<Hybridization> {
    grid.validate()?;
    let n = v.len();
    if eps.len() != n || eps.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eps.len(),
        });
    }
    let m = DMatrix::from_fn(n, n, |i, j| eps[i][j]);
    if (&m - m.transpose()).amax() > 1e-12 {
        return Err(Error::NotHermitian("bath matrix is not symmetric".into()));
    }
    let (modes, vectors) = symmetric_eigen(&m)?;
    let vt: Vec<f64> = (0..n)
        .map(|k| (0..n).map(|i| vectors[(i, k)] * v[i]).sum())
        .collect();
    let mut values = Vec::with_capacity(grid.len());
    for (idx, z) in grid.points().into_iter().enumerate() {
        let mut d = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let den = z - modes[k];
            if den.norm() == 0.0 {
                return Err(Error::SingularPoint(idx));
            }
            d += vt[k] * vt[k] / den;
        }
        values.push(d);
    }
    Hybridization::new(grid.clone(), values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BathFitOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub grad_tol: f64,
    /// Restrict to baths symmetric under `eps -> -eps`: pairs `(V, +-e)`
    /// and, for odd sizes, one level at zero.
    pub particle_hole_symmetric: bool,
}

impl Default for BathFitOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            seed: 0,
            max_iters: 5000,
            grad_tol: 1e-12,
            particle_hole_symmetric: false,
        }
    }
}

/// Star-geometry bath: hoppings and diagonal levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BathFit {
    pub v: Vec<f64>,
    pub eps: Vec<f64>,
    /// Weighted misfit `sum_n |Delta_fit - Delta_target|^2 / w_n`.
    pub residual: f64,
}

impl BathFit {
    pub fn eps_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.eps.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { self.eps[i] } else { 0.0 })
                    .collect()
            })
            .collect()
    }
}

/// Parametrization of the bath by an unconstrained vector.
#[derive(Debug, Clone, Copy)]
struct Layout {
    n_bath: usize,
    symmetric: bool,
}

impl Layout {
    fn pairs(&self) -> usize {
        self.n_bath / 2
    }

    fn dim(&self) -> usize {
        if self.symmetric {
            2 * self.pairs() + self.n_bath % 2
        } else {
            2 * self.n_bath
        }
    }

    fn expand(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        if !self.symmetric {
            return (x[..self.n_bath].to_vec(), x[self.n_bath..].to_vec());
        }
        let p = self.pairs();
        let mut v = Vec::with_capacity(self.n_bath);
        let mut e = Vec::with_capacity(self.n_bath);
        for i in 0..p {
            v.extend([x[i], x[i]]);
            e.extend([x[p + i], -x[p + i]]);
        }
        if self.n_bath % 2 == 1 {
            v.push(x[2 * p]);
            e.push(0.0);
        }
        (v, e)
    }

    /// Pulls a gradient in `(V, eps)` back to the parameter vector.
    fn pull_back(&self, gv: &[f64], ge: &[f64]) -> Vec<f64> {
        if !self.symmetric {
            return gv.iter().chain(ge).copied().collect();
        }
        let p = self.pairs();
        let mut g = vec![0.0; self.dim()];
        for i in 0..p {
            g[i] = gv[2 * i] + gv[2 * i + 1];
            g[p + i] = ge[2 * i] - ge[2 * i + 1];
        }
        if self.n_bath % 2 == 1 {
            g[2 * p] = gv[self.n_bath - 1];
        }
        g
    }

    fn from_bath(&self, v: &[f64], e: &[f64]) -> Vec<f64> {
        if !self.symmetric {
            return v.iter().chain(e).copied().collect();
        }
        let p = self.pairs();
        let mut x = vec![0.0; self.dim()];
        for i in 0..p {
            x[i] = v[2 * i];
            x[p + i] = e[2 * i];
        }
        if self.n_bath % 2 == 1 {
            x[2 * p] = v[self.n_bath - 1];
        }
        x
    }
}

/// Weighted misfit and its gradient with respect to `(V, eps)`.
fn misfit(
    v: &[f64],
    e: &[f64],
    points: &[Complex64],
    target: &[Complex64],
) -> (f64, Vec<f64>, Vec<f64>) {
    let n = v.len();
    let mut f = 0.0;
    let mut gv = vec![0.0; n];
    let mut ge = vec![0.0; n];
    for (z, t) in points.iter().zip(target) {
        let w = 1.0 / z.im;
        let inv: Vec<Complex64> = e.iter().map(|&ek| 1.0 / (z - ek)).collect();
        let fit: Complex64 = (0..n).map(|k| v[k] * v[k] * inv[k]).sum();
        let r = fit - t;
        f += w * r.norm_sqr();
        for k in 0..n {
            gv[k] += w * 2.0 * (r.conj() * (2.0 * v[k] * inv[k])).re;
            ge[k] += w * 2.0 * (r.conj() * (v[k] * v[k] * inv[k] * inv[k])).re;
        }
    }
    (f, gv, ge)
}

/// Fits an `n_bath`-site star bath to a Matsubara hybridization with weight
/// `1 / w_n`. Deterministic for fixed options; `warm` adds one start from a
/// previous fit.
pub fn fit_bath(
    target: &Hybridization,
    n_bath: usize,
    opts: &BathFitOptions,
    warm: Option<&BathFit>,
) -> Result<BathFit> {
    if n_bath == 0 {
        return Err(Error::InvalidArgument("n_bath must be at least 1".into()));
    }
    if !target.grid.is_matsubara() {
        return Err(Error::WrongGrid("bath fit needs a Matsubara grid"));
    }
    if opts.starts == 0 {
        return Err(Error::InvalidArgument(
            "at least one fit start is needed".into(),
        ));
    }
    let layout = Layout {
        n_bath,
        symmetric: opts.particle_hole_symmetric,
    };
    let points = target.grid.points();
    let values = &target.values;
    let func = |x: &[f64]| {
        let (v, e) = layout.expand(x);
        let (f, gv, ge) = misfit(&v, &e, &points, values);
        (f, layout.pull_back(&gv, &ge))
    };

    // Total hopping weight from the high-frequency tail, Delta ~ sum V^2 / z.
    let last = points.len() - 1;
    let tail = -points[last].im * values[last].im;
    let v_scale = if tail.is_finite() && tail > 0.0 {
        (tail / n_bath as f64).sqrt()
    } else {
        1.0
    };
    let init = |k: usize, rng: &mut rand_chacha::ChaCha8Rng| -> Vec<f64> {
        let v: Vec<f64> = (0..n_bath)
            .map(|_| v_scale * rng.gen_range(0.5..1.5))
            .collect();
        let e: Vec<f64> = (0..n_bath)
            .map(|i| {
                let spread = 1.0 + k as f64 * 0.25;
                let base = if n_bath == 1 {
                    0.0
                } else {
                    spread * (2.0 * i as f64 / (n_bath - 1) as f64 - 1.0)
                };
                // Symmetric layouts read the upper level of each pair.
                let base = if layout.symmetric { -base } else { base };
                base + rng.gen_range(-0.2..0.2)
            })
            .collect();
        layout.from_bath(&v, &e)
    };
    let lbfgs = LbfgsOptions {
        max_iters: opts.max_iters,
        grad_tol: opts.grad_tol,
        ..LbfgsOptions::default()
    };
    let mut results = multistart(&func, init, opts.starts, opts.seed, &lbfgs);
    if let Some(w) = warm.filter(|w| w.v.len() == n_bath) {
        results.insert(
            0,
            minimize_lbfgs(&func, &layout.from_bath(&w.v, &w.eps), &lbfgs),
        );
    }
    let best = best_of(results);
    let (v, e) = layout.expand(&best.x);
    Ok(canonical(v, e, best.f))
}

/// Positive hoppings, levels in ascending order.
fn canonical(v: Vec<f64>, e: Vec<f64>, residual: f64) -> BathFit {
    let mut sites: Vec<(f64, f64)> = v.into_iter().map(f64::abs).zip(e).collect();
    sites.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (v, eps) = sites.into_iter().unzip();
    BathFit { v, eps, residual }
}
