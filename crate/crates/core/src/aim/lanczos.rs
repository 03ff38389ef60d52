//! Classical Lanczos with full reorthogonalization, and Krylov-space sizes.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::greens::{LanczosCoefficients, Termination};

/// Default threshold on `b_n^2` (eV^2) below which the recursion stops.
pub const DEFAULT_TOL_B: f64 = 1e-8;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Orthonormal Krylov basis and coefficients of a Lanczos run.
#[derive(Debug, Clone)]
pub struct LanczosRun {
    pub coeffs: LanczosCoefficients,
    pub basis: Vec<Vec<f64>>,
}

/// Lanczos recursion driven by a matrix-vector product. Every new vector is
/// orthogonalized twice against the whole basis. At most `max_n + 1`
/// vectors are generated.
pub fn lanczos_with<F>(matvec: F, phi: &[f64], max_n: usize, tol_b: f64) -> Result<LanczosRun>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let norm = dot(phi, phi).sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!(
            "Lanczos start vector has norm {norm}"
        )));
    }
    let mut basis = vec![phi.to_vec()];
    let mut a = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut terminated = Termination::MaxN;
    loop {
        let n = basis.len() - 1;
        let q = &basis[n];
        let mut w = matvec(q);
        a.push(dot(q, &w));
        if n == max_n {
            break;
        }
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b2 = dot(&w, &w);
        if b2 <= tol_b {
            terminated = Termination::BZero;
            break;
        }
        let bn = b2.sqrt();
        w.iter_mut().for_each(|x| *x /= bn);
        b.push(bn);
        basis.push(w);
    }
    let coeffs = LanczosCoefficients::new(a, b, terminated)?;
    Ok(LanczosRun { coeffs, basis })
}

/// Lanczos coefficients of a dense symmetric matrix from start vector `phi`.
pub fn classical_lanczos(
    h: &DMatrix<f64>,
    phi: &[f64],
    max_n: usize,
    tol_b: f64,
) -> Result<LanczosCoefficients> {
    if h.nrows() != phi.len() || h.ncols() != phi.len() {
        return Err(Error::DimensionMismatch {
            expected: h.nrows(),
            found: phi.len(),
        });
    }
    let run = lanczos_with(
        |v| {
            (h * nalgebra::DVector::from_column_slice(v))
                .as_slice()
                .to_vec()
        },
        phi,
        max_n,
        tol_b,
    )?;
    Ok(run.coeffs)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Dimension of the `(N, S_z)` sector reached from a generic state:
/// `C(N_s, n_up) C(N_s, n_down)` with `n_up = (N + 2S_z)/2`. `two_sz` is
/// `2 S_z = n_up - n_down`. Infeasible sectors give 0.
pub fn krylov_dimension(n_sites: usize, n_particles: usize, two_sz: i64) -> usize {
    let n = n_particles as i64;
    if (n + two_sz) % 2 != 0 {
        return 0;
    }
    let (nu, nd) = ((n + two_sz) / 2, (n - two_sz) / 2);
    if nu < 0 || nd < 0 {
        return 0;
    }
    binomial(n_sites, nu as usize) * binomial(n_sites, nd as usize)
}
