use log::warn;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Why a Lanczos recursion stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// `b_n^2` fell below the tolerance: the Krylov space is exhausted.
    BZero,
    /// The requested number of steps was reached.
    MaxN,
    /// The number of vectors reached the Krylov-space dimension bound.
    KrylovDim,
    /// `b_n^2` came out negative: the variational vectors no longer obey the
    /// three-term recursion, and the chain is cut before the bad level.
    NegativeB,
}

/// Cost-function terms at the minimum of one variational Lanczos step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepResiduals {
    pub eps0: f64,
    pub eps1: f64,
    pub eps2: f64,
    /// Whether the weighted cost reached the requested tolerance.
    pub converged: bool,
}

impl StepResiduals {
    pub fn exact() -> Self {
        Self {
            eps0: 0.0,
            eps1: 0.0,
            eps2: 0.0,
            converged: true,
        }
    }
}

/// Diagonal (`a`) and off-diagonal (`b`) Lanczos coefficients; `b[k]` couples
/// levels `k` and `k + 1`, so `b.len() == a.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LanczosCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub terminated: Termination,
    /// One entry per coupling `b[k]`, i.e. per variationally generated vector.
    pub residuals: Vec<StepResiduals>,
}

impl LanczosCoefficients {
    pub fn new(a: Vec<f64>, b: Vec<f64>, terminated: Termination) -> Result<Self> {
        let residuals = vec![StepResiduals::exact(); b.len()];
        let c = Self {
            a,
            b,
            terminated,
            residuals,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a.is_empty() {
            return Err(Error::InvalidArgument(
                "Lanczos coefficients need at least a_0".into(),
            ));
        }
        if self.b.len() + 1 != self.a.len() {
            return Err(Error::DimensionMismatch {
                expected: self.a.len() - 1,
                found: self.b.len(),
            });
        }
        if self.a.iter().any(|x| !x.is_finite())
            || self.b.iter().any(|&x| !(x > 0.0 && x.is_finite()))
        {
            return Err(Error::InvalidArgument(
                "a must be finite and b strictly positive".into(),
            ));
        }
        Ok(())
    }

    /// Number of Krylov vectors, `m + 1`.
    pub fn depth(&self) -> usize {
        self.a.len()
    }

    /// The tridiagonal matrix with `a` on the diagonal and `b` beside it.
    pub fn tridiagonal(&self) -> DMatrix<f64> {
        let n = self.a.len();
        let mut t = DMatrix::zeros(n, n);
        for (i, &a) in self.a.iter().enumerate() {
            t[(i, i)] = a;
        }
        for (i, &b) in self.b.iter().enumerate() {
            t[(i, i + 1)] = b;
            t[(i + 1, i)] = b;
        }
        t
    }
}

/// `1 / (z - a_0 - b_1^2 / (z - a_1 - ...))`, evaluated from the deepest level up.
pub fn continued_fraction(z: Complex64, coeffs: &LanczosCoefficients) -> Result<Complex64> {
    let m = coeffs.a.len();
    if m == 0 {
        return Err(Error::InvalidArgument("empty continued fraction".into()));
    }
    let mut t = z - coeffs.a[m - 1];
    for n in (0..m - 1).rev() {
        if t == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularPoint(n + 1));
        }
        t = z - coeffs.a[n] - coeffs.b[n] * coeffs.b[n] / t;
    }
    if t == Complex64::new(0.0, 0.0) {
        return Err(Error::SingularPoint(0));
    }
    Ok(1.0 / t)
}

/// `(T^n)_{00}` of the tridiagonal matrix; equals the `n`-th moment
/// `<phi|H^n|phi>` for `n <= 2m + 1`, with `m + 1` the depth.
pub fn moments_from_tridiagonal(coeffs: &LanczosCoefficients, n: usize) -> f64 {
    let depth = coeffs.a.len();
    if n > 2 * depth - 1 {
        warn!(
            "moment order {n} exceeds the reliable order {} of a depth-{depth} recursion",
            2 * depth - 1
        );
    }
    // Propagate e_0 through T n times; only the first min(n, depth) entries
    // can be nonzero after n steps, but the dense product is cheap here.
    let t = coeffs.tridiagonal();
    let mut v = nalgebra::DVector::zeros(depth);
    v[0] = 1.0;
    let half = n / 2;
    for _ in 0..half {
        v = &t * v;
    }
    if n % 2 == 0 {
        v.dot(&v)
    } else {
        v.dot(&(&t * &v))
    }
}
