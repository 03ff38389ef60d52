//! Dense reference implementations shared by the integration tests. Nothing
//! here calls into the crate's own operator builders, so agreement with them
//! is a genuine cross-check.

#![allow(dead_code)]

use kvqa::aim::{AimModel, Interaction, OneBody};
use kvqa::pauli::{Pauli, PauliSum};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

/// Ascending eigenvalues and eigenvector columns of a real symmetric matrix,
/// with every pair checked against `H v = e v`.
pub fn eigh(h: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let evd = faer::Mat::<f64>::from_fn(n, n, |i, j| h[(i, j)])
        .self_adjoint_eigen(faer::Side::Lower)
        .unwrap();
    let s = evd.S().column_vector();
    let e = DVector::from_fn(n, |i, _| s[i]);
    let v = DMatrix::from_fn(n, n, |i, j| evd.U()[(i, j)]);
    let scale = h.amax().max(1.0);
    let residual = (h * &v - &v * DMatrix::from_diagonal(&e)).amax();
    assert!(residual <= 1e-10 * scale, "eigen residual {residual:e}");
    (e, v)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// Qubit 0 is the least significant bit, so it is the rightmost factor.
pub fn string_matrix(ops: &[Pauli]) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, c(1.0, 0.0));
    for p in ops {
        m = pauli_matrix(*p).kronecker(&m);
    }
    m
}

pub fn sum_matrix(h: &PauliSum) -> DMatrix<Complex64> {
    let d = 1usize << h.n_qubits();
    let mut m = DMatrix::zeros(d, d);
    for t in h.terms() {
        m += string_matrix(&t.ops()) * t.coeff;
    }
    m
}

/// `c_p` as `Z^{<p} (|0><1|)_p`.
pub fn annihilator(p: usize, n_modes: usize) -> DMatrix<f64> {
    let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    let id = DMatrix::<f64>::identity(2, 2);
    let lower = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let mut m = DMatrix::from_element(1, 1, 1.0);
    for q in 0..n_modes {
        let f = if q < p {
            &z
        } else if q == p {
            &lower
        } else {
            &id
        };
        m = f.kronecker(&m);
    }
    m
}

pub fn number(p: usize, n_modes: usize) -> DMatrix<f64> {
    let a = annihilator(p, n_modes);
    a.transpose() * a
}

/// Single-orbital model written out term by term; mode `site + n_sites * s`.
pub fn aim_matrix(model: &AimModel) -> DMatrix<f64> {
    let ns = model.n_sites();
    let nm = 2 * ns;
    let mu = match model.mu {
        OneBody::Scalar(m) => m,
        OneBody::Matrix(_) => panic!("reference only covers scalar levels"),
    };
    let u = match model.u {
        Interaction::Hubbard(u) => u,
        Interaction::Tensor(_) => panic!("reference only covers Hubbard U"),
    };
    assert_eq!(model.n_imp, 1);
    let ops: Vec<DMatrix<f64>> = (0..nm).map(|p| annihilator(p, nm)).collect();
    let d = 1usize << nm;
    let mut h = DMatrix::zeros(d, d);
    let up = |site: usize| site;
    let dn = |site: usize| site + ns;
    let spins: [&dyn Fn(usize) -> usize; 2] = [&up, &dn];
    for m in [up(0), dn(0)] {
        h += ops[m].transpose() * &ops[m] * mu;
    }
    h += (ops[up(0)].transpose() * &ops[up(0)]) * (ops[dn(0)].transpose() * &ops[dn(0)]) * u;
    for (i, row) in model.v.iter().enumerate() {
        for s in spins {
            let (f, imp) = (s(1 + i), s(0));
            h += (ops[f].transpose() * &ops[imp] + ops[imp].transpose() * &ops[f]) * row[0];
        }
    }
    for i in 0..model.n_bath {
        for j in 0..model.n_bath {
            for s in spins {
                h += ops[s(1 + i)].transpose() * &ops[s(1 + j)] * model.eps[i][j];
            }
        }
    }
    h
}

/// Lehmann sum over the full Fock space:
/// `G(z) = sum_mn (p_m + p_n) |<n|c+|m>|^2 / (z - E_n + E_m)`.
/// `beta = None` averages over the ground manifold.
pub fn lehmann_gf(
    h: &DMatrix<f64>,
    mode: usize,
    n_modes: usize,
    beta: Option<f64>,
    points: &[Complex64],
) -> Vec<Complex64> {
    let (e, v) = eigh(h);
    let (e, v) = (&e, &v);
    let cd = annihilator(mode, n_modes).transpose();
    let t = v.transpose() * cd * v;
    let e0 = e.min();
    let raw: Vec<f64> = e
        .iter()
        .map(|&x| match beta {
            Some(b) => (-b * (x - e0)).exp(),
            None => {
                if x - e0 <= 1e-6 {
                    1.0
                } else {
                    0.0
                }
            }
        })
        .collect();
    let zsum: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.iter().map(|x| x / zsum).collect();
    let d = e.len();
    let mut poles = Vec::new();
    for m in 0..d {
        for n in 0..d {
            let w = (p[m] + p[n]) * t[(n, m)] * t[(n, m)];
            if w > 1e-300 {
                poles.push((e[n] - e[m], w));
            }
        }
    }
    points
        .iter()
        .map(|&z| poles.iter().map(|&(x, w)| w / (z - x)).sum())
        .collect()
}

/// `((z - T)^-1)_00` of the tridiagonal matrix by a dense solve.
pub fn tridiagonal_resolvent(a: &[f64], b: &[f64], z: Complex64) -> Complex64 {
    let n = a.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = z - a[k];
        if k + 1 < n {
            m[(k, k + 1)] = c(-b[k], 0.0);
            m[(k + 1, k)] = c(-b[k], 0.0);
        }
    }
    let mut rhs = DVector::<Complex64>::zeros(n);
    rhs[0] = c(1.0, 0.0);
    m.lu().solve(&rhs).expect("regular point")[0]
}

/// Lanczos coefficients of `phi` read off the dense projection `Q^T h Q`,
/// where `Q` is a twice-orthogonalized Krylov basis.
pub fn krylov_tridiagonal(h: &DMatrix<f64>, phi: &[f64], depth: usize) -> (Vec<f64>, Vec<f64>) {
    let d = phi.len();
    let mut q: Vec<DVector<f64>> = vec![DVector::from_column_slice(phi).normalize()];
    while q.len() < depth {
        let mut w = h * q.last().unwrap();
        for _ in 0..2 {
            for qi in &q {
                let proj = qi.dot(&w);
                w -= qi * proj;
            }
        }
        if w.norm() < 1e-10 {
            break;
        }
        q.push(w.normalize());
    }
    let k = q.len();
    let basis = DMatrix::from_columns(&q);
    assert_eq!(basis.nrows(), d);
    let t = basis.transpose() * h * &basis;
    let a = (0..k).map(|i| t[(i, i)]).collect();
    let b = (0..k.saturating_sub(1))
        .map(|i| t[(i + 1, i)].abs())
        .collect();
    (a, b)
}

/// Semicircular local Green's function of half-bandwidth `d`, retarded branch.
pub fn semicircle(z: Complex64, d: f64) -> Complex64 {
    let s = (z * z - d * d).sqrt();
    let g = (z - s) * 2.0 / (d * d);
    if g.im * z.im > 0.0 {
        (z + s) * 2.0 / (d * d)
    } else {
        g
    }
}

pub fn random_complex_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    v
}

pub fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| c(x, 0.0))
}

pub fn max_rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm() / y.norm())
        .fold(0.0, f64::max)
}

/// Zero-temperature `G(z)` by solving `(z + E0 - H) x = c+|g>` and
/// `(z - E0 + H) y = c|g>` densely at every point, averaged over the ground
/// manifold (levels within 1e-6 of the lowest).
pub fn dense_resolvent_gf(
    h: &DMatrix<f64>,
    mode: usize,
    n_modes: usize,
    points: &[Complex64],
) -> Vec<Complex64> {
    let (e, v) = eigh(h);
    let e0 = e.min();
    let ground: Vec<DVector<f64>> = (0..e.len())
        .filter(|&k| e[k] - e0 <= 1e-6)
        .map(|k| v.column(k).into_owned())
        .collect();
    let c_op = annihilator(mode, n_modes);
    let d = h.nrows();
    let hc = to_complex(h);
    let id = DMatrix::<Complex64>::identity(d, d);
    let mut out = vec![c(0.0, 0.0); points.len()];
    for (k, &z) in points.iter().enumerate() {
        let particle = (&id * (z + e0) - &hc).lu();
        let hole = (&id * (z - e0) + &hc).lu();
        for g in &ground {
            let up = to_complex(&DMatrix::from_column_slice(
                d,
                1,
                (c_op.transpose() * g).as_slice(),
            ));
            let down = to_complex(&DMatrix::from_column_slice(d, 1, (&c_op * g).as_slice()));
            let x = particle.solve(&up).expect("regular point");
            let y = hole.solve(&down).expect("regular point");
            out[k] += (up.adjoint() * x)[(0, 0)] + (down.adjoint() * y)[(0, 0)];
        }
        out[k] /= ground.len() as f64;
    }
    out
}
