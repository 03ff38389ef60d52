//! Anderson impurity model parameters.
//!
//! ```text
//! H = sum mu[a s, b s'] c+_{a s} c_{b s'}
//!   + sum U[a b g d] c+_{a s} c+_{b s'} c_{g s'} c_{d s}
//!   + sum V[i a] (f+_{i s} c_{a s} + h.c.)
//!   + sum eps[i j] f+_{i s} f_{j s}
//! ```
//!
//! All energies are in eV and all parameters are real. Impurity sites come
//! first, bath sites after them; see [`crate::pauli::ModeIndex`] for the mode
//! layout.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-12;

/// Impurity one-body block: either a scalar level `mu` (applied to every
/// impurity spin-orbital) or a full `(2 n_imp) x (2 n_imp)` matrix indexed by
/// `alpha + n_imp * spin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneBody {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

/// Impurity interaction: either a Hubbard `U` (giving `U n_up n_down` on each
/// impurity orbital) or the full tensor `U[a][b][g][d]` flattened row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Interaction {
    Hubbard(f64),
    Tensor(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AimModel {
    pub n_imp: usize,
    pub n_bath: usize,
    pub mu: OneBody,
    #[serde(rename = "U")]
    pub u: Interaction,
    /// Bath-impurity hoppings, `n_bath` rows of `n_imp` entries.
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
    /// Bath one-body matrix, `n_bath x n_bath`, symmetric.
    pub eps: Vec<Vec<f64>>,
    #[serde(default = "default_units")]
    pub units: String,
}

fn default_units() -> String {
    "eV".to_string()
}

/// Second-quantized term list in flat mode indices.
#[derive(Debug, Clone, Default)]
pub struct FermionTerms {
    /// `coeff * c+_p c_q`
    pub one_body: Vec<(usize, usize, f64)>,
    /// `coeff * c+_p c+_q c_r c_s`
    pub two_body: Vec<([usize; 4], f64)>,
}

impl AimModel {
    /// Single impurity orbital with level `mu`, Hubbard `u`, hoppings `v[i]`
    /// and bath matrix `eps`.
    pub fn single_orbital(mu: f64, u: f64, v: Vec<f64>, eps: Vec<Vec<f64>>) -> Result<Self> {
        let model = Self {
            n_imp: 1,
            n_bath: v.len(),
            mu: OneBody::Scalar(mu),
            u: Interaction::Hubbard(u),
            v: v.into_iter().map(|x| vec![x]).collect(),
            eps,
            units: default_units(),
        };
        model.validate()?;
        Ok(model)
    }

    /// Star-geometry bath: diagonal `eps` with levels `levels`.
    pub fn star(mu: f64, u: f64, v: Vec<f64>, levels: &[f64]) -> Result<Self> {
        let n = levels.len();
        let eps = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { levels[i] } else { 0.0 })
                    .collect()
            })
            .collect();
        Self::single_orbital(mu, u, v, eps)
    }

    pub fn n_sites(&self) -> usize {
        self.n_imp + self.n_bath
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n_sites()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidModel(m));
        if self.n_imp == 0 {
            return bad("n_imp must be at least 1".into());
        }
        if self.units != "eV" {
            return bad(format!("unsupported units '{}', expected 'eV'", self.units));
        }
        let ni = self.n_imp;
        if let OneBody::Matrix(m) = &self.mu {
            if m.len() != 2 * ni || m.iter().any(|r| r.len() != 2 * ni) {
                return bad(format!("mu must be {0}x{0}", 2 * ni));
            }
            for a in 0..2 * ni {
                for b in 0..a {
                    if (m[a][b] - m[b][a]).abs() > SYMMETRY_TOL {
                        return Err(Error::NotHermitian(format!("mu[{a}][{b}] != mu[{b}][{a}]")));
                    }
                }
            }
        }
        if let Interaction::Tensor(t) = &self.u {
            if t.len() != ni.pow(4) {
                return bad(format!("U tensor must have {} entries", ni.pow(4)));
            }
            let idx = |a: usize, b: usize, g: usize, d: usize| ((a * ni + b) * ni + g) * ni + d;
            for a in 0..ni {
                for b in 0..ni {
                    for g in 0..ni {
                        for d in 0..ni {
                            if (t[idx(a, b, g, d)] - t[idx(d, g, b, a)]).abs() > SYMMETRY_TOL {
                                return Err(Error::NotHermitian(format!(
                                    "U[{a}{b}{g}{d}] != U[{d}{g}{b}{a}]"
                                )));
                            }
                        }
                    }
                }
            }
        }
        if self.v.len() != self.n_bath || self.v.iter().any(|r| r.len() != ni) {
            return bad(format!("V must be {}x{}", self.n_bath, ni));
        }
        if self.eps.len() != self.n_bath || self.eps.iter().any(|r| r.len() != self.n_bath) {
            return bad(format!("eps must be {0}x{0}", self.n_bath));
        }
        for i in 0..self.n_bath {
            for j in 0..i {
                if (self.eps[i][j] - self.eps[j][i]).abs() > SYMMETRY_TOL {
                    return Err(Error::NotHermitian(format!(
                        "eps[{i}][{j}] != eps[{j}][{i}]"
                    )));
                }
            }
        }
        let all_finite = self
            .v
            .iter()
            .flatten()
            .chain(self.eps.iter().flatten())
            .all(|x| x.is_finite());
        if !all_finite {
            return bad("non-finite parameter".into());
        }
        Ok(())
    }

    /// Impurity one-body matrix over spin-orbitals `alpha + n_imp * spin`.
    pub fn mu_matrix(&self) -> Vec<Vec<f64>> {
        let n = 2 * self.n_imp;
        match &self.mu {
            OneBody::Scalar(m) => (0..n)
                .map(|a| (0..n).map(|b| if a == b { *m } else { 0.0 }).collect())
                .collect(),
            OneBody::Matrix(m) => m.clone(),
        }
    }

    /// Interaction tensor `U[a][b][g][d]` flattened row-major.
    pub fn u_tensor(&self) -> Vec<f64> {
        let ni = self.n_imp;
        match &self.u {
            Interaction::Tensor(t) => t.clone(),
            Interaction::Hubbard(u) => {
                // Both spin orderings appear in the sum, hence U/2.
                let mut t = vec![0.0; ni.pow(4)];
                for a in 0..ni {
                    t[((a * ni + a) * ni + a) * ni + a] = u / 2.0;
                }
                t
            }
        }
    }

    /// Scalar Hubbard U, if the interaction is of that form.
    pub fn hubbard_u(&self) -> Option<f64> {
        match self.u {
            Interaction::Hubbard(u) => Some(u),
            Interaction::Tensor(_) => None,
        }
    }

    /// Flat mode index of `site` with spin index `s` (0 = up).
    pub fn mode(&self, site: usize, s: usize) -> usize {
        site + self.n_sites() * s
    }

    /// All terms of the Hamiltonian in flat mode indices.
    pub fn fermion_terms(&self) -> FermionTerms {
        let ni = self.n_imp;
        let mut terms = FermionTerms::default();
        let mu = self.mu_matrix();
        for (a, row) in mu.iter().enumerate() {
            for (b, &m) in row.iter().enumerate() {
                if m != 0.0 {
                    let p = self.mode(a % ni, a / ni);
                    let q = self.mode(b % ni, b / ni);
                    terms.one_body.push((p, q, m));
                }
            }
        }
        let u = self.u_tensor();
        for a in 0..ni {
            for b in 0..ni {
                for g in 0..ni {
                    for d in 0..ni {
                        let val = u[((a * ni + b) * ni + g) * ni + d];
                        if val == 0.0 {
                            continue;
                        }
                        for s in 0..2 {
                            for sp in 0..2 {
                                let ops = [
                                    self.mode(a, s),
                                    self.mode(b, sp),
                                    self.mode(g, sp),
                                    self.mode(d, s),
                                ];
                                terms.two_body.push((ops, val));
                            }
                        }
                    }
                }
            }
        }
        for (i, row) in self.v.iter().enumerate() {
            for (a, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                for s in 0..2 {
                    let f = self.mode(ni + i, s);
                    let c = self.mode(a, s);
                    terms.one_body.push((f, c, v));
                    terms.one_body.push((c, f, v));
                }
            }
        }
        for (i, row) in self.eps.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e == 0.0 {
                    continue;
                }
                for s in 0..2 {
                    terms
                        .one_body
                        .push((self.mode(ni + i, s), self.mode(ni + j, s), e));
                }
            }
        }
        terms
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: AimModel = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }
}

/// Random single-orbital model with three bath sites, drawn from
/// `V in [0,3]`, symmetric `eps_ij in [-3,3]`, `U in {4,8,12}` and
/// `mu in {U/2-2, U/2, -U/2+2}`.
pub fn random_aim(seed: u64) -> AimModel {
    random_aim_with_bath(seed, 3)
}

pub fn random_aim_with_bath(seed: u64, n_bath: usize) -> AimModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_aim_from_rng(&mut rng, n_bath)
}

pub fn random_aim_from_rng<R: Rng>(rng: &mut R, n_bath: usize) -> AimModel {
    let u = [4.0, 8.0, 12.0][rng.gen_range(0..3)];
    let mu = [u / 2.0 - 2.0, u / 2.0, -u / 2.0 + 2.0][rng.gen_range(0..3)];
    let v: Vec<f64> = (0..n_bath).map(|_| rng.gen_range(0.0..=3.0)).collect();
    let mut eps = vec![vec![0.0; n_bath]; n_bath];
    for i in 0..n_bath {
        for j in i..n_bath {
            let e = rng.gen_range(-3.0..=3.0);
            eps[i][j] = e;
            eps[j][i] = e;
        }
    }
    AimModel::single_orbital(mu, u, v, eps).expect("random model is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_model_is_deterministic() {
        assert_eq!(random_aim(7), random_aim(7));
        assert_ne!(random_aim(7), random_aim(8));
    }

    #[test]
    fn random_models_respect_ranges() {
        for seed in 0..1000 {
            let m = random_aim(seed);
            assert_eq!((m.n_imp, m.n_bath), (1, 3));
            let u = m.hubbard_u().unwrap();
            assert!([4.0, 8.0, 12.0].contains(&u));
            let OneBody::Scalar(mu) = m.mu else { panic!() };
            assert!([u / 2.0 - 2.0, u / 2.0, -u / 2.0 + 2.0].contains(&mu));
            assert!(m.v.iter().flatten().all(|&v| (0.0..=3.0).contains(&v)));
            assert!(m.eps.iter().flatten().all(|&e| e.abs() <= 3.0));
        }
    }

    #[test]
    fn asymmetric_bath_is_rejected() {
        let err = AimModel::single_orbital(
            0.0,
            1.0,
            vec![1.0, 1.0],
            vec![vec![0.0, 1.0], vec![0.5, 0.0]],
        );
        assert!(matches!(err, Err(Error::NotHermitian(_))));
    }

    #[test]
    fn json_round_trip_uses_explicit_field_names() {
        let m = random_aim(3);
        let s = m.to_json().unwrap();
        for key in [
            "\"n_imp\"",
            "\"n_bath\"",
            "\"mu\"",
            "\"U\"",
            "\"V\"",
            "\"eps\"",
            "\"eV\"",
        ] {
            assert!(s.contains(key), "{key} missing from {s}");
        }
        assert_eq!(AimModel::from_json(&s).unwrap(), m);
    }

    #[test]
    fn json_missing_field_is_an_error() {
        let s = r#"{"n_imp": 1, "n_bath": 0, "mu": 0.0, "V": [], "eps": []}"#;
        assert!(AimModel::from_json(s).is_err());
    }

    #[test]
    fn hubbard_tensor_halves_u() {
        let m = AimModel::single_orbital(0.0, 4.0, vec![], vec![]).unwrap();
        assert_eq!(m.u_tensor(), vec![2.0]);
        let t = m.fermion_terms();
        // U/2 times the two spin orderings; same-spin orderings vanish.
        assert_eq!(t.two_body.len(), 4);
    }
}
