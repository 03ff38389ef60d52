//! Pauli-string algebra.
//!
//! A [`PauliTerm`] is a tensor product of single-qubit Pauli operators with a
//! complex coefficient; a [`PauliSum`] is a linear combination of them. Qubit
//! `q` corresponds to bit `q` of a computational-basis index (qubit 0 is the
//! least significant bit).
//!
//! Internally each string is stored in symplectic form: bit `q` of `x` is set
//! for X or Y on qubit `q`, bit `q` of `z` for Z or Y.

mod fermion;
mod hamiltonian;

pub use fermion::{
    hopping, jordan_wigner, ladder_product, occupation, FermionOperator, ModeIndex, Spin,
};
pub use hamiltonian::{fermion_hamiltonian_to_pauli, number_operator, sz_operator};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default coefficient tolerance used by [`PauliSum::simplify`].
pub const SIMPLIFY_TOL: f64 = 1e-12;

/// Largest register a Pauli string can address.
pub const MAX_QUBITS: usize = 64;

/// A single-qubit Pauli operator. The derived order I < X < Y < Z is the
/// canonical lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    /// Product `self * other` as `(phase, pauli)` with phase in {1, i, -1, -i}.
    pub fn mul(self, other: Pauli) -> (Complex64, Pauli) {
        use Pauli::*;
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        match (self, other) {
            (I, p) | (p, I) => (one, p),
            (a, b) if a == b => (one, I),
            (X, Y) => (i, Z),
            (Y, X) => (-i, Z),
            (Y, Z) => (i, X),
            (Z, Y) => (-i, X),
            (Z, X) => (i, Y),
            (X, Z) => (-i, Y),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// Coefficient-free Pauli string on a fixed number of qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x: u64,
    z: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            x: 0,
            z: 0,
        }
    }

    pub fn from_ops(ops: &[Pauli]) -> Result<Self> {
        if ops.len() > MAX_QUBITS {
            return Err(Error::TooLarge {
                n_qubits: ops.len(),
                limit: MAX_QUBITS,
            });
        }
        let mut s = Self::identity(ops.len());
        for (q, p) in ops.iter().enumerate() {
            let (xb, zb) = p.bits();
            s.x |= (xb as u64) << q;
            s.z |= (zb as u64) << q;
        }
        Ok(s)
    }

    /// Single non-identity operator `p` on qubit `q`.
    pub fn single(n_qubits: usize, q: usize, p: Pauli) -> Result<Self> {
        if q >= n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        let mut ops = vec![Pauli::I; n_qubits];
        ops[q] = p;
        Self::from_ops(&ops)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1)
    }

    pub fn ops(&self) -> Vec<Pauli> {
        (0..self.n_qubits).map(|q| self.get(q)).collect()
    }

    /// Bit mask of qubits flipped by the string (X or Y).
    pub fn x_mask(&self) -> u64 {
        self.x
    }

    /// Bit mask of qubits carrying a Z component (Z or Y).
    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of Y factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Weight (number of non-identity factors).
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Action on a basis state: `P|b> = phase |b'>`.
    #[inline]
    pub fn apply_to_basis(&self, b: usize) -> (Complex64, usize) {
        let bb = b as u64;
        let mut phase = match self.y_count() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
        if (bb & self.z).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (phase, (bb ^ self.x) as usize)
    }

    /// Whether `self` and `other` commute.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    fn product(&self, other: &PauliString) -> (Complex64, PauliString) {
        let mut phase = Complex64::new(1.0, 0.0);
        for q in 0..self.n_qubits {
            let (ph, _) = self.get(q).mul(other.get(q));
            phase *= ph;
        }
        let s = PauliString {
            n_qubits: self.n_qubits,
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        (phase, s)
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_qubits.cmp(&other.n_qubits).then_with(|| {
            for q in 0..self.n_qubits {
                match self.get(q).cmp(&other.get(q)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.get(q))?;
        }
        Ok(())
    }
}

/// A Pauli string with a complex coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coeff: Complex64,
}

impl PauliTerm {
    pub fn new(ops: &[Pauli], coeff: Complex64) -> Result<Self> {
        Ok(Self {
            string: PauliString::from_ops(ops)?,
            coeff,
        })
    }

    pub fn real(ops: &[Pauli], coeff: f64) -> Result<Self> {
        Self::new(ops, Complex64::new(coeff, 0.0))
    }

    pub fn identity(n_qubits: usize, coeff: Complex64) -> Self {
        Self {
            string: PauliString::identity(n_qubits),
            coeff,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.string.n_qubits
    }

    pub fn ops(&self) -> Vec<Pauli> {
        self.string.ops()
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:+.6}{:+.6}i) {}",
            self.coeff.re, self.coeff.im, self.string
        )
    }
}

/// Operator product of two terms, phase absorbed into the coefficient.
pub fn pauli_mul(a: &PauliTerm, b: &PauliTerm) -> Result<PauliTerm> {
    if a.n_qubits() != b.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: a.n_qubits(),
            found: b.n_qubits(),
        });
    }
    let (phase, string) = a.string.product(&b.string);
    Ok(PauliTerm {
        string,
        coeff: a.coeff * b.coeff * phase,
    })
}

/// Linear combination of Pauli strings on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: vec![PauliTerm::identity(n_qubits, Complex64::new(1.0, 0.0))],
        }
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: t.n_qubits(),
            });
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: PauliTerm) -> Result<()> {
        if term.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: term.n_qubits(),
            });
        }
        self.terms.push(term);
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
        .simplify(SIMPLIFY_TOL))
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                string: t.string,
                coeff: t.coeff * c,
            })
            .collect();
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    /// Operator product `self * other`, simplified.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_same(other)?;
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let (phase, s) = a.string.product(&b.string);
                *acc.entry(s).or_default() += a.coeff * b.coeff * phase;
            }
        }
        Ok(Self::from_map(self.n_qubits, acc, SIMPLIFY_TOL))
    }

    /// Hermitian conjugate. Pauli strings are hermitian, so only the
    /// coefficients are conjugated.
    pub fn dagger(&self) -> PauliSum {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                string: t.string,
                coeff: t.coeff.conj(),
            })
            .collect();
        PauliSum {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    /// Merge identical strings, drop terms with `|coeff| <= tol`, and sort
    /// the remainder lexicographically.
    pub fn simplify(&self, tol: f64) -> PauliSum {
        let mut acc: BTreeMap<PauliString, Complex64> = BTreeMap::new();
        for t in &self.terms {
            *acc.entry(t.string).or_default() += t.coeff;
        }
        Self::from_map(self.n_qubits, acc, tol)
    }

    fn from_map(n_qubits: usize, acc: BTreeMap<PauliString, Complex64>, tol: f64) -> PauliSum {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(string, coeff)| PauliTerm { string, coeff })
            .collect();
        PauliSum { n_qubits, terms }
    }

    /// True when every coefficient of the simplified sum is real within `tol`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.simplify(0.0)
            .terms
            .iter()
            .all(|t| t.coeff.im.abs() <= tol)
    }

    /// Sum of `|coeff|` over non-identity terms; bounds the spectral radius of
    /// the traceless part.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| !t.string.is_identity())
            .map(|t| t.coeff.norm())
            .sum()
    }

    /// Coefficient of the identity string (after merging).
    pub fn identity_coefficient(&self) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.string.is_identity())
            .map(|t| t.coeff)
            .sum()
    }

    fn check_same(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        Ok(())
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}
