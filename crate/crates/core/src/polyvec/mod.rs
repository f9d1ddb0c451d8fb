//! Variational polyvector fields `W^var_k`: skewsymmetric arrays
//! `P_{i_0..i_k}(λ_0, ..., λ_k)` with entries in `V[λ_0..λ_k]/(∂ + λ_0 + ... + λ_k)`.
//!
//! Entries are kept in the normal form where `λ_k` has been eliminated, so an
//! entry of a degree `k` array is a [`LambdaPoly`] in `k` variables. Degree `-1`
//! holds a local functional and degree `-2` is the zero space.

mod brackets;
mod lambda;

pub use brackets::{
    box_product, bracket_functional, bracket_op_functional, bracket_vf_functional, bracket_vf_op,
    lambda_bracket, schouten, transitivity_probe, triple_bracket,
};
pub use lambda::LambdaPoly;

use std::fmt;

use crate::diffpoly::{DiffPoly, LocalFunctional};
use crate::error::{Error, Result};
use crate::matop::{MatDiffOp, OpPoly};
use crate::rational::{int, permutations, perm_sign, tuples, Rational};

/// An element of `W^var_k` over `R_ℓ`.
#[derive(Debug, Clone)]
pub struct PolyVector {
    ell: usize,
    degree: i32,
    entries: Vec<LambdaPoly>,
}

fn arity(degree: i32) -> usize {
    (degree + 1).max(0) as usize
}

impl PolyVector {
    /// The zero element of degree `degree ≥ -2`.
    pub fn zero(ell: usize, degree: i32) -> Self {
        assert!(degree >= -2, "degree must be at least -2");
        let count = if degree == -2 { 0 } else { ell.pow(arity(degree) as u32) };
        let nvars = degree.max(0) as usize;
        PolyVector {
            ell,
            degree,
            entries: vec![LambdaPoly::zero(nvars); count],
        }
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    /// Number of λ-variables in a normal-form entry.
    pub fn nvars(&self) -> usize {
        self.degree.max(0) as usize
    }

    /// All index tuples in storage order.
    pub fn index_tuples(&self) -> Vec<Vec<usize>> {
        if self.degree == -2 {
            return Vec::new();
        }
        tuples(self.ell, arity(self.degree))
    }

    fn position(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), arity(self.degree), "index tuple has wrong length");
        tuple.iter().fold(0, |acc, &i| {
            assert!(i < self.ell, "index out of range");
            acc * self.ell + i
        })
    }

    pub fn entry(&self, tuple: &[usize]) -> &LambdaPoly {
        &self.entries[self.position(tuple)]
    }

    /// Stores `raw` (in `k + 1` variables, or already in normal form) at `tuple`.
    pub fn set_raw(&mut self, tuple: &[usize], raw: &LambdaPoly) {
        let pos = self.position(tuple);
        self.entries[pos] = normalize_entry(self.degree, raw);
    }

    pub fn add_raw(&mut self, tuple: &[usize], raw: &LambdaPoly) {
        let pos = self.position(tuple);
        let nf = normalize_entry(self.degree, raw);
        self.entries[pos] += &nf;
    }

    /// Builds an array from raw entries in `k + 1` λ-variables; unlisted tuples are zero.
    pub fn from_raw(ell: usize, degree: i32, raw: impl IntoIterator<Item = (Vec<usize>, LambdaPoly)>) -> Self {
        let mut out = PolyVector::zero(ell, degree);
        for (t, p) in raw {
            out.add_raw(&t, &p);
        }
        out
    }

    pub fn from_functional(ell: usize, f: &LocalFunctional) -> Self {
        let mut out = PolyVector::zero(ell, -1);
        out.entries[0] = LambdaPoly::constant(0, f.representative().clone());
        out
    }

    pub fn from_vector(p: &[DiffPoly]) -> Self {
        let mut out = PolyVector::zero(p.len(), 0);
        for (i, pi) in p.iter().enumerate() {
            out.entries[i] = LambdaPoly::constant(0, pi.clone());
        }
        out
    }

    /// The array with `P_{ji}(λ_0) = H_{ij}(λ_0)`, without checking skewadjointness.
    pub fn from_operator_array(h: &MatDiffOp) -> Result<Self> {
        if !h.is_square() {
            return Err(Error::NotSquare {
                rows: h.rows(),
                cols: h.cols(),
            });
        }
        let mut out = PolyVector::zero(h.rows(), 1);
        for ((i, j), op) in h.entries() {
            let mut p = LambdaPoly::zero(1);
            for (m, c) in op.coefficients() {
                p.add_term(vec![m as u32], c);
            }
            let pos = out.position(&[j, i]);
            out.entries[pos] = p;
        }
        Ok(out)
    }

    /// The degree-one array of a skewadjoint operator.
    pub fn from_operator(h: &MatDiffOp) -> Result<Self> {
        if !h.is_skewadjoint()? {
            return Err(Error::NotSkewAdjoint);
        }
        PolyVector::from_operator_array(h)
    }

    pub fn to_functional(&self) -> Result<LocalFunctional> {
        self.require_degree(-1)?;
        Ok(LocalFunctional::new(self.entries[0].constant_coefficient()))
    }

    pub fn to_vector(&self) -> Result<Vec<DiffPoly>> {
        self.require_degree(0)?;
        Ok(self.entries.iter().map(LambdaPoly::constant_coefficient).collect())
    }

    pub fn to_operator(&self) -> Result<MatDiffOp> {
        self.require_degree(1)?;
        let mut h = MatDiffOp::zero(self.ell, self.ell);
        for i in 0..self.ell {
            for j in 0..self.ell {
                let p = self.entry(&[j, i]);
                *h.entry_mut(i, j) = OpPoly::from_coefficients(p.terms().map(|(e, c)| (e[0] as usize, c.clone())));
            }
        }
        Ok(h)
    }

    fn require_degree(&self, k: i32) -> Result<()> {
        if self.degree != k {
            return Err(Error::UnsupportedDegree(self.degree));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        if self.degree == -1 {
            return LocalFunctional::new(self.entries[0].constant_coefficient()).is_zero();
        }
        self.entries.iter().all(LambdaPoly::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> PolyVector {
        PolyVector {
            ell: self.ell,
            degree: self.degree,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn add(&self, other: &PolyVector) -> PolyVector {
        assert_eq!((self.ell, self.degree), (other.ell, other.degree), "shape mismatch");
        PolyVector {
            ell: self.ell,
            degree: self.degree,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &PolyVector) -> PolyVector {
        self.add(&other.scale(&int(-1)))
    }

    pub fn neg(&self) -> PolyVector {
        self.scale(&int(-1))
    }

    /// Applies `f` to every coefficient in `V` of every entry.
    pub fn map_coefficients(&self, mut f: impl FnMut(&DiffPoly) -> DiffPoly) -> PolyVector {
        PolyVector {
            ell: self.ell,
            degree: self.degree,
            entries: self.entries.iter().map(|e| e.map_coefficients(&mut f)).collect(),
        }
    }

    /// Highest differential order of any coefficient.
    pub fn coefficient_order(&self) -> Option<usize> {
        self.entries.iter().filter_map(LambdaPoly::coefficient_order).max()
    }

    /// Highest λ-exponent in the normal form.
    pub fn lambda_degree(&self) -> u32 {
        self.entries.iter().map(LambdaPoly::max_degree).max().unwrap_or(0)
    }

    pub fn is_quasiconstant(&self) -> bool {
        self.entries.iter().all(LambdaPoly::is_quasiconstant)
    }

    /// `σ·P` with `(σ·P)_{i}(λ) = P_{i∘σ}(λ∘σ)`.
    pub fn permuted(&self, sigma: &[usize]) -> PolyVector {
        let n = arity(self.degree);
        assert_eq!(sigma.len(), n, "permutation has wrong length");
        if self.degree <= 0 {
            return self.clone();
        }
        let mut out = PolyVector::zero(self.ell, self.degree);
        for t in self.index_tuples() {
            let src: Vec<usize> = sigma.iter().map(|&s| t[s]).collect();
            let raw = self.entry(&src).rename(n, &sigma[..n - 1]);
            out.set_raw(&t, &raw);
        }
        out
    }

    /// Whether every adjacent transposition acts by `-1`.
    pub fn is_skewsymmetric(&self) -> bool {
        let n = arity(self.degree);
        if n <= 1 {
            return true;
        }
        let minus = self.neg();
        (0..n - 1).all(|a| {
            let mut sigma: Vec<usize> = (0..n).collect();
            sigma.swap(a, a + 1);
            self.permuted(&sigma) == minus
        })
    }

    /// `(1/(k+1)!) Σ_σ sign(σ) σ·P`.
    pub fn skewsymmetrize(&self) -> PolyVector {
        let n = arity(self.degree);
        if n <= 1 {
            return self.clone();
        }
        let perms = permutations(n);
        let mut acc = PolyVector::zero(self.ell, self.degree);
        for sigma in &perms {
            let term = self.permuted(sigma);
            acc = if perm_sign(sigma) > 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc.scale(&Rational::new(1.into(), (perms.len() as i64).into()))
    }
}

/// Normal form of an entry of a degree `k` array given in `k + 1` variables
/// (or already in `k` variables).
pub fn normalize_entry(degree: i32, raw: &LambdaPoly) -> LambdaPoly {
    let k = degree.max(0) as usize;
    if degree == -1 {
        assert_eq!(raw.nvars(), 0, "functional payload carries no λ-variables");
        return raw.clone();
    }
    if raw.nvars() == k {
        return raw.clone();
    }
    assert_eq!(raw.nvars(), k + 1, "entry has wrong number of λ-variables");
    raw.eliminate_last()
}

impl PartialEq for PolyVector {
    fn eq(&self, other: &Self) -> bool {
        if self.ell != other.ell || self.degree != other.degree {
            return false;
        }
        if self.degree == -1 {
            return self.sub(other).is_zero();
        }
        self.entries == other.entries
    }
}

impl Eq for PolyVector {}

impl fmt::Display for PolyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.degree {
            -2 => write!(f, "0"),
            -1 => write!(f, "∫({})", self.entries[0]),
            _ => {
                let mut any = false;
                for t in self.index_tuples() {
                    let e = self.entry(&t);
                    if e.is_zero() {
                        continue;
                    }
                    let idx: Vec<String> = t.iter().map(|i| (i + 1).to_string()).collect();
                    writeln!(f, "[{}]: {}", idx.join(","), e)?;
                    any = true;
                }
                if !any {
                    writeln!(f, "0")?;
                }
                Ok(())
            }
        }
    }
}
