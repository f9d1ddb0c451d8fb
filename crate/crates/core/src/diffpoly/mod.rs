//! The algebra `R_ℓ` of differential polynomials in `u_i^(n)` over ℚ.
//!
//! A [`DiffPoly`] is a sparse map from monomials to nonzero rational
//! coefficients. Monomials keep their variables sorted by `(order, index)`, so
//! equality is structural and printing is deterministic.

pub(crate) mod calculus;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::rational::{fmt_rational, Rational};

pub use calculus::{DiffRing, LocalFunctional};

/// The generator `u_{index+1}^(order)`. Indices are zero based internally and
/// printed one based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffVar {
    pub order: usize,
    pub index: usize,
}

impl DiffVar {
    pub fn new(index: usize, order: usize) -> Self {
        DiffVar { order, index }
    }

    pub fn derivative(self) -> Self {
        DiffVar {
            order: self.order + 1,
            index: self.index,
        }
    }
}

impl fmt::Display for DiffVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.index + 1)?;
        match self.order {
            0 => Ok(()),
            n @ 1..=3 => write!(f, "{}", "'".repeat(n)),
            n => write!(f, "_{n}"),
        }
    }
}

/// A product of powers of distinct [`DiffVar`]s; the empty product is `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiffMonomial(Vec<(DiffVar, u32)>);

impl DiffMonomial {
    pub fn one() -> Self {
        DiffMonomial(Vec::new())
    }

    pub fn var(v: DiffVar) -> Self {
        DiffMonomial(vec![(v, 1)])
    }

    /// Builds a monomial from arbitrary factors, merging repeats and dropping zero exponents.
    pub fn from_factors(factors: impl IntoIterator<Item = (DiffVar, u32)>) -> Self {
        let mut map: BTreeMap<DiffVar, u32> = BTreeMap::new();
        for (v, e) in factors {
            *map.entry(v).or_insert(0) += e;
        }
        DiffMonomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn factors(&self) -> &[(DiffVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    /// Sum of derivative orders counted with multiplicity; `∂` raises it by one.
    pub fn weight(&self) -> usize {
        self.0.iter().map(|&(v, e)| v.order * e as usize).sum()
    }

    pub fn order(&self) -> Option<usize> {
        self.0.iter().map(|(v, _)| v.order).max()
    }

    pub fn exponent(&self, v: DiffVar) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(&v))
            .map(|pos| self.0[pos].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &DiffMonomial) -> DiffMonomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (0, 0);
        while a < self.0.len() && b < other.0.len() {
            match self.0[a].0.cmp(&other.0[b].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[a]);
                    a += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[b]);
                    b += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[a].0, self.0[a].1 + other.0[b].1));
                    a += 1;
                    b += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[a..]);
        out.extend_from_slice(&other.0[b..]);
        DiffMonomial(out)
    }

    /// Lowers the exponent of `v` by one; `None` if `v` does not occur.
    fn remove_one(&self, v: DiffVar) -> Option<DiffMonomial> {
        let pos = self.0.binary_search_by(|(w, _)| w.cmp(&v)).ok()?;
        let mut out = self.0.clone();
        if out[pos].1 == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some(DiffMonomial(out))
    }
}

impl fmt::Display for DiffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (n, (v, e)) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, "*")?;
            }
            write!(f, "{v}")?;
            if *e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// An element of `R_ℓ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<DiffMonomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, DiffMonomial::one())
    }

    pub fn term(c: Rational, m: DiffMonomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    /// `u_{index+1}^(order)` with zero based `index`.
    pub fn var(index: usize, order: usize) -> Self {
        Self::term(Rational::one(), DiffMonomial::var(DiffVar::new(index, order)))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (DiffMonomial, Rational)>) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: DiffMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(DiffMonomial::is_one)
    }

    /// The rational value if this polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_constant() {
            Some(self.constant_term())
        } else {
            None
        }
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&DiffMonomial::one())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn coefficient(&self, m: &DiffMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Maximal total degree (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(DiffMonomial::degree).max().unwrap_or(0)
    }

    /// Maximal derivative order among occurring variables, `None` for constants.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().filter_map(DiffMonomial::order).max()
    }

    /// One past the largest zero based variable index occurring (0 for constants).
    pub fn index_bound(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|(v, _)| v.index + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &DiffMonomial) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(n, a)| (n.mul(m), a.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// The total derivative `∂`, extending `u_i^(n) ↦ u_i^(n+1)` by the Leibniz rule.
    pub fn total_derivative(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            for &(v, e) in m.factors() {
                let rest = m.remove_one(v).expect("factor present");
                let dm = rest.mul(&DiffMonomial::var(v.derivative()));
                out.add_term(dm, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// `∂^n`.
    pub fn total_derivative_n(&self, n: usize) -> DiffPoly {
        let mut acc = self.clone();
        for _ in 0..n {
            if acc.is_zero() {
                break;
            }
            acc = acc.total_derivative();
        }
        acc
    }

    /// The formal partial derivative `∂f/∂v`.
    pub fn partial(&self, v: DiffVar) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e > 0 {
                let rest = m.remove_one(v).expect("factor present");
                out.add_term(rest, c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    /// Every variable occurring in some monomial, sorted.
    pub fn variables(&self) -> Vec<DiffVar> {
        let mut vs: Vec<DiffVar> = self
            .terms
            .keys()
            .flat_map(|m| m.factors().iter().map(|&(v, _)| v))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Splits into components that are homogeneous in both degree and weight.
    pub fn homogeneous_parts(&self) -> BTreeMap<(u32, usize), DiffPoly> {
        let mut parts: BTreeMap<(u32, usize), DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry((m.degree(), m.weight()))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        parts
    }
}

impl From<Rational> for DiffPoly {
    fn from(c: Rational) -> Self {
        DiffPoly::constant(c)
    }
}

impl fmt::Display for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            let negative = *c < Rational::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            match (n, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if m.is_one() {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;
    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self += &rhs;
        self
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;
    fn sub(mut self, rhs: DiffPoly) -> DiffPoly {
        self -= &rhs;
        self
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        DiffPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}
