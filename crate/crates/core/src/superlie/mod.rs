//! Finite dimensional graded Lie superalgebras: the Grassmann algebra `Λ(n)`, the
//! derivation algebra `W(n)`, the Poisson superalgebra `H̃(n, S)`, `so(n, S)` and
//! full prolongations.

mod iso;

pub use iso::{a_basis, iso_check_translation_case, AElem, IsoReport};

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, QMatrix};
use crate::rational::{binomial_u, fmt_rational, int, subsets, Rational};

/// An element of `Λ(n)`, stored as a map from sorted generator subsets (bit masks,
/// bit `i` for `ξ_{i+1}`) to coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grassmann {
    n: usize,
    terms: BTreeMap<u32, Rational>,
}

fn mask_of(set: &[usize]) -> u32 {
    set.iter().fold(0, |m, &i| m | (1 << i))
}

/// Sign of moving the word `a` past the word `b` into sorted position.
fn merge_sign(a: u32, b: u32) -> i32 {
    let mut count = 0u32;
    for j in 0..32 {
        if b & (1 << j) != 0 {
            count += (a >> (j + 1)).count_ones();
        }
    }
    if count.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl Grassmann {
    pub fn zero(n: usize) -> Self {
        assert!(n <= 31, "at most 31 generators");
        Grassmann {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Grassmann::monomial(n, &[], Rational::one())
    }

    /// `c ξ_{i_1} ... ξ_{i_s}` (zero based, any order).
    pub fn monomial(n: usize, word: &[usize], c: Rational) -> Self {
        let mut out = Grassmann::one_raw(n);
        for &i in word {
            assert!(i < n, "generator out of range");
            out = out.mul(&Grassmann::generator(n, i));
        }
        out.scale(&c)
    }

    fn one_raw(n: usize) -> Self {
        let mut g = Grassmann::zero(n);
        g.terms.insert(0, Rational::one());
        g
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut g = Grassmann::zero(n);
        g.terms.insert(1 << i, Rational::one());
        g
    }

    pub fn from_masks(n: usize, terms: impl IntoIterator<Item = (u32, Rational)>) -> Self {
        let mut g = Grassmann::zero(n);
        for (m, c) in terms {
            g.add_term(m, &c);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, mask: u32, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mask).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mask);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coefficient(&self, mask: u32) -> Rational {
        self.terms.get(&mask).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Grassmann::from_masks(self.n, self.terms.iter().map(|(&m, x)| (m, x * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "different numbers of generators");
        let mut out = Grassmann::zero(self.n);
        for (&a, x) in &self.terms {
            for (&b, y) in &other.terms {
                if a & b != 0 {
                    continue;
                }
                let s = merge_sign(a, b);
                let c = x * y;
                out.add_term(a | b, &if s > 0 { c } else { -c });
            }
        }
        out
    }

    /// Parity if homogeneous.
    pub fn parity(&self) -> Option<u32> {
        let mut p = self.terms.keys().map(|m| m.count_ones() % 2);
        let first = p.next()?;
        p.all(|x| x == first).then_some(first)
    }

    /// `deg = |word| - 2` if homogeneous.
    pub fn degree(&self) -> Option<i32> {
        let mut d = self.terms.keys().map(|m| m.count_ones() as i32 - 2);
        let first = d.next()?;
        d.all(|x| x == first).then_some(first)
    }

    /// Components of fixed word length.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, Grassmann> {
        let mut out: BTreeMap<u32, Grassmann> = BTreeMap::new();
        for (&m, c) in &self.terms {
            out.entry(m.count_ones()).or_insert_with(|| Grassmann::zero(self.n)).add_term(m, c);
        }
        out
    }

    /// Left derivative `∂/∂ξ_i`: `ξ_i` is anticommuted to the front and removed.
    pub fn left_derivative(&self, i: usize) -> Self {
        let bit = 1u32 << i;
        let mut out = Grassmann::zero(self.n);
        for (&m, c) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & (bit - 1)).count_ones();
            out.add_term(m & !bit, &if before.is_multiple_of(2) { c.clone() } else { -c.clone() });
        }
        out
    }

    /// Drops the scalar component (the projection `Λ(n) → H̃(n, S)`).
    pub fn without_scalar(&self) -> Self {
        let mut out = self.clone();
        out.terms.remove(&0);
        out
    }
}

impl fmt::Display for Grassmann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in &self.terms {
            let negative = c < &Rational::zero();
            let abs = if negative { -c } else { c.clone() };
            if first {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            first = false;
            let mut parts = Vec::new();
            if !abs.is_one() || m == 0 {
                parts.push(fmt_rational(&abs));
            }
            for i in 0..self.n {
                if m & (1 << i) != 0 {
                    parts.push(format!("x{}", i + 1));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

fn require_symmetric(s: &QMatrix) -> Result<()> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    if !s.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// `{f, g}_S = (-1)^{p(f)+1} Σ_{ij} s_ij ∂f/∂ξ_i ∂g/∂ξ_j`, extended bilinearly.
pub fn poisson_bracket(s: &QMatrix, f: &Grassmann, g: &Grassmann) -> Grassmann {
    assert_eq!(s.rows(), f.n(), "matrix size must match the number of generators");
    let n = f.n();
    let dg: Vec<Grassmann> = (0..n).map(|j| g.left_derivative(j)).collect();
    let mut out = Grassmann::zero(n);
    for (len, part) in f.homogeneous_parts() {
        let sign = if len % 2 == 0 { int(-1) } else { int(1) };
        for i in 0..n {
            let df = part.left_derivative(i);
            if df.is_zero() {
                continue;
            }
            for (j, dgj) in dg.iter().enumerate() {
                let sij = &s[(i, j)];
                if sij.is_zero() {
                    continue;
                }
                out = out.add(&df.mul(dgj).scale(&(sij * &sign)));
            }
        }
    }
    out
}

/// The bracket of `H̃(n, S)`: the Poisson bracket with the scalar component removed.
pub fn htilde_bracket(s: &QMatrix, f: &Grassmann, g: &Grassmann) -> Grassmann {
    poisson_bracket(s, &f.without_scalar(), &g.without_scalar()).without_scalar()
}

/// Monomial basis of `H̃_k(n, S)`: words of length `k + 2`.
pub fn htilde_basis(n: usize, k: i32) -> Vec<Grassmann> {
    if k < -1 || k + 2 > n as i32 {
        return Vec::new();
    }
    subsets(n, (k + 2) as usize)
        .into_iter()
        .map(|w| Grassmann::from_masks(n, [(mask_of(&w), Rational::one())]))
        .collect()
}

/// `dim H̃_k(n, S)` for `k = -1, ..., n - 2`.
pub fn htilde_dims(n: usize) -> Vec<usize> {
    (-1..=(n as i32 - 2)).map(|k| htilde_basis(n, k).len()).collect()
}

/// A derivation `Σ_j f_j ∂/∂ξ_j` of `Λ(n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuperDerivation {
    coeffs: Vec<Grassmann>,
}

impl SuperDerivation {
    pub fn zero(n: usize) -> Self {
        SuperDerivation {
            coeffs: vec![Grassmann::zero(n); n],
        }
    }

    pub fn new(coeffs: Vec<Grassmann>) -> Self {
        let n = coeffs.len();
        assert!(coeffs.iter().all(|c| c.n() == n), "coefficients must live in Λ(n)");
        SuperDerivation { coeffs }
    }

    /// `∂/∂ξ_j`.
    pub fn partial(n: usize, j: usize) -> Self {
        let mut d = SuperDerivation::zero(n);
        d.coeffs[j] = Grassmann::one(n);
        d
    }

    /// `X_A = Σ_{ij} A_{ji} ξ_i ∂/∂ξ_j`.
    pub fn linear(a: &QMatrix) -> Self {
        let n = a.rows();
        let mut d = SuperDerivation::zero(n);
        for j in 0..n {
            for i in 0..n {
                d.coeffs[j].add_term(1 << i, &a[(j, i)]);
            }
        }
        d
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[Grassmann] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Grassmann::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        SuperDerivation {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SuperDerivation {
            coeffs: self.coeffs.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// `X(g) = Σ_j f_j ∂g/∂ξ_j`.
    pub fn apply(&self, g: &Grassmann) -> Grassmann {
        let mut out = Grassmann::zero(self.n());
        for (j, f) in self.coeffs.iter().enumerate() {
            out = out.add(&f.mul(&g.left_derivative(j)));
        }
        out
    }

    /// Components by degree `|f_j| - 1`.
    pub fn homogeneous_parts(&self) -> BTreeMap<i32, SuperDerivation> {
        let n = self.n();
        let mut out: BTreeMap<i32, SuperDerivation> = BTreeMap::new();
        for (j, f) in self.coeffs.iter().enumerate() {
            for (len, part) in f.homogeneous_parts() {
                let d = out.entry(len as i32 - 1).or_insert_with(|| SuperDerivation::zero(n));
                d.coeffs[j] = d.coeffs[j].add(&part);
            }
        }
        out
    }

    /// Supercommutator, with components `X(g_j) - (-1)^{p(X)p(Y)} Y(f_j)`.
    pub fn bracket(&self, other: &Self) -> Self {
        let n = self.n();
        let mut out = SuperDerivation::zero(n);
        for (dx, x) in self.homogeneous_parts() {
            for (dy, y) in other.homogeneous_parts() {
                let odd = (dx.rem_euclid(2) * dy.rem_euclid(2)) == 1;
                let coeffs = (0..n)
                    .map(|j| {
                        let a = x.apply(&y.coeffs[j]);
                        let b = y.apply(&x.coeffs[j]);
                        if odd {
                            a.add(&b)
                        } else {
                            a.sub(&b)
                        }
                    })
                    .collect();
                out = out.add(&SuperDerivation { coeffs });
            }
        }
        out
    }

    /// Coordinates on the basis `ξ_I ∂/∂ξ_j`, `|I| = k + 1`, ordered by `j` then `I`.
    pub fn coordinates(&self, k: i32) -> Vec<Rational> {
        let n = self.n();
        let words = subsets(n, (k + 1) as usize);
        let mut v = Vec::with_capacity(n * words.len());
        for j in 0..n {
            for w in &words {
                v.push(self.coeffs[j].coefficient(mask_of(w)));
            }
        }
        v
    }

    pub fn from_coordinates(n: usize, k: i32, v: &[Rational]) -> Self {
        let words = subsets(n, (k + 1) as usize);
        let mut d = SuperDerivation::zero(n);
        for j in 0..n {
            for (w_i, w) in words.iter().enumerate() {
                d.coeffs[j].add_term(mask_of(w), &v[j * words.len() + w_i]);
            }
        }
        d
    }
}

/// `dim W_k(n) = n·binom(n, k+1)`.
pub fn w_dimension(n: usize, k: i32) -> usize {
    if k < -1 {
        return 0;
    }
    n * binomial_u(n, (k + 1) as usize) as usize
}

/// Basis of `so(n, S) = {A : A^T S + S A = 0, Tr A = 0}`.
pub fn so_basis(s: &QMatrix) -> Result<Vec<QMatrix>> {
    require_symmetric(s)?;
    let n = s.rows();
    let idx = |a: usize, b: usize| a * n + b;
    let mut sys: LinearSystem<(u8, usize, usize)> = LinearSystem::new(n * n);
    for r in 0..n {
        for c in 0..n {
            for m in 0..n {
                // (A^T S)_{rc} = Σ_m A_{mr} S_{mc};  (S A)_{rc} = Σ_m S_{rm} A_{mc}
                sys.add_coefficient((0, r, c), idx(m, r), &s[(m, c)]);
                sys.add_coefficient((0, r, c), idx(m, c), &s[(r, m)]);
            }
        }
        sys.add_coefficient((1, 0, 0), idx(r, r), &Rational::one());
    }
    Ok(sys
        .nullspace()
        .into_iter()
        .map(|v| {
            let mut a = QMatrix::zeros(n, n);
            for r in 0..n {
                for c in 0..n {
                    a[(r, c)] = v[idx(r, c)].clone();
                }
            }
            a
        })
        .collect())
}

fn skew_basis(n: usize) -> Vec<QMatrix> {
    subsets(n, 2)
        .into_iter()
        .map(|p| {
            let mut a = QMatrix::zeros(n, n);
            a[(p[0], p[1])] = Rational::one();
            a[(p[1], p[0])] = -Rational::one();
            a
        })
        .collect()
}

fn flatten(ms: &[QMatrix]) -> QMatrix {
    QMatrix::from_rows(
        ms.iter()
            .map(|m| (0..m.rows()).flat_map(|r| m.row(r).to_vec()).collect())
            .collect(),
    )
}

/// Whether `(v, A) ↦ (v, AS)` maps `H̃_{-1} ⊕ H̃_0` onto `ΠC^n ⊕ so(n, S)` bijectively.
pub fn va_map_bijective(s: &QMatrix) -> Result<bool> {
    let so = so_basis(s)?;
    let n = s.rows();
    let skew = skew_basis(n);
    if skew.is_empty() {
        return Ok(so.is_empty());
    }
    let images: Vec<QMatrix> = skew.iter().map(|a| a.mul(s)).collect();
    let rank = flatten(&images).rank();
    Ok(rank == skew.len() && so.len() == skew.len())
}

/// Degree-`k` components of the full prolongation of `(C^n, g)` inside `W(n)`, for
/// `k = -1, ..., k_max`, where `g` acts through `A ↦ X_A`.
#[derive(Debug, Clone)]
pub struct Prolongation {
    pub n: usize,
    pub components: Vec<Vec<SuperDerivation>>,
}

impl Prolongation {
    pub fn dims(&self) -> Vec<usize> {
        self.components.iter().map(Vec::len).collect()
    }
}

pub fn full_prolongation(n: usize, g: &[QMatrix], k_max: i32) -> Result<Prolongation> {
    if g.iter().any(|a| a.rows() != n || a.cols() != n) {
        return Err(Error::DimensionMismatch("matrices must be n x n".into()));
    }
    if !g.is_empty() && flatten(g).rank() != g.len() {
        return Err(Error::NotFaithful);
    }
    let minus: Vec<SuperDerivation> = (0..n).map(|j| SuperDerivation::partial(n, j)).collect();
    let mut components = vec![minus.clone(), g.iter().map(SuperDerivation::linear).collect::<Vec<_>>()];
    for k in 1..=k_max {
        let prev = components.last().unwrap().clone();
        let dim_w = w_dimension(n, k);
        if dim_w == 0 || prev.is_empty() {
            components.push(Vec::new());
            continue;
        }
        let np = prev.len();
        let unknowns = dim_w + n * np;
        let mut sys: LinearSystem<(usize, usize)> = LinearSystem::new(unknowns);
        let prev_coords: Vec<Vec<Rational>> = prev.iter().map(|x| x.coordinates(k - 1)).collect();
        for x in 0..dim_w {
            let mut e = vec![Rational::zero(); dim_w];
            e[x] = Rational::one();
            let basis = SuperDerivation::from_coordinates(n, k, &e);
            for (i, d) in minus.iter().enumerate() {
                let br = d.bracket(&basis).coordinates(k - 1);
                for (r, c) in br.iter().enumerate() {
                    sys.add_coefficient((i, r), x, c);
                }
            }
        }
        for i in 0..n {
            for (b, pc) in prev_coords.iter().enumerate() {
                for (r, c) in pc.iter().enumerate() {
                    sys.add_coefficient((i, r), dim_w + i * np + b, &-c);
                }
            }
        }
        let sols: Vec<Vec<Rational>> = sys.nullspace().into_iter().map(|v| v[..dim_w].to_vec()).collect();
        let (r, pivots) = QMatrix::from_rows(if sols.is_empty() { vec![vec![Rational::zero(); dim_w]] } else { sols }).rref();
        let comp = (0..pivots.len())
            .map(|row| SuperDerivation::from_coordinates(n, k, r.row(row)))
            .collect();
        components.push(comp);
    }
    components.truncate((k_max + 2).max(0) as usize);
    Ok(Prolongation { n, components })
}

/// `φ_S` for `S = [[0, 0], [0, T]]` with `T` nondegenerate; generator `0` is `η`.
///
/// `φ_S(f(ξ)) = {f, ·}_S` and `φ_S(f(ξ) η) = f ∂/∂η`.
pub fn phi_s(s: &QMatrix, x: &Grassmann) -> Result<SuperDerivation> {
    require_symmetric(s)?;
    let n = s.rows();
    if n == 0 || (0..n).any(|j| !s[(0, j)].is_zero()) {
        return Err(Error::Malformed("S must have a zero first row and column".into()));
    }
    let t = QMatrix::from_rows((1..n).map(|r| (1..n).map(|c| s[(r, c)].clone()).collect()).collect());
    if !t.is_invertible() {
        return Err(Error::DegenerateMatrix);
    }
    if x.n() != n {
        return Err(Error::DimensionMismatch("element has the wrong number of generators".into()));
    }
    let mut out = SuperDerivation::zero(n);
    let mut pure = Grassmann::zero(n);
    for (m, c) in x.without_scalar().terms() {
        if m & 1 == 0 {
            pure.add_term(m, c);
        } else {
            // η f = (-1)^{|f|} f η
            let rest = m & !1;
            let sign = if rest.count_ones() % 2 == 0 { c.clone() } else { -c.clone() };
            out.coeffs[0].add_term(rest, &sign);
        }
    }
    for (len, part) in pure.homogeneous_parts() {
        let sign = if len % 2 == 0 { int(-1) } else { int(1) };
        for i in 1..n {
            let df = part.left_derivative(i);
            if df.is_zero() {
                continue;
            }
            for j in 1..n {
                let sij = &s[(i, j)];
                if !sij.is_zero() {
                    out.coeffs[j] = out.coeffs[j].add(&df.scale(&(sij * &sign)));
                }
            }
        }
    }
    Ok(out)
}
