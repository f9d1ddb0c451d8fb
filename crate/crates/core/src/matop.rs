//! Scalar and matrix differential operators `L(∂) = Σ_n l_n ∂^n` with coefficients
//! in `V` written to the left of the powers of `∂`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{binomial, Rational};

/// A scalar differential operator with left coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OpPoly {
    coeffs: BTreeMap<usize, DiffPoly>,
}

impl OpPoly {
    pub fn zero() -> Self {
        OpPoly::default()
    }

    pub fn one() -> Self {
        OpPoly::monomial(DiffPoly::one(), 0)
    }

    /// The operator `∂`.
    pub fn d() -> Self {
        OpPoly::monomial(DiffPoly::one(), 1)
    }

    /// `c ∂^m`.
    pub fn monomial(c: DiffPoly, m: usize) -> Self {
        let mut op = OpPoly::zero();
        op.add_coefficient(m, &c);
        op
    }

    pub fn constant(c: Rational) -> Self {
        OpPoly::monomial(DiffPoly::constant(c), 0)
    }

    pub fn from_coefficients(coeffs: impl IntoIterator<Item = (usize, DiffPoly)>) -> Self {
        let mut op = OpPoly::zero();
        for (m, c) in coeffs {
            op.add_coefficient(m, &c);
        }
        op
    }

    pub fn add_coefficient(&mut self, m: usize, c: &DiffPoly) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(m).or_default();
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (usize, &DiffPoly)> {
        self.coeffs.iter().map(|(&m, c)| (m, c))
    }

    pub fn coefficient(&self, m: usize) -> DiffPoly {
        self.coeffs.get(&m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest power of `∂`; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_quasiconstant(&self) -> bool {
        self.coeffs.values().all(DiffPoly::is_constant)
    }

    /// Largest index among variables appearing in the coefficients.
    pub fn index_bound(&self) -> usize {
        self.coeffs.values().map(DiffPoly::index_bound).max().unwrap_or(0)
    }

    /// Largest differential order among variables appearing in the coefficients.
    pub fn coefficient_order(&self) -> Option<usize> {
        self.coeffs.values().filter_map(DiffPoly::order).max()
    }

    pub fn scale(&self, c: &Rational) -> OpPoly {
        if c.is_zero() {
            return OpPoly::zero();
        }
        OpPoly {
            coeffs: self.coeffs.iter().map(|(&m, p)| (m, p.scale(c))).collect(),
        }
    }

    /// `f ∘ L`.
    pub fn mul_left(&self, f: &DiffPoly) -> OpPoly {
        OpPoly::from_coefficients(self.coeffs.iter().map(|(&m, p)| (m, f * p)))
    }

    /// `L(f) = Σ_m l_m ∂^m f`.
    pub fn apply(&self, f: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (&m, c) in &self.coeffs {
            out += &(c * &f.total_derivative_n(m));
        }
        out
    }

    /// `∂^m ∘ f = Σ_k C(m,k) f^(k) ∂^{m-k}`.
    fn d_pow_times(m: usize, f: &DiffPoly) -> OpPoly {
        let mut out = OpPoly::zero();
        let mut fk = f.clone();
        for k in 0..=m {
            out.add_coefficient(m - k, &fk.scale(&binomial(m, k)));
            fk = fk.total_derivative();
        }
        out
    }

    /// Composition `self ∘ other`.
    pub fn compose(&self, other: &OpPoly) -> OpPoly {
        let mut out = OpPoly::zero();
        for (&m, a) in &self.coeffs {
            for (&n, b) in &other.coeffs {
                for (p, c) in Self::d_pow_times(m, b).coeffs {
                    out.add_coefficient(p + n, &(a * &c));
                }
            }
        }
        out
    }

    /// `L^* = Σ_n (-∂)^n ∘ l_n`.
    pub fn adjoint(&self) -> OpPoly {
        let mut out = OpPoly::zero();
        for (&n, a) in &self.coeffs {
            let term = Self::d_pow_times(n, a);
            let term = if n % 2 == 1 { -term } else { term };
            out = &out + &term;
        }
        out
    }

    /// Symbol `L(λ)`: coefficient of `λ^m` is `l_m`.
    pub fn symbol(&self) -> &BTreeMap<usize, DiffPoly> {
        &self.coeffs
    }
}

impl Add<&OpPoly> for &OpPoly {
    type Output = OpPoly;
    fn add(self, rhs: &OpPoly) -> OpPoly {
        let mut out = self.clone();
        for (&m, c) in &rhs.coeffs {
            out.add_coefficient(m, c);
        }
        out
    }
}

impl Sub<&OpPoly> for &OpPoly {
    type Output = OpPoly;
    fn sub(self, rhs: &OpPoly) -> OpPoly {
        self + &(-rhs)
    }
}

impl Neg for &OpPoly {
    type Output = OpPoly;
    fn neg(self) -> OpPoly {
        OpPoly {
            coeffs: self.coeffs.iter().map(|(&m, c)| (m, -c)).collect(),
        }
    }
}

impl Neg for OpPoly {
    type Output = OpPoly;
    fn neg(self) -> OpPoly {
        -&self
    }
}

impl fmt::Display for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&m, c) in self.coeffs.iter().rev() {
            for (mono, q) in c.terms() {
                let negative = q < &Rational::zero();
                let abs = if negative { -q } else { q.clone() };
                if first {
                    if negative {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {} ", if negative { "-" } else { "+" })?;
                }
                first = false;
                let mut factors: Vec<String> = Vec::new();
                if !abs.is_one() || (mono.is_one() && m == 0) {
                    factors.push(crate::rational::fmt_rational(&abs));
                }
                if !mono.is_one() {
                    factors.push(mono.to_string());
                }
                match m {
                    0 => {}
                    1 => factors.push("D".into()),
                    _ => factors.push(format!("D^{m}")),
                }
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// An `r × c` matrix of differential operators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatDiffOp {
    rows: usize,
    cols: usize,
    entries: Vec<OpPoly>,
}

impl MatDiffOp {
    pub fn zero(rows: usize, cols: usize) -> Self {
        MatDiffOp {
            rows,
            cols,
            entries: vec![OpPoly::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut op = MatDiffOp::zero(n, n);
        for i in 0..n {
            *op.entry_mut(i, i) = OpPoly::one();
        }
        op
    }

    /// A `1 × 1` operator.
    pub fn scalar(l: OpPoly) -> Self {
        MatDiffOp {
            rows: 1,
            cols: 1,
            entries: vec![l],
        }
    }

    pub fn from_rows(rows: Vec<Vec<OpPoly>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged operator rows".into()));
        }
        Ok(MatDiffOp {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// `Σ_n M_n ∂^n` for rational matrices `M_0, M_1, ...` of equal shape.
    pub fn from_constant_coefficients(mats: &[QMatrix]) -> Result<Self> {
        let first = mats.first().ok_or_else(|| Error::Malformed("no coefficient matrices".into()))?;
        let (r, c) = (first.rows(), first.cols());
        let mut op = MatDiffOp::zero(r, c);
        for (n, m) in mats.iter().enumerate() {
            if m.rows() != r || m.cols() != c {
                return Err(Error::DimensionMismatch("coefficient matrices differ in shape".into()));
            }
            for i in 0..r {
                for j in 0..c {
                    op.entry_mut(i, j).add_coefficient(n, &DiffPoly::constant(m[(i, j)].clone()));
                }
            }
        }
        Ok(op)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &OpPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut OpPoly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(OpPoly::is_zero)
    }

    /// Maximal order among entries; `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.entries.iter().filter_map(OpPoly::order).max()
    }

    pub fn index_bound(&self) -> usize {
        self.entries.iter().map(OpPoly::index_bound).max().unwrap_or(0)
    }

    pub fn coefficient_order(&self) -> Option<usize> {
        self.entries.iter().filter_map(OpPoly::coefficient_order).max()
    }

    pub fn scale(&self, c: &Rational) -> MatDiffOp {
        MatDiffOp {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    pub fn apply(&self, f: &[DiffPoly]) -> Result<Vec<DiffPoly>> {
        if f.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "operator has {} columns, vector has {} entries",
                self.cols,
                f.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = DiffPoly::zero();
                for (j, fj) in f.iter().enumerate() {
                    acc += &self.entry(i, j).apply(fj);
                }
                acc
            })
            .collect())
    }

    pub fn compose(&self, other: &MatDiffOp) -> Result<MatDiffOp> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose {}x{} with {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = MatDiffOp::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = OpPoly::zero();
                for k in 0..self.cols {
                    acc = &acc + &self.entry(i, k).compose(other.entry(k, j));
                }
                *out.entry_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    /// `(L^*)_{ij} = (L_{ji})^*`.
    pub fn adjoint(&self) -> MatDiffOp {
        let mut out = MatDiffOp::zero(self.cols, self.rows);
        for i in 0..self.cols {
            for j in 0..self.rows {
                *out.entry_mut(i, j) = self.entry(j, i).adjoint();
            }
        }
        out
    }

    pub fn is_skewadjoint(&self) -> Result<bool> {
        self.require_square()?;
        Ok(self.adjoint() == -self)
    }

    pub fn is_quasiconstant(&self) -> bool {
        self.entries.iter().all(OpPoly::is_quasiconstant)
    }

    fn require_square(&self) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Rational matrix of the `∂^n` coefficients, if they are all constant.
    pub fn coefficient_matrix(&self, n: usize) -> Option<QMatrix> {
        let mut m = QMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self.entry(i, j).coefficient(n).as_constant()?;
            }
        }
        Some(m)
    }

    /// `K_0`, the constant-term matrix of a quasiconstant operator.
    pub fn constant_term_matrix(&self) -> Result<QMatrix> {
        self.coefficient_matrix(0).ok_or(Error::NotQuasiconstant)
    }

    /// `(K_N, invertible)` for a quasiconstant square operator of order `N`.
    pub fn leading_coefficient(&self) -> Result<(QMatrix, bool)> {
        self.require_square()?;
        let n = self.order().unwrap_or(0);
        let m = self.coefficient_matrix(n).ok_or(Error::NotQuasiconstant)?;
        let invertible = m.is_invertible();
        Ok((m, invertible))
    }

    /// `[M_0, ..., M_N]` for a quasiconstant operator.
    pub fn constant_coefficients(&self) -> Result<Vec<QMatrix>> {
        let n = self.order().unwrap_or(0);
        (0..=n)
            .map(|k| self.coefficient_matrix(k).ok_or(Error::NotQuasiconstant))
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &OpPoly)> {
        let cols = self.cols;
        self.entries.iter().enumerate().map(move |(k, e)| ((k / cols, k % cols), e))
    }
}

impl Add<&MatDiffOp> for &MatDiffOp {
    type Output = MatDiffOp;
    fn add(self, rhs: &MatDiffOp) -> MatDiffOp {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        MatDiffOp {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub<&MatDiffOp> for &MatDiffOp {
    type Output = MatDiffOp;
    fn sub(self, rhs: &MatDiffOp) -> MatDiffOp {
        self + &(-rhs)
    }
}

impl Neg for &MatDiffOp {
    type Output = MatDiffOp;
    fn neg(self) -> MatDiffOp {
        MatDiffOp {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|e| -e).collect(),
        }
    }
}

impl fmt::Display for MatDiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 1 && self.cols == 1 {
            return write!(f, "{}", self.entries[0]);
        }
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use proptest::prelude::*;

    fn u(n: usize) -> DiffPoly {
        DiffPoly::var(0, n)
    }

    fn kdv() -> OpPoly {
        OpPoly::from_coefficients([(3, DiffPoly::one()), (1, u(0).scale(&int(2))), (0, u(1))])
    }

    #[test]
    fn apply_examples() {
        let d = MatDiffOp::scalar(OpPoly::d());
        assert_eq!(d.apply(&[u(0)]).unwrap(), vec![u(1)]);
        let f = vec![u(0), DiffPoly::var(1, 2)];
        assert_eq!(MatDiffOp::identity(2).apply(&f).unwrap(), f);
        let expected = &u(3) + &(&u(0) * &u(1)).scale(&int(3));
        assert_eq!(kdv().apply(&u(0)), expected);
        assert!(d.apply(&f).is_err());
    }

    #[test]
    fn compose_examples() {
        let d = OpPoly::d();
        let expected = &OpPoly::monomial(u(0), 1) + &OpPoly::monomial(u(1), 0);
        assert_eq!(d.compose(&OpPoly::monomial(u(0), 0)), expected);
        assert_eq!(d.compose(&d), OpPoly::monomial(DiffPoly::one(), 2));
        let a = MatDiffOp::scalar(kdv());
        assert_eq!(a.compose(&MatDiffOp::identity(1)).unwrap(), a);
        assert!(a.compose(&MatDiffOp::identity(2)).is_err());
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(OpPoly::d().adjoint(), -OpPoly::d());
        let expected = -(&OpPoly::monomial(u(0), 1) + &OpPoly::monomial(u(1), 0));
        assert_eq!(OpPoly::monomial(u(0), 1).adjoint(), expected);
        assert_eq!(kdv().adjoint(), -kdv());
    }

    #[test]
    fn classification_examples() {
        let d = MatDiffOp::scalar(OpPoly::d());
        assert!(d.is_skewadjoint().unwrap());
        assert!(d.is_quasiconstant());
        let (lead, inv) = d.leading_coefficient().unwrap();
        assert_eq!(lead, QMatrix::identity(1));
        assert!(inv);

        let k = MatDiffOp::scalar(kdv());
        assert!(k.is_skewadjoint().unwrap());
        assert!(!k.is_quasiconstant());

        let s = QMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        let sd = MatDiffOp::from_constant_coefficients(&[QMatrix::zeros(2, 2), s.clone()]).unwrap();
        assert!(sd.is_skewadjoint().unwrap());
        assert_eq!(sd.leading_coefficient().unwrap(), (s, true));

        let rect = MatDiffOp::zero(1, 2);
        assert_eq!(rect.is_skewadjoint(), Err(Error::NotSquare { rows: 1, cols: 2 }));
        assert!(rect.leading_coefficient().is_err());
    }

    #[test]
    fn display_round_shape() {
        assert_eq!(kdv().to_string(), "D^3 + 2*u1*D + u1'");
        assert_eq!(OpPoly::zero().to_string(), "0");
        assert_eq!((-OpPoly::d()).to_string(), "-D");
        assert_eq!(OpPoly::constant(int(3)).to_string(), "3");
    }

    fn arb_op() -> impl Strategy<Value = OpPoly> {
        let term = (0usize..3, 0usize..2, 0usize..3, 0u32..3, -3i64..4);
        proptest::collection::vec(term, 0..4).prop_map(|terms| {
            let mut op = OpPoly::zero();
            for (m, i, n, e, c) in terms {
                let coeff = DiffPoly::var(i, n).pow(e).scale(&int(c));
                op.add_coefficient(m, &coeff);
            }
            op
        })
    }

    fn arb_mat() -> impl Strategy<Value = MatDiffOp> {
        proptest::collection::vec(arb_op(), 4)
            .prop_map(|e| MatDiffOp::from_rows(vec![e[..2].to_vec(), e[2..].to_vec()]).unwrap())
    }

    fn arb_vec() -> impl Strategy<Value = Vec<DiffPoly>> {
        proptest::collection::vec((0usize..2, 0usize..3, 0u32..3, -3i64..4), 2)
            .prop_map(|v| v.into_iter().map(|(i, n, e, c)| DiffPoly::var(i, n).pow(e).scale(&int(c))).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn adjoint_is_involutive(a in arb_mat()) {
            prop_assert_eq!(a.adjoint().adjoint(), a);
        }

        #[test]
        fn adjoint_reverses_composition(a in arb_mat(), b in arb_mat()) {
            prop_assert_eq!(a.compose(&b).unwrap().adjoint(), b.adjoint().compose(&a.adjoint()).unwrap());
        }

        #[test]
        fn composition_is_application(a in arb_mat(), b in arb_mat(), f in arb_vec()) {
            let lhs = a.compose(&b).unwrap().apply(&f).unwrap();
            let rhs = a.apply(&b.apply(&f).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn constant_kernel_is_k0_kernel(m0 in proptest::collection::vec(-2i64..3, 4), m1 in proptest::collection::vec(-2i64..3, 4)) {
            let k0 = QMatrix::from_i64(&[&m0[..2], &m0[2..]]);
            let k1 = QMatrix::from_i64(&[&m1[..2], &m1[2..]]);
            let op = MatDiffOp::from_constant_coefficients(&[k0.clone(), k1]).unwrap();
            for v in k0.nullspace() {
                let f: Vec<DiffPoly> = v.into_iter().map(DiffPoly::constant).collect();
                prop_assert!(op.apply(&f).unwrap().iter().all(DiffPoly::is_zero));
            }
            prop_assert_eq!(op.constant_term_matrix().unwrap(), k0);
        }
    }
}
