//! Variational calculus on `R_ℓ`: variational and Frechet derivatives,
//! evolutionary vector fields, local functionals, and the two inverse problems
//! (antiderivatives of total derivatives, functionals with a given variational
//! derivative).

use std::fmt;

use num_traits::Zero;

use super::{DiffMonomial, DiffPoly, DiffVar};
use crate::error::{Error, Result};
use crate::linalg::LinearSystem;
use crate::matop::{MatDiffOp, OpPoly};
use crate::rational::Rational;

/// `R_ℓ` with a fixed number `ℓ ≥ 1` of differential variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiffRing {
    ell: usize,
}

impl DiffRing {
    pub fn new(ell: usize) -> Result<Self> {
        if ell == 0 {
            return Err(Error::ZeroVariables);
        }
        Ok(DiffRing { ell })
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Fails when `f` mentions a variable beyond `u_ℓ`.
    pub fn check(&self, f: &DiffPoly) -> Result<()> {
        let bound = f.index_bound();
        if bound > self.ell {
            return Err(Error::VariableOutOfRange {
                index: bound,
                ell: self.ell,
            });
        }
        Ok(())
    }

    /// `δf/δu_i = Σ_n (-∂)^n ∂f/∂u_i^(n)` for `i = 1..ℓ`.
    pub fn variational_derivative(&self, f: &DiffPoly) -> Vec<DiffPoly> {
        debug_assert!(f.index_bound() <= self.ell);
        (0..self.ell)
            .map(|i| {
                let mut acc = DiffPoly::zero();
                let top = f.order().unwrap_or(0);
                for n in 0..=top {
                    let p = f.partial(DiffVar::new(i, n));
                    if p.is_zero() {
                        continue;
                    }
                    let d = p.total_derivative_n(n);
                    if n % 2 == 0 {
                        acc += &d;
                    } else {
                        acc -= &d;
                    }
                }
                acc
            })
            .collect()
    }

    /// `X_P(f) = Σ_{i,n} (∂^n P_i) ∂f/∂u_i^(n)`.
    pub fn evolutionary_apply(&self, p: &[DiffPoly], f: &DiffPoly) -> DiffPoly {
        assert_eq!(p.len(), self.ell, "characteristic must have ℓ components");
        let mut out = DiffPoly::zero();
        for v in f.variables() {
            let df = f.partial(v);
            let dp = p[v.index].total_derivative_n(v.order);
            out += &(&dp * &df);
        }
        out
    }

    /// `(D_P)_{ij}(∂) = Σ_n ∂P_i/∂u_j^(n) ∂^n`.
    pub fn frechet(&self, p: &[DiffPoly]) -> MatDiffOp {
        let mut op = MatDiffOp::zero(p.len(), self.ell);
        for (i, pi) in p.iter().enumerate() {
            for v in pi.variables() {
                let entry = op.entry_mut(i, v.index);
                *entry = &*entry + &OpPoly::monomial(pi.partial(v), v.order);
            }
        }
        op
    }

    /// Whether `∫a = ∫b` in `V/∂V`.
    pub fn functional_equal(&self, a: &LocalFunctional, b: &LocalFunctional) -> bool {
        a == b
    }

    /// `g` with `∂g = f` and zero constant term, when `f ∈ ∂V`.
    ///
    /// Membership is decided first (`δf/δu = 0` and no constant term); `g` is then
    /// found by an exact solve on monomials of the same degree, weight one less and
    /// order at most `order(f) - 1`, one homogeneous block at a time.
    pub fn antiderivative(&self, f: &DiffPoly) -> Option<DiffPoly> {
        if !is_total_derivative(f) {
            return None;
        }
        if f.is_zero() {
            return Some(DiffPoly::zero());
        }
        let max_order = f.order().unwrap_or(0).saturating_sub(1);
        let index_bound = f.index_bound();
        let mut g = DiffPoly::zero();
        for ((degree, weight), block) in f.homogeneous_parts() {
            if weight == 0 {
                return None;
            }
            let candidates = monomials_of(index_bound, max_order, degree, weight - 1);
            let mut system: LinearSystem<DiffMonomial> = LinearSystem::new(candidates.len());
            for (col, m) in candidates.iter().enumerate() {
                let image = DiffPoly::term(Rational::from_integer(1.into()), m.clone()).total_derivative();
                for (key, c) in image.terms() {
                    system.add_coefficient(key.clone(), col, c);
                }
            }
            for (key, c) in block.terms() {
                system.add_rhs(key.clone(), c);
            }
            let x = system.solve()?;
            for (m, c) in candidates.into_iter().zip(x) {
                g.add_term(m, c);
            }
        }
        debug_assert_eq!(&g.total_derivative(), f);
        Some(g)
    }

    /// `∫h` with `δh/δu = P`, provided the Frechet derivative of `P` is self-adjoint.
    ///
    /// Uses `h = Σ_i ∫_0^1 u_i P_i(t·u) dt`; a monomial of degree `d` contributes `1/(d+1)`.
    pub fn homotopy_integrate(&self, p: &[DiffPoly]) -> Option<LocalFunctional> {
        assert_eq!(p.len(), self.ell, "characteristic must have ℓ components");
        let dp = self.frechet(p);
        if dp.adjoint() != dp {
            return None;
        }
        let mut h = DiffPoly::zero();
        for (i, pi) in p.iter().enumerate() {
            let ui = DiffMonomial::var(DiffVar::new(i, 0));
            for (m, c) in pi.terms() {
                let weight = Rational::new(1.into(), (m.degree() as i64 + 1).into());
                h.add_term(m.mul(&ui), c * weight);
            }
        }
        Some(LocalFunctional::new(h))
    }
}

fn is_total_derivative(f: &DiffPoly) -> bool {
    if !f.constant_term().is_zero() {
        return false;
    }
    let ell = f.index_bound().max(1);
    DiffRing { ell }
        .variational_derivative(f)
        .iter()
        .all(DiffPoly::is_zero)
}

/// Monomials in `u_i^(n)` (`i < index_bound`, `n ≤ max_order`) of the given degree and weight.
pub(crate) fn monomials_of(index_bound: usize, max_order: usize, degree: u32, weight: usize) -> Vec<DiffMonomial> {
    let vars: Vec<DiffVar> = (0..=max_order)
        .flat_map(|n| (0..index_bound).map(move |i| DiffVar::new(i, n)))
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        vars: &[DiffVar],
        start: usize,
        degree: u32,
        weight: usize,
        current: &mut Vec<DiffVar>,
        out: &mut Vec<DiffMonomial>,
    ) {
        if degree == 0 {
            if weight == 0 {
                out.push(DiffMonomial::from_factors(current.iter().map(|&v| (v, 1))));
            }
            return;
        }
        for k in start..vars.len() {
            let v = vars[k];
            if v.order > weight {
                continue;
            }
            current.push(v);
            rec(vars, k, degree - 1, weight - v.order, current, out);
            current.pop();
        }
    }
    rec(&vars, 0, degree, weight, &mut current, &mut out);
    out.sort();
    out.dedup();
    out
}

/// An element `∫f` of `V/∂V`, stored through one representative.
///
/// Two functionals are equal iff the difference of representatives has zero
/// constant term and vanishing variational derivative (`ker δ/δu = ℚ + ∂V` over
/// `R_ℓ`, and `∂V ∩ ℚ = 0`).
#[derive(Debug, Clone, Default)]
pub struct LocalFunctional {
    rep: DiffPoly,
}

impl LocalFunctional {
    pub fn new(rep: DiffPoly) -> Self {
        LocalFunctional { rep }
    }

    pub fn zero() -> Self {
        LocalFunctional::default()
    }

    pub fn representative(&self) -> &DiffPoly {
        &self.rep
    }

    pub fn into_representative(self) -> DiffPoly {
        self.rep
    }

    pub fn is_zero(&self) -> bool {
        is_total_derivative(&self.rep)
    }
}

impl PartialEq for LocalFunctional {
    fn eq(&self, other: &Self) -> bool {
        is_total_derivative(&(&self.rep - &other.rep))
    }
}

impl Eq for LocalFunctional {}

impl From<DiffPoly> for LocalFunctional {
    fn from(rep: DiffPoly) -> Self {
        LocalFunctional::new(rep)
    }
}

impl fmt::Display for LocalFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = self.rep.to_string();
        if self.rep.num_terms() <= 1 && !text.contains(['*', '/', '-']) {
            write!(f, "∫{text}")
        } else {
            write!(f, "∫({text})")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn u(n: usize) -> DiffPoly {
        DiffPoly::var(0, n)
    }

    fn ring1() -> DiffRing {
        DiffRing::new(1).unwrap()
    }

    #[test]
    fn zero_variables_rejected() {
        assert_eq!(DiffRing::new(0), Err(Error::ZeroVariables));
    }

    #[test]
    fn variational_derivative_examples() {
        let r = ring1();
        assert_eq!(r.variational_derivative(&u(0).pow(2).scale(&frac(1, 2))), vec![u(0)]);
        assert_eq!(r.variational_derivative(&(&u(0) * &u(1)).total_derivative()), vec![DiffPoly::zero()]);
        assert_eq!(r.variational_derivative(&(&u(0) * &u(2))), vec![u(2).scale(&int(2))]);
    }

    #[test]
    fn evolutionary_examples() {
        let r = ring1();
        assert_eq!(r.evolutionary_apply(&[u(1)], &u(0)), u(1));
        assert_eq!(r.evolutionary_apply(&[DiffPoly::one()], &u(0).pow(2)), u(0).scale(&int(2)));
        assert!(r.evolutionary_apply(&[u(3)], &DiffPoly::constant(int(7))).is_zero());
    }

    #[test]
    fn frechet_examples() {
        let r = ring1();
        assert_eq!(r.frechet(&[u(1)]), MatDiffOp::scalar(OpPoly::d()));
        let expected = &OpPoly::monomial(u(1), 0) + &OpPoly::monomial(u(0), 1);
        assert_eq!(r.frechet(&[&u(0) * &u(1)]), MatDiffOp::scalar(expected));
        assert!(r.frechet(&[DiffPoly::constant(int(3))]).is_zero());
    }

    #[test]
    fn functional_equality_examples() {
        let r = ring1();
        let f = |p: DiffPoly| LocalFunctional::new(p);
        assert!(r.functional_equal(&f(&u(0) * &u(1)), &LocalFunctional::zero()));
        assert!(!r.functional_equal(&f(DiffPoly::one()), &LocalFunctional::zero()));
        let cube = u(0).pow(3).scale(&frac(1, 2));
        let a = &(&u(0) * &u(2)).scale(&frac(1, 2)) + &cube;
        let b = &u(1).pow(2).scale(&frac(-1, 2)) + &cube;
        assert!(r.functional_equal(&f(a), &f(b)));
    }

    #[test]
    fn antiderivative_examples() {
        let r = ring1();
        assert_eq!(r.antiderivative(&u(1)), Some(u(0)));
        assert_eq!(r.antiderivative(&u(0)), None);
        let f = &u(3) + &(&u(0) * &u(1)).scale(&int(3));
        let g = &u(2) + &u(0).pow(2).scale(&frac(3, 2));
        assert_eq!(r.antiderivative(&f), Some(g));
        assert_eq!(r.antiderivative(&DiffPoly::one()), None);
    }

    #[test]
    fn homotopy_examples() {
        let r = ring1();
        let h = r.homotopy_integrate(&[u(0)]).unwrap();
        assert_eq!(h.representative(), &u(0).pow(2).scale(&frac(1, 2)));
        assert!(r.homotopy_integrate(&[u(1)]).is_none());
        let p = &u(2) + &u(0).pow(2).scale(&frac(3, 2));
        let h = r.homotopy_integrate(std::slice::from_ref(&p)).unwrap();
        let expected = &(&u(0) * &u(2)).scale(&frac(1, 2)) + &u(0).pow(3).scale(&frac(1, 2));
        assert_eq!(h.representative(), &expected);
        assert_eq!(r.variational_derivative(h.representative()), vec![p]);
    }

    fn arb_poly(ell: usize) -> impl Strategy<Value = DiffPoly> {
        let term = (0..ell, 0usize..3, 0..ell, 0usize..3, 0u32..3, -4i64..5);
        proptest::collection::vec(term, 0..5).prop_map(|terms| {
            let mut p = DiffPoly::zero();
            for (i, n, j, m, shape, c) in terms {
                let m = match shape {
                    0 => DiffMonomial::one(),
                    1 => DiffMonomial::var(DiffVar::new(i, n)),
                    _ => DiffMonomial::from_factors([(DiffVar::new(i, n), 1), (DiffVar::new(j, m), 1)]),
                };
                p.add_term(m, int(c));
            }
            p
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn partials_commute_with_total_derivative(f in arb_poly(2), i in 0usize..2, n in 1usize..4) {
            let v = DiffVar::new(i, n);
            let lhs = &f.total_derivative().partial(v) - &f.partial(v).total_derivative();
            prop_assert_eq!(lhs, f.partial(DiffVar::new(i, n - 1)));
        }

        #[test]
        fn total_derivatives_are_variationally_trivial(f in arb_poly(2)) {
            let r = DiffRing::new(2).unwrap();
            prop_assert!(r.variational_derivative(&f.total_derivative()).iter().all(DiffPoly::is_zero));
            prop_assert!(f.total_derivative().constant_term().is_zero());
        }

        #[test]
        fn evolutionary_fields_commute_with_d(f in arb_poly(2), p0 in arb_poly(2), p1 in arb_poly(2)) {
            let r = DiffRing::new(2).unwrap();
            let p = [p0, p1];
            prop_assert_eq!(
                r.evolutionary_apply(&p, &f.total_derivative()),
                r.evolutionary_apply(&p, &f).total_derivative()
            );
        }

        #[test]
        fn antiderivative_round_trip(f in arb_poly(2)) {
            let r = DiffRing::new(2).unwrap();
            let df = f.total_derivative();
            let g = r.antiderivative(&df).expect("total derivative must integrate");
            prop_assert_eq!(g.total_derivative(), df);
            if let Some(g) = r.antiderivative(&f) {
                prop_assert_eq!(g.total_derivative(), f);
            }
        }

        #[test]
        fn homotopy_round_trip(f in arb_poly(2)) {
            let r = DiffRing::new(2).unwrap();
            let p = r.variational_derivative(&f);
            let h = r.homotopy_integrate(&p).expect("variational derivatives are self-adjoint");
            prop_assert_eq!(r.variational_derivative(h.representative()), p);
        }
    }
}
