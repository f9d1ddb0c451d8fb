//! Hamiltonian operators and the complex `(W^var, δ_K)`.
//!
//! Cohomology dimensions are computed in the translation invariant setting, where
//! the quasiconstants are the rationals and the kernel of `K` is taken on constant
//! vectors.

mod cohomology;
mod inner;

pub use cohomology::{
    alpha_map, cohomology_dimensions, sigma_space, AlphaMap, CohomologyEntry, CohomologyReport, SkewArrayCoords,
};
pub use inner::{gram_on_kernel, inner_product, GramReport};

use crate::diffpoly::{DiffMonomial, DiffPoly, DiffVar, LocalFunctional};
use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, QMatrix};
use crate::matop::MatDiffOp;
use crate::polyvec::{schouten, LambdaPoly, PolyVector};
use crate::rational::{subsets, tuples, Rational};

fn require_skewadjoint(k: &MatDiffOp) -> Result<()> {
    if !k.is_skewadjoint()? {
        return Err(Error::NotSkewAdjoint);
    }
    Ok(())
}

/// `[K, K] = 0` for a skewadjoint `K`.
pub fn is_hamiltonian(k: &MatDiffOp) -> Result<bool> {
    require_skewadjoint(k)?;
    let p = PolyVector::from_operator(k)?;
    Ok(schouten(&p, &p).is_zero())
}

/// `[K, H] = 0` for skewadjoint `K`, `H`.
pub fn is_compatible(k: &MatDiffOp, h: &MatDiffOp) -> Result<bool> {
    require_skewadjoint(k)?;
    require_skewadjoint(h)?;
    if k.rows() != h.rows() {
        return Err(Error::DimensionMismatch("operators of different sizes".into()));
    }
    let a = PolyVector::from_operator(k)?;
    let b = PolyVector::from_operator(h)?;
    Ok(schouten(&a, &b).is_zero())
}

/// The constant coefficient matrices `K_0, ..., K_N` of a quasiconstant square operator.
pub(crate) fn constant_symbol(k: &MatDiffOp) -> Result<Vec<QMatrix>> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.rows(),
            cols: k.cols(),
        });
    }
    if !k.is_quasiconstant() {
        return Err(Error::NotQuasiconstant);
    }
    k.constant_coefficients()
}

/// `K_{ji}(λ_t)` as a λ-polynomial with constant coefficients.
pub(crate) fn symbol_entry(ks: &[QMatrix], j: usize, i: usize, nvars: usize, t: usize) -> LambdaPoly {
    let mut p = LambdaPoly::zero(nvars);
    for (n, m) in ks.iter().enumerate() {
        let mut e = vec![0u32; nvars];
        e[t] = n as u32;
        p.add_term(e, &DiffPoly::constant(m[(j, i)].clone()));
    }
    p
}

/// `δ_K P` for a quasiconstant `K` and `P ∈ W_{k-1}`, `k ≥ 0`.
pub fn delta_k(k: &MatDiffOp, p: &PolyVector) -> Result<PolyVector> {
    let ks = constant_symbol(k)?;
    let ell = k.rows();
    if p.ell() != ell {
        return Err(Error::DimensionMismatch("array and operator over different rings".into()));
    }
    if p.degree() < -1 {
        return Err(Error::UnsupportedDegree(p.degree()));
    }
    let deg = p.degree() + 1;
    let n_out = (deg + 1) as usize;
    let outer_sign = if deg % 2 == 0 { -1i64 } else { 1 };
    let mut out = PolyVector::zero(ell, deg);
    for t in tuples(ell, n_out) {
        let mut acc = LambdaPoly::zero(n_out);
        for alpha in 0..n_out {
            let others: Vec<usize> = (0..n_out).filter(|&s| s != alpha).collect();
            let sub: Vec<usize> = others.iter().map(|&s| t[s]).collect();
            let entry = p.entry(&sub).rename(n_out, &others[..others.len().saturating_sub(1)]);
            let sign = if (alpha as i64) % 2 == 0 { outer_sign } else { -outer_sign };
            let top = entry.coefficient_order().unwrap_or(0);
            for j in 0..ell {
                let kj = symbol_entry(&ks, j, t[alpha], n_out, alpha);
                if kj.is_zero() {
                    continue;
                }
                for n in 0..=top {
                    let d = entry.partial(DiffVar::new(j, n));
                    if d.is_zero() {
                        continue;
                    }
                    let mut e = vec![0u32; n_out];
                    e[alpha] = n as u32;
                    let prod = product(&d.mul_lambda(&e), &kj);
                    acc += &prod.scale(&Rational::from_integer(sign.into()));
                }
            }
        }
        out.add_raw(&t, &acc);
    }
    Ok(out)
}

/// Product of λ-polynomials, the second having constant coefficients.
pub(crate) fn product(a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let mut out = LambdaPoly::zero(a.nvars());
    for (e, c) in b.terms() {
        out += &a.mul_lambda(e).mul_left(c);
    }
    out
}

fn require_invertible_lead(k: &MatDiffOp) -> Result<Vec<QMatrix>> {
    let ks = constant_symbol(k)?;
    let (_, invertible) = k.leading_coefficient()?;
    if !invertible || k.order().is_none() {
        return Err(Error::SingularLeadingCoefficient);
    }
    Ok(ks)
}

/// `∫1` followed by `∫u·A` for the reduced echelon basis `A` of `ker K_0`.
pub fn casimir_basis(k: &MatDiffOp) -> Result<Vec<LocalFunctional>> {
    let ks = require_invertible_lead(k)?;
    let mut out = vec![LocalFunctional::new(DiffPoly::one())];
    for a in ks[0].nullspace() {
        let mut f = DiffPoly::zero();
        for (i, c) in a.into_iter().enumerate() {
            f.add_term(DiffMonomial::var(DiffVar::new(i, 0)), c);
        }
        out.push(LocalFunctional::new(f));
    }
    Ok(out)
}

/// Whether every `(k+1)`-fold nested bracket `[...[[P, C_0], C_1], ..., C_k]` with
/// Casimirs of `K` vanishes.
pub fn is_essential(k: &MatDiffOp, p: &PolyVector) -> Result<bool> {
    let casimirs: Vec<PolyVector> = casimir_basis(k)?
        .iter()
        .map(|c| PolyVector::from_functional(k.rows(), c))
        .collect();
    if p.ell() != k.rows() {
        return Err(Error::DimensionMismatch("array and operator over different rings".into()));
    }
    Ok(nested_vanish(p, &casimirs))
}

fn nested_vanish(p: &PolyVector, casimirs: &[PolyVector]) -> bool {
    if p.degree() <= -1 {
        return p.is_zero();
    }
    casimirs.iter().all(|c| nested_vanish(&schouten(p, c), casimirs))
}

/// Recovers `P_{j,i}(λ_0..λ_k)` of degree at most `N - 1` in each variable with
/// `entry ≡ Σ_j P_{j,i}(λ) u_j`, if possible.
fn recover_linear(entry: &LambdaPoly, ell: usize, n: usize, k: usize) -> Option<Vec<LambdaPoly>> {
    let nv = k + 1;
    let exps: Vec<Vec<u32>> = tuples(n, nv)
        .into_iter()
        .map(|e| e.into_iter().map(|x| x as u32).collect())
        .collect();
    let unknowns = ell * exps.len();
    let mut sys: LinearSystem<(Vec<u32>, DiffMonomial)> = LinearSystem::new(unknowns);
    for j in 0..ell {
        for (col, e) in exps.iter().enumerate() {
            let raw = LambdaPoly::monomial(e.clone(), DiffPoly::var(j, 0));
            let nf = raw.eliminate_last();
            for (le, c) in nf.terms() {
                for (m, q) in c.terms() {
                    sys.add_coefficient((le.clone(), m.clone()), j * exps.len() + col, q);
                }
            }
        }
    }
    for (le, c) in entry.terms() {
        for (m, q) in c.terms() {
            sys.add_rhs((le.clone(), m.clone()), q);
        }
    }
    let x = sys.solve()?;
    Some(
        (0..ell)
            .map(|j| {
                let mut p = LambdaPoly::zero(nv);
                for (col, e) in exps.iter().enumerate() {
                    p.add_term(e.clone(), &DiffPoly::constant(x[j * exps.len() + col].clone()));
                }
                p
            })
            .collect(),
    )
}

/// Membership in `A^k_K`: entries `Σ_j [P_{j,i}(λ) u_j]` with constant `P` of degree
/// at most `N - 1` in each variable, skewsymmetric, and satisfying
/// `Σ_α (-1)^α Σ_j P_{j,i_0..î_α..i_{k+1}} K_{j i_α}(λ_α) ≡ 0` modulo `λ_0 + ... + λ_{k+1}`.
pub fn a_space_member(k: &MatDiffOp, element: &PolyVector, degree: i32) -> Result<bool> {
    let ks = constant_symbol(k)?;
    let ell = k.rows();
    let n = k.order().unwrap_or(0);
    if element.degree() != degree || element.ell() != ell {
        return Err(Error::Malformed(format!(
            "expected an array of degree {degree} over {ell} variables, got degree {} over {}",
            element.degree(),
            element.ell()
        )));
    }
    if degree < -1 {
        return Err(Error::UnsupportedDegree(degree));
    }
    if n == 0 {
        return Ok(element.is_zero());
    }
    let kk = (degree + 1) as usize;
    let mut recovered: Vec<Vec<LambdaPoly>> = Vec::new();
    if degree == -1 {
        let f = element.to_functional()?.into_representative();
        let mut coeffs = Vec::new();
        for j in 0..ell {
            coeffs.push(f.coefficient(&DiffMonomial::var(DiffVar::new(j, 0))));
        }
        let mut linear = DiffPoly::zero();
        for (j, c) in coeffs.iter().enumerate() {
            linear.add_term(DiffMonomial::var(DiffVar::new(j, 0)), c.clone());
        }
        if LocalFunctional::new(f) != LocalFunctional::new(linear) {
            return Ok(false);
        }
        recovered.push(coeffs.into_iter().map(|c| LambdaPoly::constant(0, DiffPoly::constant(c))).collect());
    } else {
        if !element.is_skewsymmetric() {
            return Ok(false);
        }
        for t in element.index_tuples() {
            match recover_linear(element.entry(&t), ell, n, degree as usize) {
                Some(ps) => recovered.push(ps),
                None => return Ok(false),
            }
        }
    }
    let position = |t: &[usize]| t.iter().fold(0usize, |acc, &i| acc * ell + i);
    let n_cond = kk + 1;
    for t in tuples(ell, n_cond) {
        let mut acc = LambdaPoly::zero(n_cond);
        for alpha in 0..n_cond {
            let others: Vec<usize> = (0..n_cond).filter(|&s| s != alpha).collect();
            let sub: Vec<usize> = others.iter().map(|&s| t[s]).collect();
            for j in 0..ell {
                let pj = recovered[position(&sub)][j].rename(n_cond, &others);
                let kj = symbol_entry(&ks, j, t[alpha], n_cond, alpha);
                let term = product(&pj, &kj);
                acc += &if alpha % 2 == 0 { term } else { -term };
            }
        }
        if !acc.eliminate_last().is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Basis of `Λ^{k+1} ⊕ u·Λ^{k+2}_S` inside `W^var_k` for `K = S∂`; the second
/// summand is spanned by `u·S^{-1}B_E` for the elementary forms `B_E`, `|E| = k + 2`.
pub fn a_space_basis_sd(s: &QMatrix, degree: i32) -> Result<Vec<PolyVector>> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let sinv = s.inverse().ok_or(Error::DegenerateMatrix)?;
    let ell = s.rows();
    if degree < -1 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let kk = (degree + 1) as usize;
    let nv = degree.max(0) as usize;
    let mut out = Vec::new();
    for e in subsets(ell, kk) {
        let mut p = PolyVector::zero(ell, degree);
        for (t, sign) in elementary_form(&e) {
            p.set_raw(&t, &LambdaPoly::constant(nv, DiffPoly::constant(Rational::from_integer(sign.into()))));
        }
        out.push(p);
    }
    for e in subsets(ell, kk + 1) {
        let form = elementary_form(&e);
        let mut p = PolyVector::zero(ell, degree);
        for t in p.index_tuples() {
            let mut f = DiffPoly::zero();
            for (full, sign) in &form {
                if full[1..] != t[..] {
                    continue;
                }
                let m = full[0];
                for j in 0..ell {
                    let c = &sinv[(j, m)] * Rational::from_integer((*sign).into());
                    f.add_term(DiffMonomial::var(DiffVar::new(j, 0)), c);
                }
            }
            if !f.is_zero() {
                if degree == -1 {
                    p = PolyVector::from_functional(ell, &LocalFunctional::new(f.clone()));
                } else {
                    p.set_raw(&t, &LambdaPoly::constant(nv, f));
                }
            }
        }
        out.push(p);
    }
    Ok(out)
}

/// Nonzero entries `(tuple, sign)` of the elementary skew form on the sorted set `e`.
pub(crate) fn elementary_form(e: &[usize]) -> Vec<(Vec<usize>, i64)> {
    crate::rational::permutations(e.len())
        .into_iter()
        .map(|sigma| {
            let t: Vec<usize> = sigma.iter().map(|&s| e[s]).collect();
            (t, crate::rational::perm_sign(&sigma) as i64)
        })
        .collect()
}
