use std::collections::BTreeMap;

use num_traits::One;

use super::{LambdaPoly, PolyVector};
use crate::diffpoly::{DiffPoly, DiffRing, DiffVar, LocalFunctional};
use crate::error::{Error, Result};
use crate::matop::{MatDiffOp, OpPoly};
use crate::rational::{frac, int, perm_sign, subsets, tuples, Rational};

fn graded_sign(a: i32, b: i32) -> Rational {
    if (a * b).rem_euclid(2) == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// `Σ_n (±(Σ_{t ∈ vars} λ_t + ∂))^n ∂q/∂u_j^(n)`; the sign is `-` when `negate`.
fn variational_shift(q: &LambdaPoly, j: usize, vars: &[usize], negate: bool) -> LambdaPoly {
    let mut out = LambdaPoly::zero(q.nvars());
    let top = q.coefficient_order().unwrap_or(0);
    for n in 0..=top {
        let d = q.partial(DiffVar::new(j, n));
        if d.is_zero() {
            continue;
        }
        out += &d.shift_apply_n(vars, negate, n);
    }
    out
}

/// `P□Q` for `P ∈ W_h`, `Q ∈ W_q`; the result has degree `h + q`.
pub fn box_product(p: &PolyVector, q: &PolyVector) -> PolyVector {
    assert_eq!(p.ell(), q.ell(), "arrays over different rings");
    let ell = p.ell();
    let h = p.degree();
    let qd = q.degree();
    let k = h + qd;
    if h == -1 || k < -1 || h == -2 || qd == -2 {
        return PolyVector::zero(ell, k.max(-2));
    }
    let n_out = (k + 1) as usize;
    let n_a = (qd + 1) as usize;
    let mut out = PolyVector::zero(ell, k);
    let mut raw: BTreeMap<Vec<usize>, LambdaPoly> = BTreeMap::new();
    for a in subsets(n_out, n_a) {
        let b: Vec<usize> = (0..n_out).filter(|t| !a.contains(t)).collect();
        let order: Vec<usize> = a.iter().chain(&b).copied().collect();
        let sign = int(perm_sign(&order) as i64);
        let rename_q: &[usize] = if n_a == 0 { &[] } else { &a[..n_a - 1] };
        let mut y_cache: BTreeMap<(Vec<usize>, usize), LambdaPoly> = BTreeMap::new();
        for t in tuples(ell, n_out) {
            let ia: Vec<usize> = a.iter().map(|&s| t[s]).collect();
            let ib: Vec<usize> = b.iter().map(|&s| t[s]).collect();
            let mut acc = LambdaPoly::zero(n_out);
            for j in 0..ell {
                let y = y_cache
                    .entry((ia.clone(), j))
                    .or_insert_with(|| {
                        let qe = q.entry(&ia).rename(n_out, rename_q);
                        variational_shift(&qe, j, &a, true)
                    })
                    .clone();
                if y.is_zero() {
                    continue;
                }
                let mut pidx = vec![j];
                pidx.extend_from_slice(&ib);
                for (e, c) in p.entry(&pidx).terms() {
                    let mut z = if e.is_empty() { y.clone() } else { y.shift_apply_n(&a, false, e[0] as usize) };
                    let mut lam = vec![0u32; n_out];
                    for (s, &ex) in e.iter().enumerate().skip(1) {
                        lam[b[s - 1]] += ex;
                    }
                    z = z.mul_lambda(&lam).mul_left(c);
                    acc += &z;
                }
            }
            if !acc.is_zero() {
                let slot = raw.entry(t).or_insert_with(|| LambdaPoly::zero(n_out));
                *slot += &acc.scale(&sign);
            }
        }
    }
    for (t, r) in raw {
        out.add_raw(&t, &r);
    }
    out
}

/// `[P, Q] = P□Q - (-1)^{hq} Q□P`.
pub fn schouten(p: &PolyVector, q: &PolyVector) -> PolyVector {
    let left = box_product(p, q);
    let right = box_product(q, p);
    left.sub(&right.scale(&graded_sign(p.degree(), q.degree())))
}

/// `{f_λ g}_H`, a polynomial in one variable `λ`.
pub fn lambda_bracket(h: &MatDiffOp, f: &DiffPoly, g: &DiffPoly) -> Result<LambdaPoly> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let ell = h.rows();
    let mut out = LambdaPoly::zero(1);
    let lam = [0usize];
    for i in 0..ell {
        let x = variational_shift(&LambdaPoly::constant(1, f.clone()), i, &lam, true);
        if x.is_zero() {
            continue;
        }
        for j in 0..ell {
            let mut hx = LambdaPoly::zero(1);
            for (m, c) in h.entry(j, i).coefficients() {
                hx += &x.shift_apply_n(&lam, false, m).mul_left(c);
            }
            if hx.is_zero() {
                continue;
            }
            let top = g.order().unwrap_or(0);
            for n in 0..=top {
                let dg = g.partial(DiffVar::new(j, n));
                if dg.is_zero() {
                    continue;
                }
                out += &hx.shift_apply_n(&lam, false, n).mul_left(&dg);
            }
        }
    }
    Ok(out)
}

/// `[Q, ∫h]_{i}(λ) = Σ_j Q_{j,i}(∂, λ_0, ..., λ_k)_→ δh/δu_j` for `Q ∈ W_{k+1}`.
///
/// `[∫h, Q]` is this times `(-1)^k`.
pub fn bracket_functional(q: &PolyVector, h: &LocalFunctional) -> Result<PolyVector> {
    let ell = q.ell();
    let ring = DiffRing::new(ell)?;
    ring.check(h.representative())?;
    if q.degree() < 0 {
        return Ok(PolyVector::zero(ell, q.degree() - 1));
    }
    if q.degree() == 0 {
        let f = bracket_vf_functional(&q.to_vector()?, h)?;
        return Ok(PolyVector::from_functional(ell, &f));
    }
    let k = q.degree() - 1;
    let n_out = (k + 1) as usize;
    let dh = ring.variational_derivative(h.representative());
    let mut out = PolyVector::zero(ell, k);
    for t in out.index_tuples() {
        let mut acc = LambdaPoly::zero(n_out);
        for (j, dhj) in dh.iter().enumerate() {
            if dhj.is_zero() {
                continue;
            }
            let mut idx = vec![j];
            idx.extend_from_slice(&t);
            for (e, c) in q.entry(&idx).terms() {
                let applied = dhj.total_derivative_n(e[0] as usize);
                let mut lam = vec![0u32; n_out];
                for (s, &ex) in e.iter().enumerate().skip(1) {
                    lam[s - 1] += ex;
                }
                acc += &LambdaPoly::monomial(lam, c * &applied);
            }
        }
        out.add_raw(&t, &acc);
    }
    Ok(out)
}

/// `[Q, ∫h] = ∫ Σ_j Q_j δh/δu_j` for `Q ∈ W_0`.
pub fn bracket_vf_functional(q: &[DiffPoly], h: &LocalFunctional) -> Result<LocalFunctional> {
    let ring = DiffRing::new(q.len())?;
    ring.check(h.representative())?;
    let dh = ring.variational_derivative(h.representative());
    let mut acc = DiffPoly::zero();
    for (qj, dj) in q.iter().zip(&dh) {
        acc += &(qj * dj);
    }
    Ok(LocalFunctional::new(acc))
}

/// `[H, ∫h] = H(∂) δh/δu`.
pub fn bracket_op_functional(h: &MatDiffOp, f: &LocalFunctional) -> Result<Vec<DiffPoly>> {
    let ring = DiffRing::new(h.cols())?;
    ring.check(f.representative())?;
    h.apply(&ring.variational_derivative(f.representative()))
}

/// `[P, H] = X_P(H) - D_P ∘ H - H ∘ D_P^*` for `P ∈ W_0`.
pub fn bracket_vf_op(p: &[DiffPoly], h: &MatDiffOp) -> Result<MatDiffOp> {
    if !h.is_square() || h.rows() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "characteristic of length {} against a {}x{} operator",
            p.len(),
            h.rows(),
            h.cols()
        )));
    }
    let ring = DiffRing::new(p.len())?;
    let mut xh = MatDiffOp::zero(h.rows(), h.cols());
    for ((i, j), op) in h.entries() {
        *xh.entry_mut(i, j) =
            OpPoly::from_coefficients(op.coefficients().map(|(m, c)| (m, ring.evolutionary_apply(p, c))));
    }
    let dp = ring.frechet(p);
    let a = dp.compose(h)?;
    let b = h.compose(&dp.adjoint())?;
    Ok(&(&xh - &a) - &b)
}

/// `[K, H] = K□H + H□K` for operators in `W_1`, using the three-term cyclic formula.
pub fn triple_bracket(k: &MatDiffOp, h: &MatDiffOp) -> Result<PolyVector> {
    if !k.is_square() || !h.is_square() || k.rows() != h.rows() {
        return Err(Error::DimensionMismatch("operators must be square of equal size".into()));
    }
    let a = cyclic_box(k, h);
    let b = cyclic_box(h, k);
    Ok(a.add(&b))
}

fn symbol(op: &OpPoly, nvars: usize, t: usize) -> LambdaPoly {
    let mut p = LambdaPoly::zero(nvars);
    for (m, c) in op.coefficients() {
        let mut e = vec![0u32; nvars];
        e[t] = m as u32;
        p.add_term(e, c);
    }
    p
}

fn cyclic_box(k: &MatDiffOp, h: &MatDiffOp) -> PolyVector {
    let ell = k.rows();
    let mut out = PolyVector::zero(ell, 2);
    let cycles = [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)];
    for t in tuples(ell, 3) {
        let mut acc = LambdaPoly::zero(3);
        for &(a, b, c) in &cycles {
            let hs = symbol(h.entry(t[a], t[b]), 3, b);
            let top = hs.coefficient_order().unwrap_or(0);
            for j in 0..ell {
                let ks = symbol(k.entry(j, t[c]), 3, c);
                if ks.is_zero() {
                    continue;
                }
                for n in 0..=top {
                    let dh = hs.partial(DiffVar::new(j, n));
                    if dh.is_zero() {
                        continue;
                    }
                    let shifted = ks.shift_apply_n(&[c], false, n);
                    acc += &multiply(&dh, &shifted);
                }
            }
        }
        out.add_raw(&t, &acc);
    }
    out
}

/// Product of two λ-polynomials whose coefficients commute with the λ's.
fn multiply(a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let mut out = LambdaPoly::zero(a.nvars());
    for (e, c) in a.terms() {
        out += &b.mul_lambda(e).mul_left(c);
    }
    out
}

/// The probe functional `((-1)^M / 2) (u_j^(M))^2`, whose variational derivative is `u_j^(2M)`.
pub fn probe_functional(j: usize, m: usize) -> LocalFunctional {
    let sign = if m.is_multiple_of(2) { frac(1, 2) } else { frac(-1, 2) };
    LocalFunctional::new(DiffPoly::var(j, m).pow(2).scale(&sign))
}

/// Brackets `P ∈ W_k` against the probe functionals `((-1)^M/2)(u_j^(M))^2`
/// for `M` up to `order + λ-degree + 1`; true iff every bracket vanishes.
///
/// Only one level of brackets is taken: iterating would lose information, as
/// `∫u_j^(a) u_j^(b) = 0` whenever `a + b` is odd.
pub fn transitivity_probe(p: &PolyVector) -> bool {
    if p.degree() < 0 {
        return p.is_zero();
    }
    let ell = p.ell();
    let bound = p.coefficient_order().unwrap_or(0) + p.lambda_degree() as usize + 1;
    for m in 0..=bound {
        for j in 0..ell {
            let f = PolyVector::from_functional(ell, &probe_functional(j, m));
            if !schouten(p, &f).is_zero() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QMatrix;
    use crate::rational::frac;

    fn u(n: usize) -> DiffPoly {
        DiffPoly::var(0, n)
    }

    fn func(p: DiffPoly) -> PolyVector {
        PolyVector::from_functional(1, &LocalFunctional::new(p))
    }

    fn kdv() -> MatDiffOp {
        MatDiffOp::scalar(OpPoly::from_coefficients([
            (3, DiffPoly::one()),
            (1, u(0).scale(&int(2))),
            (0, u(1)),
        ]))
    }

    fn d() -> MatDiffOp {
        MatDiffOp::scalar(OpPoly::d())
    }

    #[test]
    fn box_examples() {
        let f = func(u(0).pow(2));
        let g = func(u(1).pow(2));
        assert_eq!(box_product(&f, &g).degree(), -2);
        assert!(schouten(&f, &g).is_zero());
        let k = PolyVector::from_operator(&d()).unwrap();
        assert!(box_product(&k, &k).is_zero());
        let h = PolyVector::from_operator(&kdv()).unwrap();
        assert!(schouten(&h, &h).is_zero());
    }

    #[test]
    fn schouten_of_vector_fields_is_commutator() {
        let ring = DiffRing::new(1).unwrap();
        let p = vec![u(0).pow(2)];
        let q = vec![u(2)];
        let br = schouten(&PolyVector::from_vector(&p), &PolyVector::from_vector(&q));
        let expected = &ring.evolutionary_apply(&p, &q[0]) - &ring.evolutionary_apply(&q, &p[0]);
        assert_eq!(br.to_vector().unwrap(), vec![expected]);
    }

    #[test]
    fn constant_sd_is_hamiltonian() {
        let s = QMatrix::from_i64(&[&[1, 2], &[2, -1]]);
        let sd = MatDiffOp::from_constant_coefficients(&[QMatrix::zeros(2, 2), s]).unwrap();
        let k = PolyVector::from_operator(&sd).unwrap();
        assert!(schouten(&k, &k).is_zero());
    }

    #[test]
    fn lambda_bracket_examples() {
        let lam = LambdaPoly::var(1, 0);
        assert_eq!(lambda_bracket(&d(), &u(0), &u(0)).unwrap(), lam);
        assert!(lambda_bracket(&d(), &DiffPoly::constant(int(4)), &u(0)).unwrap().is_zero());
        let g = u(0).pow(2).scale(&frac(1, 2));
        assert_eq!(lambda_bracket(&d(), &u(0), &g).unwrap(), lam.mul_left(&u(0)));
    }

    #[test]
    fn specialized_examples() {
        let h = LocalFunctional::new(u(0).pow(2).scale(&frac(1, 2)));
        assert_eq!(bracket_op_functional(&d(), &h).unwrap(), vec![u(1)]);
        let v = bracket_vf_functional(&[DiffPoly::one()], &h).unwrap();
        assert_eq!(v, LocalFunctional::new(u(0)));
        assert!(bracket_vf_op(&[DiffPoly::constant(int(3))], &d()).unwrap().is_zero());
    }

    #[test]
    fn specialized_match_generic() {
        let hf = LocalFunctional::new(&u(0).pow(3) + &(&u(0) * &u(2)));
        let hp = PolyVector::from_functional(1, &hf);
        let op = kdv();
        let q = PolyVector::from_operator(&op).unwrap();

        let generic = schouten(&q, &hp);
        assert_eq!(generic.to_vector().unwrap(), bracket_op_functional(&op, &hf).unwrap());
        assert_eq!(generic, bracket_functional(&q, &hf).unwrap());
        assert_eq!(schouten(&hp, &q), bracket_functional(&q, &hf).unwrap());

        let p = vec![&u(0).pow(2) + &u(1)];
        let pv = PolyVector::from_vector(&p);
        let generic = schouten(&pv, &hp).to_functional().unwrap();
        assert_eq!(generic, bracket_vf_functional(&p, &hf).unwrap());

        let generic = schouten(&pv, &q).to_operator().unwrap();
        assert_eq!(generic, bracket_vf_op(&p, &op).unwrap());

        let vir = MatDiffOp::scalar(OpPoly::from_coefficients([(1, u(0)), (0, u(1).scale(&frac(1, 2)))]));
        let a = PolyVector::from_operator(&vir).unwrap();
        assert_eq!(schouten(&q, &a), triple_bracket(&op, &vir).unwrap());
    }

    #[test]
    fn transitivity_examples() {
        assert!(transitivity_probe(&PolyVector::zero(1, 2)));
        assert!(!transitivity_probe(&PolyVector::from_operator(&d()).unwrap()));
        assert!(!transitivity_probe(&PolyVector::from_vector(&[DiffPoly::one()])));
    }
}
