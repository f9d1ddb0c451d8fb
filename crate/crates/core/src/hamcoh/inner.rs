use num_traits::Zero;

use super::constant_symbol;
use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::matop::MatDiffOp;
use crate::rational::{binomial, Rational};

/// `⟨F|G⟩_K = Σ_{i,j} Σ_n Σ_{m<n} C(n,m) (-∂)^{n-1-m} (F_i K_{ij;n} ∂^m G_j)`.
pub fn inner_product(k: &MatDiffOp, f: &[DiffPoly], g: &[DiffPoly]) -> Result<DiffPoly> {
    if !k.is_square() {
        return Err(Error::NotSquare {
            rows: k.rows(),
            cols: k.cols(),
        });
    }
    if f.len() != k.rows() || g.len() != k.cols() {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {} against a {}x{} operator",
            f.len(),
            g.len(),
            k.rows(),
            k.cols()
        )));
    }
    let mut out = DiffPoly::zero();
    for ((i, j), op) in k.entries() {
        for (n, c) in op.coefficients() {
            for m in 0..n {
                let inner = &(&f[i] * c) * &g[j].total_derivative_n(m);
                let e = n - 1 - m;
                let mut term = inner.total_derivative_n(e).scale(&binomial(n, m));
                if e % 2 == 1 {
                    term = -term;
                }
                out += &term;
            }
        }
    }
    Ok(out)
}

/// Gram matrix of `⟨·|·⟩_K` on the reduced echelon basis of `ker K_0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GramReport {
    pub basis: Vec<Vec<Rational>>,
    pub gram: QMatrix,
    pub rank: usize,
    pub nondegenerate: bool,
}

/// The form `⟨·|·⟩⁰_K` restricted to constant vectors in the kernel of `K`.
pub fn gram_on_kernel(k: &MatDiffOp) -> Result<GramReport> {
    let ks = constant_symbol(k)?;
    let basis = ks[0].nullspace();
    let as_vec = |v: &Vec<Rational>| v.iter().cloned().map(DiffPoly::constant).collect::<Vec<_>>();
    let n = basis.len();
    let mut gram = QMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let v = inner_product(k, &as_vec(&basis[a]), &as_vec(&basis[b]))?;
            gram[(a, b)] = v.as_constant().unwrap_or_else(Rational::zero);
        }
    }
    let rank = gram.rank();
    Ok(GramReport {
        basis,
        gram,
        rank,
        nondegenerate: rank == n,
    })
}
