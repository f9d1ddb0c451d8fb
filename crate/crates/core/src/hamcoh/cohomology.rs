use std::collections::BTreeMap;

use num_traits::Zero;

use super::{require_invertible_lead, symbol_entry};
use crate::diffpoly::DiffPoly;
use crate::error::{Error, Result};
use crate::linalg::{LinearSystem, QMatrix};
use crate::matop::MatDiffOp;
use crate::polyvec::LambdaPoly;
use crate::rational::{binomial_u, perm_sign, permutations, subsets, Rational};

/// Coordinates of a skewsymmetric constant array of degree `k` whose entries have
/// degree at most `N - 1` in each variable.
///
/// Such an array is an element of `Λ^{k+1}` of the span of the composite symbols
/// `(i, m)`, `i < ℓ`, `m < N`; coordinates are indexed by sorted `(k+1)`-subsets
/// of the `Nℓ` symbols, symbol `(i, m)` having number `i·N + m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewArrayCoords {
    pub ell: usize,
    pub order: usize,
    pub degree: i32,
    pub coords: Vec<Rational>,
}

impl SkewArrayCoords {
    pub fn dimension(ell: usize, order: usize, degree: i32) -> usize {
        if degree < -1 {
            return 0;
        }
        binomial_u(ell * order, (degree + 1) as usize) as usize
    }

    pub fn basis_subsets(ell: usize, order: usize, degree: i32) -> Vec<Vec<usize>> {
        if degree < -1 {
            return Vec::new();
        }
        subsets(ell * order, (degree + 1) as usize)
    }

    /// The array as raw entries in `k + 1` λ-variables.
    pub fn to_entries(&self) -> BTreeMap<Vec<usize>, LambdaPoly> {
        let mut out = BTreeMap::new();
        let subs = Self::basis_subsets(self.ell, self.order, self.degree);
        for (c, s) in self.coords.iter().zip(subs) {
            if c.is_zero() {
                continue;
            }
            for (t, p) in composite_array(self.order, &s, 0) {
                let slot = out.entry(t).or_insert_with(|| LambdaPoly::zero(s.len()));
                *slot += &p.scale(c);
            }
        }
        out
    }
}

/// Entries of the elementary array on composite symbols `s`, with the λ-variables
/// placed starting at `offset` in a polynomial of `offset + |s|` variables.
fn composite_array(order: usize, s: &[usize], offset: usize) -> Vec<(Vec<usize>, LambdaPoly)> {
    let nv = offset + s.len();
    permutations(s.len())
        .into_iter()
        .map(|sigma| {
            let syms: Vec<usize> = sigma.iter().map(|&a| s[a]).collect();
            let tuple: Vec<usize> = syms.iter().map(|&c| c / order).collect();
            let mut e = vec![0u32; nv];
            for (t, &c) in syms.iter().enumerate() {
                e[offset + t] = (c % order) as u32;
            }
            let sign = Rational::from_integer(perm_sign(&sigma).into());
            (tuple, LambdaPoly::monomial(e, DiffPoly::constant(sign)))
        })
        .collect()
}

/// `α_k` on `H̃^k` together with the `Q`-certificate.
#[derive(Debug, Clone)]
pub struct AlphaMap {
    pub degree: i32,
    /// Column `s` holds the coordinates of `α_k(E_s)`.
    pub matrix: QMatrix,
    /// Column `s` holds the coordinates of the `Q`-array for `E_s`: block `j`
    /// (of size `binom(Nℓ, k)`) is `Q_{j, ...}`.
    pub certificate: QMatrix,
}

impl AlphaMap {
    pub fn kernel_dimension(&self) -> usize {
        self.matrix.cols() - self.matrix.rank()
    }
}

type EqKey = (Vec<usize>, Vec<u32>);

fn add_poly(sys: &mut LinearSystem<EqKey>, tuple: &[usize], p: &LambdaPoly, col: usize) {
    for (e, c) in p.terms() {
        let v = c.as_constant().expect("constant coefficients");
        sys.add_coefficient((tuple.to_vec(), e.clone()), col, &v);
    }
}

/// Solves `(λ_0 + ... + λ_k) P = R + Σ_α (-1)^α Σ_j Q_{j,î_α}(λ_{î_α}) K_{j i_α}(λ_α)`
/// for every basis array `P` of `H̃^k`.
pub fn alpha_map(k: &MatDiffOp, degree: i32) -> Result<AlphaMap> {
    let ks = require_invertible_lead(k)?;
    let ell = k.rows();
    let order = ks.len() - 1;
    if degree < 0 {
        return Err(Error::UnsupportedDegree(degree));
    }
    let nv = (degree + 1) as usize;
    let r_basis = SkewArrayCoords::basis_subsets(ell, order, degree);
    let q_basis = SkewArrayCoords::basis_subsets(ell, order, degree - 1);
    let n_r = r_basis.len();
    let n_q = q_basis.len();
    if n_r == 0 {
        return Ok(AlphaMap {
            degree,
            matrix: QMatrix::zeros(0, 0),
            certificate: QMatrix::zeros(ell * n_q, 0),
        });
    }
    let unknowns = n_r + ell * n_q;
    let mut sys: LinearSystem<EqKey> = LinearSystem::new(unknowns);
    for (col, s) in r_basis.iter().enumerate() {
        for (t, p) in composite_array(order, s, 0) {
            add_poly(&mut sys, &t, &p, col);
        }
    }
    for j in 0..ell {
        for (qi, s) in q_basis.iter().enumerate() {
            let col = n_r + j * n_q + qi;
            for (sub, p) in composite_array(order, s, 0) {
                for alpha in 0..nv {
                    let others: Vec<usize> = (0..nv).filter(|&x| x != alpha).collect();
                    let placed = p.rename(nv, &others);
                    for i_alpha in 0..ell {
                        let kj = symbol_entry(&ks, j, i_alpha, nv, alpha);
                        let mut term = super::product(&placed, &kj);
                        if alpha % 2 == 1 {
                            term = -term;
                        }
                        let mut t = sub.clone();
                        t.insert(alpha, i_alpha);
                        add_poly(&mut sys, &t, &term, col);
                    }
                }
            }
        }
    }
    let mut rhs_cols: Vec<BTreeMap<EqKey, Rational>> = Vec::new();
    for s in &r_basis {
        let mut col = BTreeMap::new();
        for (t, p) in composite_array(order, s, 0) {
            for a in 0..nv {
                for (e, c) in p.mul_var(a).terms() {
                    let slot = col.entry((t.clone(), e.clone())).or_insert_with(Rational::zero);
                    *slot += c.as_constant().expect("constant coefficients");
                }
            }
        }
        rhs_cols.push(col);
    }
    for col in &rhs_cols {
        for key in col.keys() {
            sys.touch(key.clone());
        }
    }
    let row_keys = sys.keys();
    let m = sys.matrix();
    let mut b = QMatrix::zeros(row_keys.len(), n_r);
    for (c, col) in rhs_cols.iter().enumerate() {
        for (key, v) in col {
            let r = row_keys.binary_search(key).expect("key registered");
            b[(r, c)] = v.clone();
        }
    }
    let x = m.solve_unique(&b).ok_or(Error::SingularLeadingCoefficient)?;
    let mut matrix = QMatrix::zeros(n_r, n_r);
    let mut certificate = QMatrix::zeros(ell * n_q, n_r);
    for c in 0..n_r {
        for r in 0..n_r {
            matrix[(r, c)] = x[(r, c)].clone();
        }
        for r in 0..ell * n_q {
            certificate[(r, c)] = x[(n_r + r, c)].clone();
        }
    }
    Ok(AlphaMap {
        degree,
        matrix,
        certificate,
    })
}

/// One row of a [`CohomologyReport`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyEntry {
    pub degree: i32,
    /// `dim ker α_k`; absent for `k = -1`.
    pub kernel_alpha: Option<usize>,
    pub dimension: usize,
    pub bound: u128,
    pub bound_attained: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohomologyReport {
    pub ell: usize,
    pub order: usize,
    pub entries: Vec<CohomologyEntry>,
}

impl CohomologyReport {
    pub fn dimensions(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.dimension).collect()
    }

    pub fn all_bounds_attained(&self) -> bool {
        self.entries.iter().all(|e| e.bound_attained)
    }
}

/// `dim H^k_K` for `k = -1, ..., k_max`: `1 + dim ker α_0` in degree `-1` and
/// `dim ker α_k + dim ker α_{k+1}` above.
pub fn cohomology_dimensions(k: &MatDiffOp, k_max: i32) -> Result<CohomologyReport> {
    let ks = require_invertible_lead(k)?;
    let ell = k.rows();
    let order = ks.len() - 1;
    let mut kernels = Vec::new();
    for d in 0..=(k_max + 1).max(0) {
        kernels.push(alpha_map(k, d)?.kernel_dimension());
    }
    let mut entries = Vec::new();
    for d in -1..=k_max {
        let (kernel_alpha, dimension) = if d == -1 {
            (None, 1 + kernels[0])
        } else {
            let a = kernels[d as usize];
            (Some(a), a + kernels[d as usize + 1])
        };
        let bound = binomial_u(order * ell + 1, (d + 2) as usize);
        entries.push(CohomologyEntry {
            degree: d,
            kernel_alpha,
            dimension,
            bound,
            bound_attained: dimension as u128 == bound,
        });
    }
    Ok(CohomologyReport { ell, order, entries })
}

/// `Σ_0 = ker K_0^T` (each basis element a column) or `Σ_1`, the polynomials
/// `Q(λ) = Σ_{m<N} Q_m λ^m` with `K^T(-λ) Q(λ) = Q^T(-λ) K(λ)` (each basis element
/// the list `Q_0, ..., Q_{N-1}`).
pub fn sigma_space(k: &MatDiffOp, degree: i32) -> Result<Vec<Vec<QMatrix>>> {
    let ks = require_invertible_lead(k)?;
    let ell = k.rows();
    let order = ks.len() - 1;
    match degree {
        0 => Ok(ks[0]
            .transpose()
            .nullspace()
            .into_iter()
            .map(|v| vec![QMatrix::from_rows(v.into_iter().map(|x| vec![x]).collect())])
            .collect()),
        1 => {
            let idx = |m: usize, a: usize, b: usize| (m * ell + a) * ell + b;
            let unknowns = order * ell * ell;
            let mut sys: LinearSystem<(usize, usize, usize)> = LinearSystem::new(unknowns);
            for (n, kn) in ks.iter().enumerate() {
                let sn = if n % 2 == 0 { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
                for m in 0..order {
                    let sm = if m % 2 == 0 { Rational::from_integer(1.into()) } else { Rational::from_integer((-1).into()) };
                    for a in 0..ell {
                        for b in 0..ell {
                            for c in 0..ell {
                                // (K_n^T Q_m)_{ab} = Σ_c K_n[c][a] Q_m[c][b]
                                sys.add_coefficient((n + m, a, b), idx(m, c, b), &(&sn * &kn[(c, a)]));
                                // (Q_m^T K_n)_{ab} = Σ_c Q_m[c][a] K_n[c][b]
                                sys.add_coefficient((n + m, a, b), idx(m, c, a), &(-(&sm * &kn[(c, b)])));
                            }
                        }
                    }
                }
            }
            Ok(sys
                .nullspace()
                .into_iter()
                .map(|v| {
                    (0..order)
                        .map(|m| {
                            let mut q = QMatrix::zeros(ell, ell);
                            for a in 0..ell {
                                for b in 0..ell {
                                    q[(a, b)] = v[idx(m, a, b)].clone();
                                }
                            }
                            q
                        })
                        .collect()
                })
                .collect())
        }
        _ => Err(Error::UnsupportedDegree(degree)),
    }
}
