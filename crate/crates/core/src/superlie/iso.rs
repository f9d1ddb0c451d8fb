use num_traits::Zero;

use super::{htilde_basis, htilde_bracket, Grassmann};
use crate::diffpoly::{DiffMonomial, DiffPoly, DiffVar, LocalFunctional};
use crate::error::{Error, Result};
use crate::hamcoh::elementary_form;
use crate::linalg::QMatrix;
use crate::polyvec::{LambdaPoly, PolyVector};
use crate::rational::{int, perm_sign, subsets, tuples, Rational};

/// An element `B + u·A` of `Λ^{k+1} ⊕ u·Λ^{k+2}`: `b` is indexed by `(i_0..i_k)` and
/// `a` by `(j, i_0..i_k)`, last index fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AElem {
    pub ell: usize,
    pub degree: i32,
    pub b: Vec<Rational>,
    pub a: Vec<Rational>,
}

fn position(ell: usize, t: &[usize]) -> usize {
    t.iter().fold(0, |acc, &i| acc * ell + i)
}

fn pow(ell: usize, e: usize) -> usize {
    ell.pow(e as u32)
}

impl AElem {
    pub fn zero(ell: usize, degree: i32) -> Self {
        let kk = (degree + 1).max(0) as usize;
        AElem {
            ell,
            degree,
            b: vec![Rational::zero(); pow(ell, kk)],
            a: vec![Rational::zero(); pow(ell, kk + 1)],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.b.iter().chain(&self.a).all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        AElem {
            ell: self.ell,
            degree: self.degree,
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        AElem {
            ell: self.ell,
            degree: self.degree,
            b: self.b.iter().map(|x| x * c).collect(),
            a: self.a.iter().map(|x| x * c).collect(),
        }
    }

    fn flat(&self) -> Vec<Rational> {
        self.b.iter().chain(&self.a).cloned().collect()
    }

    /// `B□uC` and `uA□uC` in closed form; every other product vanishes.
    pub fn box_product(&self, other: &Self) -> Self {
        let (h, q) = (self.degree, other.degree);
        let k = h + q;
        let ell = self.ell;
        let mut out = AElem::zero(ell, k);
        if h < 0 || k < -1 {
            return out;
        }
        let kk = (k + 1) as usize;
        let qa = (q + 1) as usize;
        let shuffles: Vec<(Vec<usize>, Vec<usize>, i32)> = subsets(kk, qa)
            .into_iter()
            .map(|a| {
                let b: Vec<usize> = (0..kk).filter(|x| !a.contains(x)).collect();
                let joined: Vec<usize> = a.iter().chain(&b).copied().collect();
                let s = perm_sign(&joined);
                (a, b, s)
            })
            .collect();
        for t in tuples(ell, kk) {
            let pos = position(ell, &t);
            for (a_set, b_set, s) in &shuffles {
                let ia: Vec<usize> = a_set.iter().map(|&x| t[x]).collect();
                let ib: Vec<usize> = b_set.iter().map(|&x| t[x]).collect();
                let sign = int(*s as i64);
                for j in 0..ell {
                    let mut cj = vec![j];
                    cj.extend(&ia);
                    let c = &other.a[position(ell, &cj)];
                    if c.is_zero() {
                        continue;
                    }
                    let mut bj = vec![j];
                    bj.extend(&ib);
                    let bp = position(ell, &bj);
                    out.b[pos] += &self.b[bp] * c * &sign;
                    for m in 0..ell {
                        let ap = m * pow(ell, (h + 1) as usize) + bp;
                        out.a[m * pow(ell, kk) + pos] += &self.a[ap] * c * &sign;
                    }
                }
            }
        }
        out
    }

    /// `[P, Q] = P□Q - (-1)^{hq} Q□P`.
    pub fn bracket(&self, other: &Self) -> Self {
        let left = self.box_product(other);
        let right = other.box_product(self);
        let hq = self.degree.rem_euclid(2) * other.degree.rem_euclid(2);
        left.add(&right.scale(&if hq == 1 { int(1) } else { int(-1) }))
    }

    pub fn to_polyvector(&self) -> PolyVector {
        let ell = self.ell;
        let kk = (self.degree + 1).max(0) as usize;
        let entry = |t: &[usize]| {
            let pos = position(ell, t);
            let mut f = DiffPoly::constant(self.b[pos].clone());
            for j in 0..ell {
                f.add_term(DiffMonomial::var(DiffVar::new(j, 0)), self.a[j * pow(ell, kk) + pos].clone());
            }
            f
        };
        if self.degree < -1 {
            return PolyVector::zero(ell, self.degree);
        }
        if self.degree == -1 {
            return PolyVector::from_functional(ell, &LocalFunctional::new(entry(&[])));
        }
        let mut p = PolyVector::zero(ell, self.degree);
        for t in tuples(ell, kk) {
            p.set_raw(&t, &LambdaPoly::constant(kk - 1, entry(&t)));
        }
        p
    }
}

/// The basis of `Λ^{k+1} ⊕ u·Λ^{k+2}_S` for `K = S∂`, in the order of
/// [`crate::hamcoh::a_space_basis_sd`].
pub fn a_basis(s: &QMatrix, degree: i32) -> Result<Vec<AElem>> {
    let sinv = s.inverse().ok_or(Error::DegenerateMatrix)?;
    let ell = s.rows();
    let kk = (degree + 1) as usize;
    let mut out = Vec::new();
    for e in subsets(ell, kk) {
        let mut x = AElem::zero(ell, degree);
        for (t, sign) in elementary_form(&e) {
            x.b[position(ell, &t)] = int(sign);
        }
        out.push(x);
    }
    for e in subsets(ell, kk + 1) {
        let mut x = AElem::zero(ell, degree);
        for (full, sign) in elementary_form(&e) {
            let pos = position(ell, &full[1..]);
            for j in 0..ell {
                x.a[j * pow(ell, kk) + pos] += &sinv[(j, full[0])] * int(sign);
            }
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct IsoReport {
    pub isomorphic: bool,
    pub dims_a: Vec<usize>,
    pub dims_h: Vec<usize>,
    /// The images of `∫1` and `∫u_j` that seeded the map, when one was found.
    pub seed: Option<(Rational, QMatrix)>,
}

fn coordinates(basis: &[Vec<Rational>], v: &[Rational]) -> Option<Vec<Rational>> {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    let m = QMatrix::from_rows(basis.to_vec()).transpose();
    let b = QMatrix::from_rows(v.iter().map(|x| vec![x.clone()]).collect());
    m.solve_unique(&b).map(|x| x.column(0))
}

fn grassmann_coords(n: usize, k: i32, g: &Grassmann) -> Vec<Rational> {
    htilde_basis(n, k)
        .iter()
        .map(|b| g.coefficient(b.terms().next().unwrap().0))
        .collect()
}

struct Setup {
    ell: usize,
    n: usize,
    stilde: QMatrix,
    a: Vec<Vec<AElem>>,
    a_flat: Vec<Vec<Vec<Rational>>>,
}

impl Setup {
    fn a_coords(&self, x: &AElem) -> Option<Vec<Rational>> {
        if x.degree + 1 >= self.a.len() as i32 || x.degree < -1 {
            return x.is_zero().then(Vec::new);
        }
        coordinates(&self.a_flat[(x.degree + 1) as usize], &x.flat())
    }

    fn apply(&self, psi: &[Vec<Grassmann>], x: &AElem) -> Option<Grassmann> {
        let c = self.a_coords(x)?;
        let mut g = Grassmann::zero(self.n);
        if let Some(images) = psi.get((x.degree + 1) as usize) {
            for (ci, im) in c.iter().zip(images) {
                g = g.add(&im.scale(ci));
            }
        }
        Some(g)
    }

    fn try_seed(&self, eps: &Rational, m: &QMatrix) -> Option<Vec<Vec<Grassmann>>> {
        let (ell, n) = (self.ell, self.n);
        let mut minus = vec![Grassmann::generator(n, 0).scale(eps)];
        for r in 0..ell {
            let mut g = Grassmann::zero(n);
            for c in 0..ell {
                g.add_term(1 << (c + 1), &m[(r, c)]);
            }
            minus.push(g);
        }
        let mut psi = vec![minus];
        for k in 0..(ell as i32) {
            let hb = htilde_basis(n, k);
            let mut images = Vec::new();
            for x in &self.a[(k + 1) as usize] {
                let mut rows = Vec::new();
                let mut rhs = Vec::new();
                for (c, pc) in self.a[0].iter().zip(&psi[0]) {
                    let target = self.apply(&psi, &x.bracket(c))?;
                    let cols: Vec<Vec<Rational>> = hb
                        .iter()
                        .map(|h| grassmann_coords(n, k - 1, &htilde_bracket(&self.stilde, h, pc)))
                        .collect();
                    let tc = grassmann_coords(n, k - 1, &target);
                    for (r, t) in tc.into_iter().enumerate() {
                        rows.push(cols.iter().map(|col| col[r].clone()).collect::<Vec<_>>());
                        rhs.push(vec![t]);
                    }
                }
                let sol = QMatrix::from_rows(rows).solve_unique(&QMatrix::from_rows(rhs))?;
                let mut g = Grassmann::zero(n);
                for (h, c) in hb.iter().zip(sol.column(0)) {
                    g = g.add(&h.scale(&c));
                }
                images.push(g);
            }
            psi.push(images);
        }
        Some(psi)
    }

    fn verify(&self, psi: &[Vec<Grassmann>]) -> bool {
        for (k, images) in psi.iter().enumerate() {
            let flat: Vec<Vec<Rational>> = images.iter().map(|g| grassmann_coords(self.n, k as i32 - 1, g)).collect();
            if flat.is_empty() || QMatrix::from_rows(flat).rank() != images.len() {
                return false;
            }
        }
        for (h, xs) in self.a.iter().enumerate() {
            for (q, ys) in self.a.iter().enumerate() {
                for (x, px) in xs.iter().zip(&psi[h]) {
                    for (y, py) in ys.iter().zip(&psi[q]) {
                        let Some(lhs) = self.apply(psi, &x.bracket(y)) else {
                            return false;
                        };
                        if lhs != htilde_bracket(&self.stilde, px, py) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// Whether `Λ^{•+1} ⊕ u·Λ^{•+2}_S` with the bracket induced from `S∂` is isomorphic
/// to `H̃(ℓ + 1, S̃)`, where `S̃` is `S` bordered by a zero first row and column.
pub fn iso_check_translation_case(s: &QMatrix) -> Result<IsoReport> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    if !s.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let sinv = s.inverse().ok_or(Error::DegenerateMatrix)?;
    let ell = s.rows();
    let n = ell + 1;
    let mut stilde = QMatrix::zeros(n, n);
    for r in 0..ell {
        for c in 0..ell {
            stilde[(r + 1, c + 1)] = s[(r, c)].clone();
        }
    }
    let a: Vec<Vec<AElem>> = (-1..(ell as i32)).map(|k| a_basis(s, k)).collect::<Result<_>>()?;
    let a_flat = a.iter().map(|xs| xs.iter().map(AElem::flat).collect()).collect();
    let setup = Setup {
        ell,
        n,
        stilde,
        a,
        a_flat,
    };
    let dims_a: Vec<usize> = setup.a.iter().map(Vec::len).collect();
    let dims_h: Vec<usize> = (-1..(ell as i32)).map(|k| htilde_basis(n, k).len()).collect();
    let mut report = IsoReport {
        isomorphic: false,
        dims_a: dims_a.clone(),
        dims_h: dims_h.clone(),
        seed: None,
    };
    if dims_a != dims_h {
        return Ok(report);
    }
    let id = QMatrix::identity(ell);
    for m in [id.clone(), s.clone(), sinv.clone()] {
        for sm in [int(1), int(-1)] {
            for eps in [int(1), int(-1)] {
                let seed = m.scale(&sm);
                if let Some(psi) = setup.try_seed(&eps, &seed) {
                    if setup.verify(&psi) {
                        report.isomorphic = true;
                        report.seed = Some((eps, seed));
                        return Ok(report);
                    }
                }
            }
        }
    }
    Ok(report)
}
