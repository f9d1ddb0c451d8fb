//! Dense exact linear algebra over ℚ: reduced echelon form, rank, kernels, solves.
//!
//! Pivoting always takes the first row (by index) with a nonzero entry in the
//! pivot column, so every result is deterministic.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{fmt_rational, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QMatrix{:?}", self.to_strings())
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix rows");
            data.extend(row);
        }
        QMatrix { rows: r, cols: c, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| crate::rational::int(x)).collect())
                .collect(),
        )
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
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

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut rows: Vec<Vec<Rational>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        let pivots = rref_in_place(&mut rows, self.cols);
        let mut out = QMatrix::zeros(self.rows, self.cols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                out[(i, j)] = x;
            }
        }
        (out, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the right kernel. Each free column in turn is set to one, the other
    /// free columns to zero, and the pivot columns are solved for.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rational::zero(); self.cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -r[(row, free)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// One solution of `self · x = b` (free variables set to zero), if any.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.rows);
        let mut rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i].clone());
                r
            })
            .collect();
        let pivots = rref_in_place(&mut rows, self.cols + 1);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = rows[row][self.cols].clone();
        }
        Some(x)
    }

    /// Solves `self · X = B` for a matrix of full column rank.
    ///
    /// Returns `None` if the rank is deficient or some column of `B` is outside the
    /// column space.
    pub fn solve_unique(&self, b: &QMatrix) -> Option<QMatrix> {
        assert_eq!(b.rows, self.rows);
        let (n, m) = (self.cols, b.cols);
        let mut rows: Vec<Vec<Rational>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend_from_slice(b.row(i));
                r
            })
            .collect();
        let pivots = rref_in_place(&mut rows, n + m);
        if pivots.len() < n || pivots[..n].iter().enumerate().any(|(i, &p)| p != i) || pivots.len() > n {
            return None;
        }
        let mut x = QMatrix::zeros(n, m);
        for i in 0..n {
            for j in 0..m {
                x[(i, j)] = rows[i][n + j].clone();
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let mut rows: Vec<Vec<Rational>> = (0..n)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        let pivots = rref_in_place(&mut rows, 2 * n);
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(QMatrix::from_rows(rows.into_iter().map(|r| r[n..].to_vec()).collect()))
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(fmt_rational).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        assert!(i < self.rows && j < self.cols, "index out of range");
        &mut self.data[i * self.cols + j]
    }
}

fn rref_in_place(rows: &mut [Vec<Rational>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let inv = rows[next][col].recip();
        for x in rows[next][col..].iter_mut() {
            if !x.is_zero() {
                *x *= &inv;
            }
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// Sparse builder for linear systems whose equations are indexed by arbitrary
/// ordered keys (typically polynomial coordinates). Unknowns are column indices.
#[derive(Debug, Clone)]
pub struct LinearSystem<K: Ord> {
    unknowns: usize,
    rows: BTreeMap<K, (BTreeMap<usize, Rational>, Rational)>,
}

impl<K: Ord + Clone> LinearSystem<K> {
    pub fn new(unknowns: usize) -> Self {
        LinearSystem {
            unknowns,
            rows: BTreeMap::new(),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn add_coefficient(&mut self, key: K, unknown: usize, value: &Rational) {
        if value.is_zero() {
            return;
        }
        assert!(unknown < self.unknowns);
        let entry = self.rows.entry(key).or_insert_with(|| (BTreeMap::new(), Rational::zero()));
        let slot = entry.0.entry(unknown).or_insert_with(Rational::zero);
        *slot += value;
    }

    pub fn add_rhs(&mut self, key: K, value: &Rational) {
        if value.is_zero() {
            return;
        }
        let entry = self.rows.entry(key).or_insert_with(|| (BTreeMap::new(), Rational::zero()));
        entry.1 += value;
    }

    /// Registers an equation with no coefficients yet.
    pub fn touch(&mut self, key: K) {
        self.rows.entry(key).or_insert_with(|| (BTreeMap::new(), Rational::zero()));
    }

    /// Equation keys in row order.
    pub fn keys(&self) -> Vec<K> {
        self.rows.keys().cloned().collect()
    }

    pub fn matrix(&self) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows.len(), self.unknowns);
        for (i, (coeffs, _)) in self.rows.values().enumerate() {
            for (&j, v) in coeffs {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn rhs(&self) -> Vec<Rational> {
        self.rows.values().map(|(_, b)| b.clone()).collect()
    }

    pub fn solve(&self) -> Option<Vec<Rational>> {
        if self.rows.is_empty() {
            return Some(vec![Rational::zero(); self.unknowns]);
        }
        self.matrix().solve(&self.rhs())
    }

    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        if self.rows.is_empty() {
            return (0..self.unknowns)
                .map(|i| {
                    let mut v = vec![Rational::zero(); self.unknowns];
                    v[i] = Rational::one();
                    v
                })
                .collect();
        }
        self.matrix().nullspace()
    }

    pub fn rank(&self) -> usize {
        if self.rows.is_empty() {
            0
        } else {
            self.matrix().rank()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn rank_and_kernel() {
        let m = QMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ker = m.nullspace();
        assert_eq!(ker.len(), 1);
        assert!(m.mul_vec(&ker[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn solve_and_inverse() {
        let m = QMatrix::from_i64(&[&[2, 1], &[1, 3]]);
        let x = m.solve(&[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![frac(4, 5), frac(7, 5)]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert!(QMatrix::from_i64(&[&[1, 1], &[1, 1]]).inverse().is_none());
        assert!(QMatrix::from_i64(&[&[1, 1], &[1, 1]]).solve(&[int(1), int(2)]).is_none());
    }

    #[test]
    fn sparse_system() {
        let mut sys: LinearSystem<&str> = LinearSystem::new(2);
        sys.add_coefficient("a", 0, &int(1));
        sys.add_coefficient("a", 1, &int(1));
        sys.add_rhs("a", &int(2));
        sys.add_coefficient("b", 1, &int(2));
        sys.add_rhs("b", &int(2));
        assert_eq!(sys.solve().unwrap(), vec![int(1), int(1)]);
        let empty: LinearSystem<u8> = LinearSystem::new(3);
        assert_eq!(empty.nullspace().len(), 3);
    }

    #[test]
    fn unique_solve_many() {
        let m = QMatrix::from_i64(&[&[1, 0], &[0, 2], &[1, 1]]);
        let b = QMatrix::from_i64(&[&[1, 3], &[4, 2], &[3, 4]]);
        let x = m.solve_unique(&b).unwrap();
        assert_eq!(m.mul(&x), b);
        let inconsistent = QMatrix::from_i64(&[&[1], &[4], &[0]]);
        assert!(m.solve_unique(&inconsistent).is_none());
        let deficient = QMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert!(deficient.solve_unique(&QMatrix::from_i64(&[&[1], &[1]])).is_none());
    }
}
