//! Dense matrices over a finite field, plus the structured generator
//! constructors used by the codes (Vandermonde, systematic Cauchy, Moore).
//!
//! All elimination is exact. Pivoting takes the first nonzero entry in the
//! column, so results are deterministic.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};

/// Row-major dense matrix bound to a field.
#[derive(Clone, PartialEq)]
pub struct Matrix<F: FiniteField> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Matrix over a prime or binary field.
pub type Mat = Matrix<Field>;

impl<F: FiniteField> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = field.one();
        }
        m
    }

    pub fn from_fn(field: &F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    /// Builds a matrix from row vectors; all rows must share a length.
    pub fn from_rows(field: &F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend(r);
        }
        Ok(Matrix { field: field.clone(), rows: n, cols, data })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn push_row(&mut self, row: &[F::Elem]) -> Result<()> {
        if row.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("row of {} entries into {} columns", row.len(), self.cols)));
        }
        self.data.extend_from_slice(row);
        self.rows += 1;
        Ok(())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let idx = i * rhs.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, rhs.get(l, j)));
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul_vec(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("vector of {} against {} rows", v.len(), self.rows)));
        }
        let f = &self.field;
        let mut out = vec![f.zero(); self.cols];
        for (i, a) in v.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(o, &f.mul(a, self.get(i, j)));
            }
        }
        Ok(out)
    }

    /// Matrix times column vector: `self · v`.
    pub fn mul_vec(&self, v: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!("vector of {} against {} columns", v.len(), self.cols)));
        }
        let f = &self.field;
        Ok((0..self.rows).map(|i| dot(f, self.row(i), v)).collect())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!("stacking {} over {} columns", self.cols, other.cols)));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(&self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]).clone())
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self::from_fn(&self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j).clone())
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !f.is_zero(self.get(i, c))) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = f.inv(self.get(r, c)).expect("pivot is nonzero");
            for j in c..self.cols {
                let v = f.mul(self.get(r, j), &inv);
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || f.is_zero(self.get(i, c)) {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = f.sub(self.get(i, j), &f.mul(&factor, self.get(r, j)));
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    pub fn invert(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!("cannot invert a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let f = &self.field;
        let mut aug = Self::from_fn(f, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                f.one()
            } else {
                f.zero()
            }
        });
        let pivots = aug.rref_in_place();
        let rank = pivots.iter().filter(|&&c| c < n).count();
        if rank < n {
            return Err(Error::Singular { rank, dim: n });
        }
        Ok(Self::from_fn(f, n, n, |i, j| aug.get(i, n + j).clone()))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }
}

pub(crate) fn dot<F: FiniteField>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> F::Elem {
    a.iter().zip(b).fold(f.zero(), |acc, (x, y)| f.add(&acc, &f.mul(x, y)))
}

impl<F: FiniteField> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

/// The `k × n` matrix with entry `(i, j) = points[j]^i`.
pub fn vandermonde<F: FiniteField>(field: &F, points: &[F::Elem], k: usize) -> Result<Matrix<F>> {
    check_distinct(points)?;
    if (points.len() as u64) > field.order() {
        return Err(Error::FieldTooSmall { order: field.order(), needed: points.len() as u64 });
    }
    Ok(Matrix::from_fn(field, k, points.len(), |i, j| field.pow(&points[j], i as u64)))
}

fn check_distinct<T: PartialEq>(points: &[T]) -> Result<()> {
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::DuplicatePoint(i, j));
            }
        }
    }
    Ok(())
}

/// `[I_t | C]` where `C` is the `t × (n-t)` Cauchy matrix `1 / (x_i - y_j)`
/// on the points `x_i = i` and `y_j = t + j`.
///
/// Every minor of a Cauchy matrix is nonzero, so every `t × t` column
/// submatrix of the result is invertible.
pub fn systematic_superregular(t: usize, n: usize, field: &Field) -> Result<Mat> {
    if t == 0 || n < t {
        return Err(Error::DimensionMismatch(format!("need 1 <= t <= n, got t={t}, n={n}")));
    }
    if (n as u64) > field.order() {
        return Err(Error::FieldTooSmall { order: field.order(), needed: n as u64 });
    }
    Ok(Matrix::from_fn(field, t, n, |i, j| {
        if j < t {
            u64::from(i == j)
        } else {
            let diff = field.sub(&(i as u64), &(j as u64));
            field.inv(&diff).expect("cauchy points are distinct")
        }
    }))
}

/// Moore matrix with entry `(i, j) = points[j]^(base^i)`, the generator of a
/// Gabidulin code over the subfield of order `base`.
pub fn moore_matrix<F: FiniteField>(field: &F, points: &[F::Elem], rows: usize, base: u64) -> Result<Matrix<F>> {
    if rows > points.len() {
        return Err(Error::DimensionMismatch(format!("{rows} rows from {} points", points.len())));
    }
    if !is_power_of(field.order(), base) {
        return Err(Error::UnsupportedField(format!(
            "field of order {} has no subfield of order {base}",
            field.order()
        )));
    }
    let build = |r: usize| {
        let mut m = Matrix::zeros(field, r, points.len());
        for (j, p) in points.iter().enumerate() {
            let mut v = p.clone();
            for i in 0..r {
                m.set(i, j, v.clone());
                v = field.pow(&v, base);
            }
        }
        m
    };
    // The square Moore matrix is nonsingular iff the points are independent over the subfield.
    if build(points.len()).rank() < points.len() {
        return Err(Error::DependentPoints(base));
    }
    Ok(build(rows))
}

fn is_power_of(mut n: u64, base: u64) -> bool {
    if base < 2 {
        return false;
    }
    while n.is_multiple_of(base) {
        n /= base;
    }
    n == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    /// Leibniz-expansion determinant, independent of elimination.
    fn det_oracle(f: &Field, m: &Mat) -> u64 {
        let n = m.rows();
        let mut acc = 0;
        for perm in (0..n).permutations(n) {
            let mut inversions = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if perm[i] > perm[j] {
                        inversions += 1;
                    }
                }
            }
            let mut term = 1;
            for (i, &p) in perm.iter().enumerate() {
                term = f.mul(&term, m.get(i, p));
            }
            if inversions % 2 == 1 {
                term = f.neg(&term);
            }
            acc = f.add(&acc, &term);
        }
        acc
    }

    #[test]
    fn rank_basics() {
        let f = gf(7);
        assert_eq!(Mat::identity(&f, 3).rank(), 3);
        assert_eq!(Mat::zeros(&f, 3, 3).rank(), 0);
        let v = vandermonde(&f, &[1, 2, 3], 3).unwrap();
        assert_ne!(det_oracle(&f, &v), 0);
        assert_eq!(v.rank(), 3);
    }

    #[test]
    fn invert_examples() {
        let f = gf(7);
        assert_eq!(Mat::identity(&f, 4).invert().unwrap(), Mat::identity(&f, 4));
        let d = Mat::from_rows(&f, 2, vec![vec![2, 0], vec![0, 3]]).unwrap();
        let expected = Mat::from_rows(&f, 2, vec![vec![4, 0], vec![0, 5]]).unwrap();
        assert_eq!(d.invert().unwrap(), expected);
        let s = Mat::from_rows(&f, 2, vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert_eq!(s.invert(), Err(Error::Singular { rank: 1, dim: 2 }));
        assert!(Mat::zeros(&f, 2, 3).invert().is_err());
    }

    #[test]
    fn vandermonde_examples() {
        let f = gf(7);
        let v = vandermonde(&f, &[1, 2, 3], 3).unwrap();
        let expected = Mat::from_rows(&f, 3, vec![vec![1, 1, 1], vec![1, 2, 3], vec![1, 4, 2]]).unwrap();
        assert_eq!(v, expected);
        let z = vandermonde(&f, &[0], 1).unwrap();
        assert_eq!(z.row(0), &[1]);
        assert_eq!(vandermonde(&f, &[1, 2, 1], 2), Err(Error::DuplicatePoint(0, 2)));
    }

    #[test]
    fn vandermonde_all_minors_invertible_gf11() {
        let f = gf(11);
        let v = vandermonde(&f, &[1, 2, 3, 4, 5, 6], 3).unwrap();
        let mut count = 0;
        for cols in (0..6).combinations(3) {
            let sub = v.select_columns(&cols);
            assert_ne!(det_oracle(&f, &sub), 0, "{cols:?}");
            assert!(sub.is_invertible());
            count += 1;
        }
        assert_eq!(count, 20);
    }

    #[test]
    fn superregular_examples() {
        let f = gf(11);
        assert_eq!(systematic_superregular(2, 2, &f).unwrap(), Mat::identity(&f, 2));
        let g = systematic_superregular(2, 6, &f).unwrap();
        let mut count = 0;
        for cols in (0..6).combinations(2) {
            assert_ne!(det_oracle(&f, &g.select_columns(&cols)), 0);
            count += 1;
        }
        assert_eq!(count, 15);
        let row = systematic_superregular(1, 4, &gf(7)).unwrap();
        assert!(row.row(0).iter().all(|&x| x != 0));
        assert!(matches!(systematic_superregular(2, 12, &f), Err(Error::FieldTooSmall { .. })));
    }

    #[test]
    fn superregular_parity_block_every_minor() {
        for p in [7u64, 11, 13] {
            let f = gf(p);
            for n in 2..=8usize.min(p as usize) {
                for t in 1..=3.min(n) {
                    let g = systematic_superregular(t, n, &f).unwrap();
                    let parity: Vec<usize> = (t..n).collect();
                    let c = g.select_columns(&parity);
                    for s in 1..=t.min(parity.len()) {
                        for rows in (0..t).combinations(s) {
                            for cols in (0..parity.len()).combinations(s) {
                                let minor = c.select_rows(&rows).select_columns(&cols);
                                assert_ne!(det_oracle(&f, &minor), 0, "p={p} t={t} n={n}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn moore_examples() {
        let f = Field::binary(4).unwrap();
        let x = 0b10;
        let m1 = moore_matrix(&f, &[1, x], 1, 2).unwrap();
        assert_eq!(m1.row(0), &[1, x]);
        let m2 = moore_matrix(&f, &[1, x], 2, 2).unwrap();
        assert_eq!(m2.row(1), &[1, f.mul(&x, &x)]);
        // x and x^2 + x... take 1 and 1: dependent
        assert_eq!(moore_matrix(&f, &[x, x], 1, 2), Err(Error::DependentPoints(2)));
        // 0b11 = 1 + x is in the span of {1, x}
        assert_eq!(moore_matrix(&f, &[1, x, 0b11], 2, 2), Err(Error::DependentPoints(2)));
    }

    #[test]
    fn transpose_preserves_rank() {
        let f = gf(5);
        let m = Mat::from_rows(&f, 3, vec![vec![1, 2, 3], vec![2, 4, 1], vec![3, 1, 4]]).unwrap();
        assert_eq!(m.rank(), m.transpose().rank());
    }
}
