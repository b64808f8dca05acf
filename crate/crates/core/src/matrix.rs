//! Dense square/rectangular matrices over any [`Scalar`].

use std::ops::{Index, IndexMut};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn diagonal(entries: &[F]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// The elementary matrix with a single 1 at `(i, j)`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = F::one();
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

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let acc = out[(i, j)].clone() + a.clone() * b.clone();
                    out[(i, j)] = acc;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub shape mismatch");
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            if !b.is_zero() {
                *a = a.clone() + b.clone();
            }
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        self.map(|a| a.clone() * s.clone())
    }

    fn zip(&self, other: &Self, f: impl Fn(&F, &F) -> F) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_diagonal(&self) -> bool {
        self.nonzero_entries().iter().all(|&(i, j)| i == j)
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.nonzero_entries().iter().all(|&(i, j)| i <= j)
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.nonzero_entries().iter().all(|&(i, j)| i >= j)
    }

    /// Positions of nonzero entries in row-major order.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !self[(i, j)].is_zero())
            .collect()
    }

    pub fn diag(&self) -> Vec<F> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    /// Largest entrywise magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.clone() - b.clone()).magnitude())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows.start + i, cols.start + j)].clone())
    }

    /// Gauss-Jordan inverse; pivots on the largest-magnitude entry.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch(self.rows, self.cols));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&x, &y| a[(x, col)].magnitude().total_cmp(&a[(y, col)].magnitude()))
                .ok_or(Error::Singular)?;
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(col, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(col, j)].clone();
                }
            }
        }
        Ok(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn commutes_with(&self, other: &Self) -> bool {
        self.matmul(other) == other.matmul(self)
    }

    /// Row-major flat array of scalar JSON values.
    pub fn to_json(&self) -> Value {
        Value::Array(self.data.iter().map(Scalar::to_json).collect())
    }

    /// Nested rows, used for human-facing report fields.
    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array((0..self.cols).map(|j| self[(i, j)].to_json()).collect()))
                .collect(),
        )
    }
}

impl Matrix<Rational> {
    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(f64::from_rational)
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        assert!(i < self.rows && j < self.cols, "matrix index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        assert!(i < self.rows && j < self.cols, "matrix index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};

    #[test]
    fn inverse_round_trip_exact() {
        let m = Matrix::from_rows(vec![
            vec![int(2), int(1), int(0)],
            vec![ratio(1, 3), int(0), int(4)],
            vec![int(0), int(-1), ratio(5, 2)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(3));
        assert_eq!(inv.matmul(&m), Matrix::identity(3));
    }

    #[test]
    fn singular_inverse_errors() {
        let m = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(4)]]);
        assert_eq!(m.inverse(), Err(Error::Singular));
    }

    #[test]
    fn structure_predicates() {
        let u: Matrix<Rational> = Matrix::unit(3, 0, 2);
        assert!(u.is_upper_triangular());
        assert!(!u.is_lower_triangular());
        assert!(!u.is_diagonal());
        assert_eq!(u.nonzero_entries(), vec![(0, 2)]);
        assert!(u.transpose().is_lower_triangular());
    }
}
