//! Small dense matrices over a [`Scalar`] field.

use std::ops::{Add, Mul, Sub};

use num::Zero;

use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data: Vec<T> = rows.into_iter().flatten().collect();
        Self::from_vec(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_vec(rows, cols, vec![T::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Matrix unit `E_ij`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = T::one();
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

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &T) -> Self {
        let data = self.data.iter().map(|x| x.clone() * s.clone()).collect();
        Self::from_vec(self.rows, self.cols, data)
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(T::zero(), |acc, j| {
                    acc + self[(i, j)].clone() * v[j].clone()
                })
            })
            .collect()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    /// Largest absolute entry.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    /// Determinant by Gaussian elimination with
    /// magnitude pivoting.
    pub fn determinant(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let Some(p) = pivot_row(&a, col, col) else {
                return T::zero();
            };
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pv = a[(col, col)].clone();
            det = det * pv.clone();
            for r in col + 1..n {
                let f = a[(r, col)].clone() / pv.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                    a[(r, c)] = v;
                }
            }
        }
        det
    }

    /// Gauss–Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let p = pivot_row(&a, col, col)?;
            if p != col {
                a.swap_rows(p, col);
                inv.swap_rows(p, col);
            }
            let pv = a[(col, col)].clone();
            for c in 0..n {
                a[(col, c)] = a[(col, c)].clone() / pv.clone();
                inv[(col, c)] = inv[(col, c)].clone() / pv.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let va = a[(r, c)].clone() - f.clone() * a[(col, c)].clone();
                    a[(r, c)] = va;
                    let vi = inv[(r, c)].clone() - f.clone() * inv[(col, c)].clone();
                    inv[(r, c)] = vi;
                }
            }
        }
        Some(inv)
    }

    /// Rank by row reduction.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            if rank == self.rows {
                break;
            }
            let Some(p) = pivot_row(&a, rank, col) else {
                continue;
            };
            a.swap_rows(p, rank);
            let pv = a[(rank, col)].clone();
            for r in rank + 1..self.rows {
                let f = a[(r, col)].clone() / pv.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..self.cols {
                    let v = a[(r, c)].clone() - f.clone() * a[(rank, c)].clone();
                    a[(r, c)] = v;
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat::from_vec(self.rows, self.cols, self.data.iter().map(f).collect())
    }
}

fn pivot_row<T: Scalar>(a: &Mat<T>, from: usize, col: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for r in from..a.rows {
        let v = &a[(r, col)];
        if v.is_zero() {
            continue;
        }
        let m = v.magnitude();
        if best.is_none_or(|(_, bm)| m > bm) {
            best = Some((r, m));
        }
    }
    best.map(|(r, _)| r)
}

impl<T> std::ops::Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = Mat::<T>::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = &self[(i, l)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out[(i, j)].clone() + a.clone() * rhs[(l, j)].clone();
                    out[(i, j)] = v;
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        Mat::from_vec(self.rows, self.cols, data)
    }
}

impl<T: Scalar> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.clone() - b.clone())
            .collect();
        Mat::from_vec(self.rows, self.cols, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, Q};

    fn m(rows: Vec<Vec<i64>>) -> Mat<Q> {
        Mat::from_rows(rows.into_iter().map(|r| r.into_iter().map(qi).collect()).collect())
    }

    #[test]
    fn exact_inverse_and_determinant() {
        let a = m(vec![vec![2, 1], vec![7, 4]]);
        assert_eq!(a.determinant(), qi(1));
        let inv = a.inverse().unwrap();
        assert_eq!(inv, m(vec![vec![4, -1], vec![-7, 2]]));
        assert_eq!(&a * &inv, Mat::identity(2));

        let b = Mat::from_rows(vec![vec![q(1, 2), qi(0)], vec![qi(3), q(2, 3)]]);
        assert_eq!(b.determinant(), q(1, 3));
        assert_eq!(&b * &b.inverse().unwrap(), Mat::identity(2));
    }

    #[test]
    fn singular_has_no_inverse() {
        let a = m(vec![vec![1, 2], vec![2, 4]]);
        assert!(a.inverse().is_none());
        assert_eq!(a.determinant(), qi(0));
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn commutator_of_units() {
        let e12: Mat<Q> = Mat::unit(2, 0, 1);
        let e21: Mat<Q> = Mat::unit(2, 1, 0);
        let h = &Mat::unit(2, 0, 0) - &Mat::unit(2, 1, 1);
        assert_eq!(e12.commutator(&e21), h);
    }
}
