//! Small dense matrices over any [`Real`] backend.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::real::Real;

#[derive(Clone, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Mat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    /// Build from row slices of `f64`.
    pub fn from_rows_f64(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        Self::from_fn(n, m, |i, j| T::from_f64(rows[i][j]))
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

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Principal submatrix on `idx` (order preserved).
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |a, b| self[(idx[a], idx[b])].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |a, b| self[(rows[a], cols[b])].clone())
    }

    /// `M x`
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = T::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() {
                        s += self[(i, j)].clone() * &x[j];
                    }
                }
                s
            })
            .collect()
    }

    /// `xᵀ M`
    pub fn vec_mul(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                let mut s = T::zero();
                for i in 0..self.rows {
                    if !self[(i, j)].is_zero() {
                        s += x[i].clone() * &self[(i, j)];
                    }
                }
                s
            })
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut s = T::zero();
            for k in 0..self.cols {
                s += self[(i, k)].clone() * &other[(k, j)];
            }
            s
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() * c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() + &other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - &other[(i, j)])
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| T::max_of(m, x.abs()))
    }

    pub fn map<U: Real>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Mat<f64> {
        self.map(|x| x.to_f64())
    }

    /// LU factorisation with partial pivoting; `None` if a pivot is exactly zero.
    pub fn lu(&self) -> Option<Lu<T>> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1;
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best.is_zero() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let piv = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let f = a[(i, k)].clone() / &piv;
                for j in k + 1..n {
                    let t = f.clone() * &a[(k, j)];
                    a[(i, j)] -= t;
                }
                a[(i, k)] = f;
            }
        }
        Some(Lu { a, perm, sign })
    }

    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        self.lu().map(|lu| lu.solve(b))
    }

    /// Determinant via LU (0 for singular input).
    pub fn det(&self) -> T {
        if self.rows == 0 {
            return T::one();
        }
        match self.lu() {
            None => T::zero(),
            Some(lu) => {
                let mut d = if lu.sign > 0 { T::one() } else { -T::one() };
                for i in 0..self.rows {
                    d *= &lu.a[(i, i)];
                }
                d
            }
        }
    }

    pub fn inverse(&self) -> Option<Self> {
        let lu = self.lu()?;
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let x = lu.solve(&e);
            for i in 0..n {
                inv[(i, j)] = x[i].clone();
            }
        }
        Some(inv)
    }
}

pub struct Lu<T> {
    a: Mat<T>,
    perm: Vec<usize>,
    sign: i32,
}

impl<T: Real> Lu<T> {
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.a.rows;
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for k in 0..i {
                let t = self.a[(i, k)].clone() * &y[k];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = self.a[(i, k)].clone() * &y[k];
                y[i] -= t;
            }
            y[i] /= &self.a[(i, i)];
        }
        y
    }
}

/// Solve `(s I − W) x = rhs` for a nonsingular M-matrix by elimination without
/// pivoting. Returns `None` if a pivot is not strictly positive, which happens
/// exactly when `s` does not exceed the spectral radius of `W`.
pub fn solve_shifted_m_matrix<T: Real>(w: &Mat<T>, s: &T, rhs: &[T]) -> Option<Vec<T>> {
    let n = w.rows();
    let mut a = Mat::from_fn(n, n, |i, j| if i == j { s.clone() - &w[(i, j)] } else { -w[(i, j)].clone() });
    let mut b = rhs.to_vec();
    for k in 0..n {
        if a[(k, k)] <= T::zero() {
            return None;
        }
        let piv = a[(k, k)].clone();
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = a[(i, k)].clone() / &piv;
            for j in k + 1..n {
                let t = f.clone() * &a[(k, j)];
                a[(i, j)] -= t;
            }
            let t = f * &b[k];
            b[i] -= t;
        }
    }
    for i in (0..n).rev() {
        for j in i + 1..n {
            let t = a[(i, j)].clone() * &b[j];
            b[i] -= t;
        }
        b[i] /= &a[(i, i)];
    }
    Some(b)
}

pub fn dot<T: Real>(x: &[T], y: &[T]) -> T {
    let mut s = T::zero();
    for (a, b) in x.iter().zip(y) {
        s += a.clone() * b;
    }
    s
}

pub fn sum<T: Real>(x: &[T]) -> T {
    let mut s = T::zero();
    for a in x {
        s += a;
    }
    s
}

pub fn max_abs_diff<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).fold(T::zero(), |m, (a, b)| T::max_of(m, (a.clone() - b).abs()))
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> fmt::Debug for Mat<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{:.6e}", self[(i, j)].to_f64())).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}
