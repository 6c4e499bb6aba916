//! Dense exact linear algebra over the rational-function field.
//!
//! Everything is deterministic: pivots are the first nonzero entry in column
//! order, so canonical inputs give canonical outputs.

use crate::error::{Error, Result};
use crate::ring::RatFunc;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<C: Scalar> {
    nrows: usize,
    ncols: usize,
    data: Vec<RatFunc<C>>,
}

impl<C: Scalar> Matrix<C> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Matrix {
            nrows,
            ncols,
            data: vec![RatFunc::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = RatFunc::one();
        }
        m
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> RatFunc<C>) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RatFunc<C>>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Matrix {
            nrows,
            ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn set_col(&mut self, j: usize, col: &[RatFunc<C>]) {
        assert_eq!(col.len(), self.nrows);
        for i in 0..self.nrows {
            self[(i, j)] = col[i].clone();
        }
    }

    pub fn col(&self, j: usize) -> Vec<RatFunc<C>> {
        (0..self.nrows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, s: &RatFunc<C>) -> Self {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = &*x * s;
        }
        out
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "matrix product shape");
        let mut out = Self::zeros(self.nrows, rhs.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.ncols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    out[(i, j)] = &out[(i, j)] + &prod;
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(rhs.data.iter()) {
            *x = &*x + y;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(rhs.data.iter()) {
            *x = &*x - y;
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for x in &mut out.data {
            *x = -&*x;
        }
        out
    }

    /// Gauss-Jordan inverse; `Err(SingularMatrix)` when rank-deficient.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.nrows, self.ncols, "inverse of non-square matrix");
        let n = self.nrows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or(Error::SingularMatrix)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let p = a[(col, col)].clone();
            let pinv = p.inv()?;
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] * &pinv;
                inv[(col, j)] = &inv[(col, j)] * &pinv;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let factor = a[(r, col)].clone();
                for j in 0..n {
                    let t = &a[(col, j)] * &factor;
                    a[(r, j)] = &a[(r, j)] - &t;
                    let t = &inv[(col, j)] * &factor;
                    inv[(r, j)] = &inv[(r, j)] - &t;
                }
            }
        }
        Ok(inv)
    }

    /// Solve self * x = rhs for square invertible self.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        Ok(self.inverse()?.mul(rhs))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.ncols {
            self.data.swap(a * self.ncols + j, b * self.ncols + j);
        }
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        let mut row = 0;
        for col in 0..a.ncols {
            let pivot = (row..a.nrows).find(|&r| !a[(r, col)].is_zero());
            let Some(p) = pivot else { continue };
            a.swap_rows(p, row);
            let pinv = a[(row, col)].inv().expect("nonzero pivot");
            for j in col..a.ncols {
                a[(row, j)] = &a[(row, j)] * &pinv;
            }
            for r in 0..a.nrows {
                if r == row || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in col..a.ncols {
                    let t = &a[(row, j)] * &f;
                    a[(r, j)] = &a[(r, j)] - &t;
                }
            }
            rank += 1;
            row += 1;
            if row == a.nrows {
                break;
            }
        }
        rank
    }

    /// Solve a possibly overdetermined exact system `A x = b`.
    ///
    /// Returns the unique solution; errors distinguish an inconsistent
    /// system from a rank-deficient (non-unique) one.
    pub fn solve_overdetermined(a: &Self, b: &[RatFunc<C>]) -> Result<Vec<RatFunc<C>>> {
        assert_eq!(a.nrows, b.len());
        let n = a.ncols;
        let mut m = Self::zeros(a.nrows, n + 1);
        for i in 0..a.nrows {
            for j in 0..n {
                m[(i, j)] = a[(i, j)].clone();
            }
            m[(i, n)] = b[i].clone();
        }
        let mut row = 0;
        let mut pivots = Vec::new();
        for col in 0..n {
            let Some(p) = (row..m.nrows).find(|&r| !m[(r, col)].is_zero()) else {
                continue;
            };
            m.swap_rows(p, row);
            let pinv = m[(row, col)].inv()?;
            for j in col..=n {
                m[(row, j)] = &m[(row, j)] * &pinv;
            }
            for r in 0..m.nrows {
                if r == row || m[(r, col)].is_zero() {
                    continue;
                }
                let f = m[(r, col)].clone();
                for j in col..=n {
                    let t = &m[(row, j)] * &f;
                    m[(r, j)] = &m[(r, j)] - &t;
                }
            }
            pivots.push(col);
            row += 1;
            if row == m.nrows {
                break;
            }
        }
        // inconsistency: a zero row with nonzero rhs
        for r in row..m.nrows {
            if !m[(r, n)].is_zero() {
                return Err(Error::Inconsistent(format!(
                    "residual row {} has nonzero right-hand side",
                    r
                )));
            }
        }
        if pivots.len() < n {
            return Err(Error::RankDeficient(format!(
                "rank {} < {} unknowns",
                pivots.len(),
                n
            )));
        }
        let mut x = vec![RatFunc::zero(); n];
        for (r, &col) in pivots.iter().enumerate() {
            x[col] = m[(r, n)].clone();
        }
        Ok(x)
    }

    /// Kronecker product.
    pub fn kron(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.nrows * rhs.nrows, self.ncols * rhs.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                if self[(i, j)].is_zero() {
                    continue;
                }
                for k in 0..rhs.nrows {
                    for l in 0..rhs.ncols {
                        if rhs[(k, l)].is_zero() {
                            continue;
                        }
                        out[(i * rhs.nrows + k, j * rhs.ncols + l)] =
                            &self[(i, j)] * &rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Substitute variables in every entry.
    pub fn substitute(
        &self,
        bindings: &std::collections::BTreeMap<usize, RatFunc<C>>,
    ) -> Result<Self> {
        let mut out = Self::zeros(self.nrows, self.ncols);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                out[(i, j)] = self[(i, j)].substitute(bindings)?;
            }
        }
        Ok(out)
    }
}

impl<C: Scalar> std::ops::Index<(usize, usize)> for Matrix<C> {
    type Output = RatFunc<C>;
    fn index(&self, (i, j): (usize, usize)) -> &RatFunc<C> {
        assert!(i < self.nrows && j < self.ncols, "index out of range");
        &self.data[i * self.ncols + j]
    }
}

impl<C: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut RatFunc<C> {
        assert!(i < self.nrows && j < self.ncols, "index out of range");
        &mut self.data[i * self.ncols + j]
    }
}

impl<C: Scalar> std::fmt::Debug for Matrix<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.nrows {
            write!(f, "  [")?;
            for j in 0..self.ncols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, Coef};

    #[test]
    fn inverse_of_symbolic_matrix() {
        let mut m: Matrix<Coef> = Matrix::zeros(2, 2);
        m[(0, 0)] = rat("-u1 + u2 - t1 - t2");
        m[(1, 0)] = rat("-(t1 + t2)");
        m[(1, 1)] = rat("u1 - u2");
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
    }

    #[test]
    fn singular_matrix_is_detected() {
        let mut m: Matrix<Coef> = Matrix::zeros(2, 2);
        m[(0, 0)] = rat("u");
        m[(1, 0)] = rat("u");
        assert!(matches!(m.inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn overdetermined_solve_detects_inconsistency_and_rank() {
        let mut a: Matrix<Coef> = Matrix::zeros(3, 2);
        a[(0, 0)] = rat("1");
        a[(1, 1)] = rat("1");
        a[(2, 0)] = rat("1");
        let x = Matrix::solve_overdetermined(&a, &[rat("t1"), rat("t2"), rat("t1")]).unwrap();
        assert_eq!(x, vec![rat("t1"), rat("t2")]);
        assert!(matches!(
            Matrix::solve_overdetermined(&a, &[rat("t1"), rat("t2"), rat("t2")]),
            Err(Error::Inconsistent(_))
        ));
        let mut b: Matrix<Coef> = Matrix::zeros(2, 2);
        b[(0, 0)] = rat("1");
        b[(1, 0)] = rat("1");
        assert!(matches!(
            Matrix::solve_overdetermined(&b, &[rat("1"), rat("1")]),
            Err(Error::RankDeficient(_))
        ));
    }
}
