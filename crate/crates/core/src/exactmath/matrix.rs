use std::cmp::Ordering;
use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{Field, OrderedField, Rational, Scalar};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        Ok(())
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

/// Outcome of an exact semidefiniteness test.
#[derive(Clone, Debug, PartialEq)]
pub enum PsdVerdict<T> {
    Psd,
    /// `vᵀ M v < 0`; the value is reported alongside.
    NotPsd { witness: Vec<T>, value: T },
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| T::from_i64(x)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
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
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in matrix-vector product");
        (0..self.rows)
            .map(|r| dot(self.row(r), v))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    /// `vᵀ M v`.
    pub fn quad_form(&self, v: &[T]) -> T {
        dot(v, &self.mul_vec(v))
    }

    /// Frobenius inner product `Σ M_ij N_ij`.
    pub fn frobenius(&self, other: &Self) -> T {
        dot(&self.data, &other.data)
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    /// Keeps the listed rows and columns.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self[(rows[r], cols[c])].clone())
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let r = cols.first().map_or(0, |c| c.len());
        Self::from_fn(r, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc + x.clone() * y.clone();
        }
    }
    acc
}

impl<T: Field> Matrix<T> {
    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let best = (r..m.rows)
                .filter(|&i| !m[(i, c)].is_zero())
                .max_by(|&i, &j| m[(i, c)].magnitude().partial_cmp(&m[(j, c)].magnitude()).unwrap_or(Ordering::Equal));
            let Some(p) = best else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].inv();
            for j in c..m.cols {
                m[(r, j)] = m[(r, j)].clone() * inv.clone();
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    if !m[(r, j)].is_zero() {
                        m[(i, j)] = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space `{v : M v = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref();
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![T::zero(); self.cols];
            v[free] = T::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -r[(row, free)].clone();
            }
            out.push(v);
        }
        out
    }

    pub fn corank(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn inverse(&self) -> Option<Self> {
        assert!(self.is_square());
        let n = self.rows;
        let aug = Self::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        let (red, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(n, n, |r, c| red[(r, c + n)].clone()))
    }

    /// Solves `M x = b` for square invertible `M`.
    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        let inv = self.inverse()?;
        Some(inv.mul_vec(b))
    }

    /// Indices of a maximal set of linearly independent rows.
    pub fn independent_rows(&self) -> Vec<usize> {
        let (_, piv) = self.transpose().rref();
        piv
    }

    /// Fraction-free rank by Bareiss elimination.
    pub fn rank_bareiss(&self) -> usize {
        let mut m = self.clone();
        let mut prev = T::one();
        let mut rank = 0;
        let mut row = 0;
        for c in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(row, p);
            for i in row + 1..m.rows {
                for j in c + 1..m.cols {
                    let v = m[(row, c)].clone() * m[(i, j)].clone() - m[(i, c)].clone() * m[(row, j)].clone();
                    m[(i, j)] = v / prev.clone();
                }
                m[(i, c)] = T::zero();
            }
            prev = m[(row, c)].clone();
            row += 1;
            rank += 1;
        }
        rank
    }
}

impl<T: OrderedField> Matrix<T> {
    /// Exact semidefiniteness by symmetric-pivoting LDLᵀ.
    ///
    /// Zero pivots are accepted. On failure the witness `v` satisfies
    /// `vᵀ M v < 0` in the original coordinates.
    pub fn psd_check(&self) -> PsdVerdict<T> {
        assert!(self.is_symmetric(), "psd_check needs a symmetric matrix");
        let n = self.rows;
        let mut m = self.clone();
        // m = e · self · eᵀ throughout
        let mut e = Self::identity(n);
        for k in 0..n {
            if let Some(i) = (k..n).find(|&i| m[(i, i)].is_negative_exact()) {
                return self.witness_from(&e, unit(n, i));
            }
            let piv = (k..n)
                .filter(|&i| !m[(i, i)].is_zero())
                .max_by(|&i, &j| m[(i, i)].magnitude().partial_cmp(&m[(j, j)].magnitude()).unwrap_or(Ordering::Equal));
            let Some(p) = piv else {
                // zero diagonal on the trailing block: any nonzero entry is fatal
                for i in k..n {
                    for j in i + 1..n {
                        if !m[(i, j)].is_zero() {
                            let mut w = unit(n, i);
                            w[j] = if m[(i, j)].is_negative_exact() { T::one() } else { -T::one() };
                            return self.witness_from(&e, w);
                        }
                    }
                }
                return PsdVerdict::Psd;
            };
            m.swap_rows(k, p);
            m.swap_cols(k, p);
            e.swap_rows(k, p);
            let d = m[(k, k)].clone();
            let dinv = d.inv();
            for r in k + 1..n {
                if m[(r, k)].is_zero() {
                    continue;
                }
                let f = m[(r, k)].clone() * dinv.clone();
                for c in k..n {
                    if !m[(k, c)].is_zero() {
                        m[(r, c)] = m[(r, c)].clone() - f.clone() * m[(k, c)].clone();
                    }
                }
                for c in 0..n {
                    if !e[(k, c)].is_zero() {
                        e[(r, c)] = e[(r, c)].clone() - f.clone() * e[(k, c)].clone();
                    }
                }
            }
            // the matching column operation only clears row k
            for r in k + 1..n {
                m[(k, r)] = T::zero();
                m[(r, k)] = T::zero();
            }
        }
        PsdVerdict::Psd
    }

    fn witness_from(&self, e: &Self, w: Vec<T>) -> PsdVerdict<T> {
        let v = e.transpose().mul_vec(&w);
        let value = self.quad_form(&v);
        debug_assert!(value.is_negative_exact());
        PsdVerdict::NotPsd { witness: v, value }
    }

    pub fn is_psd(&self) -> bool {
        matches!(self.psd_check(), PsdVerdict::Psd)
    }

    /// Factorization `M = L diag(D) Lᵀ` for a PSD matrix, `None` otherwise.
    pub fn ldl(&self) -> Option<(Self, Vec<T>)> {
        if !self.is_psd() {
            return None;
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        let mut d = vec![T::zero(); n];
        let mut done = vec![false; n];
        let mut m = self.clone();
        // plain outer-product elimination in a data-dependent pivot order
        for col in 0..n {
            let piv = (0..n)
                .filter(|&i| !done[i] && !m[(i, i)].is_zero())
                .max_by(|&i, &j| m[(i, i)].magnitude().partial_cmp(&m[(j, j)].magnitude()).unwrap_or(Ordering::Equal));
            let Some(p) = piv else { break };
            done[p] = true;
            let dp = m[(p, p)].clone();
            let dinv = dp.inv();
            let colv: Vec<T> = (0..n).map(|i| m[(i, p)].clone() * dinv.clone()).collect();
            for i in 0..n {
                l[(i, col)] = colv[i].clone();
            }
            d[col] = dp.clone();
            for i in 0..n {
                if colv[i].is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !colv[j].is_zero() {
                        m[(i, j)] = m[(i, j)].clone() - colv[i].clone() * colv[j].clone() * dp.clone();
                    }
                }
            }
        }
        Some((l, d))
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }
}

fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

/// `L diag(D) Lᵀ`.
pub fn from_ldl<T: Scalar>(l: &Matrix<T>, d: &[T]) -> Matrix<T> {
    let n = l.rows();
    let k = l.cols();
    assert_eq!(k, d.len(), "LDL dimension mismatch");
    Matrix::from_fn(n, n, |i, j| {
        let mut acc = T::zero();
        for t in 0..k {
            if !d[t].is_zero() && !l[(i, t)].is_zero() && !l[(j, t)].is_zero() {
                acc = acc + l[(i, t)].clone() * d[t].clone() * l[(j, t)].clone();
            }
        }
        acc
    })
}

impl Matrix<Rational> {
    /// Rank by Bareiss elimination over the integers after clearing row
    /// denominators; an independent route from [`Matrix::rank`].
    pub fn rank_integer(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| {
                let lcm = self.row(r).iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                self.row(r).iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect()
            })
            .collect();
        let mut m = rows;
        let (nr, nc) = (self.rows, self.cols);
        let mut prev = BigInt::one();
        let mut row = 0;
        for c in 0..nc {
            if row == nr {
                break;
            }
            let Some(p) = (row..nr).find(|&i| !m[i][c].is_zero()) else { continue };
            m.swap(row, p);
            for i in row + 1..nr {
                for j in c + 1..nc {
                    let v = &m[row][c] * &m[i][j] - &m[i][c] * &m[row][j];
                    m[i][j] = v / &prev;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[row][c].clone();
            row += 1;
        }
        row
    }
}
