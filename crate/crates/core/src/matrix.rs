//! Dense matrices over Q with exact arithmetic.
//!
//! Square matrices model elements of GL(n, Q_p) with rational entries; the
//! rectangular case only appears for generator stacks and subspace bases.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::qp::{ExactScalar, Valuation};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ExactScalar>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ExactScalar::one();
        }
        m
    }

    pub fn diagonal(diag: &[ExactScalar]) -> Self {
        let mut m = QMatrix::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = d.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ExactScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Builds a matrix from string entries such as `"1/3"`; panics on bad input.
    pub fn parse_rows(rows: &[&[&str]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| s.parse().expect("scalar literal")).collect())
            .collect();
        QMatrix::from_rows(rows).expect("rectangular literal")
    }

    pub fn from_columns(cols: &[Vec<ExactScalar>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|col| col.len() != r) {
            return Err(Error::DimensionMismatch("ragged columns".into()));
        }
        let mut m = QMatrix::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
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

    /// Dimension of a square matrix.
    pub fn n(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[ExactScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<ExactScalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<ExactScalar>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == QMatrix::identity(self.rows)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(ExactScalar::is_zero)
    }

    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        QMatrix { data, ..*self }
    }

    pub fn sub(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        QMatrix { data, ..*self }
    }

    pub fn scale(&self, c: &ExactScalar) -> QMatrix {
        QMatrix { data: self.data.iter().map(|a| a * c).collect(), ..*self }
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hcat(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.rows, rhs.rows);
        let mut cols = self.columns();
        cols.extend(rhs.columns());
        QMatrix::from_columns(&cols).expect("equal heights")
    }

    /// Square submatrix on rows/cols `range`.
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> QMatrix {
        let mut b = QMatrix::zeros(rows.len(), cols.len());
        for (bi, i) in rows.clone().enumerate() {
            for (bj, j) in cols.clone().enumerate() {
                b[(bi, bj)] = self[(i, j)].clone();
            }
        }
        b
    }

    pub fn min_valuation(&self, p: u64) -> Valuation {
        self.data.iter().map(|x| x.vp(p)).min().unwrap_or(Valuation::Infinite)
    }

    /// Gaussian elimination over Q.
    pub fn det(&self) -> ExactScalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = ExactScalar::one();
        for c in 0..n {
            let Some(piv) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return ExactScalar::zero();
            };
            if piv != c {
                m.swap_rows(piv, c);
                det = -det;
            }
            let pv = m[(c, c)].clone();
            det = det * &pv;
            for r in c + 1..n {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let f = &m[(r, c)] / &pv;
                for j in c..n {
                    let t = &f * &m[(c, j)];
                    m[(r, j)] = &m[(r, j)] - &t;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Result<QMatrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = self.hcat(&QMatrix::identity(n));
        let rank = aug.rref_in_place(n);
        if rank < n {
            return Err(Error::Singular);
        }
        Ok(aug.block(0..n, n..2 * n))
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<QMatrix> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = QMatrix::identity(self.rows);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// `self^{-1} * rhs`, without forming the inverse.
    pub fn solve(&self, rhs: &QMatrix) -> Result<QMatrix> {
        let n = self.rows;
        let mut aug = self.hcat(rhs);
        if aug.rref_in_place(n) < n {
            return Err(Error::Singular);
        }
        Ok(aug.block(0..n, n..n + rhs.cols))
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Reduced row echelon form using pivots in the first `pivot_cols`
    /// columns; returns the rank found there.
    fn rref_in_place(&mut self, pivot_cols: usize) -> usize {
        let mut rank = 0;
        for c in 0..pivot_cols {
            let Some(piv) = (rank..self.rows).find(|&r| !self[(r, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(piv, rank);
            let inv = self[(rank, c)].recip();
            for j in 0..self.cols {
                self[(rank, j)] = &self[(rank, j)] * &inv;
            }
            for r in 0..self.rows {
                if r == rank || self[(r, c)].is_zero() {
                    continue;
                }
                let f = self[(r, c)].clone();
                for j in 0..self.cols {
                    let t = &f * &self[(rank, j)];
                    self[(r, j)] = &self[(r, j)] - &t;
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let c = m.cols;
        m.rref_in_place(c)
    }

    /// A basis (as columns) of the column space.
    pub fn column_space(&self) -> QMatrix {
        let mut t = self.transpose();
        let c = t.cols;
        let r = t.rref_in_place(c);
        t.block(0..r, 0..c).transpose()
    }

    /// Null space basis as columns.
    pub fn null_space(&self) -> QMatrix {
        let mut m = self.clone();
        let c = m.cols;
        let rank = m.rref_in_place(c);
        let mut pivots = Vec::with_capacity(rank);
        for r in 0..rank {
            let pc = (0..c).find(|&j| !m[(r, j)].is_zero()).expect("pivot row");
            pivots.push(pc);
        }
        let free: Vec<usize> = (0..c).filter(|j| !pivots.contains(j)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![ExactScalar::zero(); c];
            v[f] = ExactScalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[(r, f)];
            }
            basis.push(v);
        }
        if basis.is_empty() {
            return QMatrix::zeros(c, 0);
        }
        QMatrix::from_columns(&basis).expect("uniform columns")
    }

    /// Extends the independent columns of `self` by standard basis vectors to
    /// an invertible square matrix; the original columns come first.
    pub fn complete_basis(&self) -> QMatrix {
        let n = self.rows;
        let mut cols = self.columns();
        for i in 0..n {
            if cols.len() == n {
                break;
            }
            let mut e = vec![ExactScalar::zero(); n];
            e[i] = ExactScalar::one();
            cols.push(e);
            if QMatrix::from_columns(&cols).expect("uniform").rank() < cols.len() {
                cols.pop();
            }
        }
        QMatrix::from_columns(&cols).expect("uniform")
    }

    /// Least common multiple of all entry denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Characteristic polynomial det(xI - A), low degree first, monic.
    ///
    /// Clears denominators (A = B/d) and runs the division-free Berkowitz
    /// recurrence on the integer matrix B, then rescales coefficients by
    /// powers of d.
    pub fn char_poly(&self) -> Vec<ExactScalar> {
        assert!(self.is_square(), "characteristic polynomial of a non-square matrix");
        let n = self.rows;
        let d = self.denominator_lcm();
        let b: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let x = self[(i, j)].as_ratio();
                        x.numer() * (&d / x.denom())
                    })
                    .collect()
            })
            .collect();
        let high_first = berkowitz(&b);
        // coefficient of x^i in chi_A is b_i * d^(i - n)
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let bi = &high_first[n - i];
            let scale = num_traits::pow(d.clone(), n - i);
            out.push(ExactScalar::new(bi.clone(), scale));
        }
        out
    }

    /// (A - I)^n = 0.
    pub fn is_unipotent(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let nil = self.sub(&QMatrix::identity(n));
        nil.pow(n as i64).map(|m| m.is_zero()).unwrap_or(false)
    }
}

/// Berkowitz: coefficients of det(xI - B), highest degree first.
fn berkowitz(b: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = b.len();
    let mut poly = vec![BigInt::one()];
    for r in 0..n {
        // Toeplitz column: 1, -a_rr, -R C, -R A C, ..., -R A^{r-1} C
        let mut col = Vec::with_capacity(r + 2);
        col.push(BigInt::one());
        col.push(-b[r][r].clone());
        let mut v: Vec<BigInt> = (0..r).map(|i| b[i][r].clone()).collect();
        for _ in 0..r {
            let rc: BigInt = (0..r).map(|j| &b[r][j] * &v[j]).sum();
            col.push(-rc);
            v = (0..r).map(|i| (0..r).map(|j| &b[i][j] * &v[j]).sum()).collect();
        }
        let mut next = vec![BigInt::zero(); r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            for (j, pj) in poly.iter().enumerate() {
                if i >= j && !col[i - j].is_zero() {
                    *slot += &col[i - j] * pj;
                }
            }
        }
        poly = next;
    }
    poly
}

impl Index<(usize, usize)> for QMatrix {
    type Output = ExactScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ExactScalar {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExactScalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl serde::Serialize for QMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Characteristic polynomial of a square matrix, low degree first.
pub fn char_poly(a: &QMatrix) -> Vec<ExactScalar> {
    a.char_poly()
}

/// Evaluates a polynomial (low degree first) at x.
pub fn eval_poly(coeffs: &[ExactScalar], x: &ExactScalar) -> ExactScalar {
    coeffs.iter().rev().fold(ExactScalar::zero(), |acc, c| acc * x + c)
}
