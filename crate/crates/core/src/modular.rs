//! Square matrices over Z/p^m and linear algebra over F_p.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::qp::{add_mod, inv_mod, mul_mod, reduce_mod, residue_modulus, sub_mod, PContext};

/// Truncated representative of an element of M_n(Z_p), entries mod p^level.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PadicApproxMatrix {
    p: u64,
    level: u32,
    modulus: u64,
    n: usize,
    data: Vec<u64>,
}

impl PadicApproxMatrix {
    pub fn new(p: u64, level: u32, n: usize, data: Vec<u64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for n = {n}", data.len())));
        }
        let modulus = residue_modulus(p, level)?;
        let data = data.into_iter().map(|x| x % modulus).collect();
        Ok(PadicApproxMatrix { p, level, modulus, n, data })
    }

    pub fn from_rows(p: u64, level: u32, rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let modulus = residue_modulus(p, level)? as i128;
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch("non-square residue matrix".into()));
            }
            data.extend(r.iter().map(|&x| (x as i128).rem_euclid(modulus) as u64));
        }
        PadicApproxMatrix::new(p, level, n, data)
    }

    pub fn identity(p: u64, level: u32, n: usize) -> Result<Self> {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        PadicApproxMatrix::new(p, level, n, data)
    }

    /// Reduction of a p-integral rational matrix.
    pub fn from_qmatrix(a: &QMatrix, ctx: &PContext, level: u32) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch("non-square matrix".into()));
        }
        let data = a
            .entries()
            .iter()
            .map(|x| reduce_mod(x, level, ctx).map(|r| r.value))
            .collect::<Result<Vec<_>>>()?;
        PadicApproxMatrix::new(ctx.p(), level, a.n(), data)
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).into()).collect())
            .collect();
        QMatrix::from_rows(rows).expect("square")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.data.chunks(self.n).map(<[u64]>::to_vec).collect()
    }

    fn same_shape(&self, rhs: &Self) {
        assert_eq!((self.p, self.level, self.n), (rhs.p, rhs.level, rhs.n), "residue shapes");
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        self.same_shape(rhs);
        let (n, m) = (self.n, self.modulus);
        let mut data = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    data[idx] = add_mod(data[idx], mul_mod(a, rhs.data[k * n + j], m), m);
                }
            }
        }
        PadicApproxMatrix { data, ..self.clone() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.same_shape(rhs);
        let m = self.modulus;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| add_mod(a, b, m)).collect();
        PadicApproxMatrix { data, ..self.clone() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.same_shape(rhs);
        let m = self.modulus;
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| sub_mod(a, b, m)).collect();
        PadicApproxMatrix { data, ..self.clone() }
    }

    pub fn scale(&self, c: u64) -> Self {
        let m = self.modulus;
        PadicApproxMatrix { data: self.data.iter().map(|&a| mul_mod(a, c, m)).collect(), ..self.clone() }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = PadicApproxMatrix::identity(self.p, self.level, self.n).expect("same modulus");
        let mut sq = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == u64::from(i == j)))
    }

    /// Reduction to a lower level.
    pub fn reduce(&self, level: u32) -> Result<Self> {
        if level > self.level {
            return Err(Error::PrecisionExhausted(format!(
                "cannot raise level {} to {level}",
                self.level
            )));
        }
        PadicApproxMatrix::new(self.p, level, self.n, self.data.clone())
    }

    /// Same entries read at a higher level (least non-negative lift).
    pub fn lift(&self, level: u32) -> Result<Self> {
        PadicApproxMatrix::new(self.p, level, self.n, self.data.clone())
    }

    /// Entries of self - I all divisible by p^j.
    pub fn is_congruent_to_identity(&self, j: u32) -> bool {
        let pj = self.p.pow(j.min(self.level));
        (0..self.n).all(|r| {
            (0..self.n).all(|c| {
                let d = sub_mod(self.get(r, c), u64::from(r == c), self.modulus);
                d % pj == 0
            })
        })
    }

    /// Determinant modulo p.
    pub fn det_mod_p(&self) -> u64 {
        let rows: Vec<Vec<u64>> = self.to_rows().into_iter().map(|r| r.into_iter().map(|x| x % self.p).collect()).collect();
        det_fp(rows, self.p)
    }

    pub fn is_invertible(&self) -> bool {
        self.det_mod_p() != 0
    }

    /// Inverse mod p^level via elimination on unit pivots.
    pub fn inverse(&self) -> Option<Self> {
        let (n, m, p) = (self.n, self.modulus, self.p);
        let mut a = self.to_rows();
        let mut inv: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        for c in 0..n {
            let piv = (c..n).find(|&r| a[r][c] % p != 0)?;
            a.swap(c, piv);
            inv.swap(c, piv);
            let u = inv_mod(a[c][c], m)?;
            for j in 0..n {
                a[c][j] = mul_mod(a[c][j], u, m);
                inv[c][j] = mul_mod(inv[c][j], u, m);
            }
            for r in 0..n {
                if r == c || a[r][c] == 0 {
                    continue;
                }
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] = sub_mod(a[r][j], mul_mod(f, a[c][j], m), m);
                    inv[r][j] = sub_mod(inv[r][j], mul_mod(f, inv[c][j], m), m);
                }
            }
        }
        Some(PadicApproxMatrix { data: inv.into_iter().flatten().collect(), ..self.clone() })
    }
}

impl fmt::Display for PadicApproxMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}^{}", self.to_rows(), self.p, self.level)
    }
}

impl fmt::Debug for PadicApproxMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct ApproxJson {
    p: u64,
    level: u32,
    entries: Vec<Vec<u64>>,
}

impl Serialize for PadicApproxMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ApproxJson { p: self.p, level: self.level, entries: self.to_rows() }.serialize(s)
    }
}

fn det_fp(mut a: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| a[r][c] != 0) else {
            return 0;
        };
        if piv != c {
            a.swap(piv, c);
            det = sub_mod(0, det, p);
        }
        det = mul_mod(det, a[c][c], p);
        let inv = inv_mod(a[c][c], p).expect("nonzero in a prime field");
        for r in c + 1..n {
            if a[r][c] == 0 {
                continue;
            }
            let f = mul_mod(a[r][c], inv, p);
            for j in c..n {
                a[r][j] = sub_mod(a[r][j], mul_mod(f, a[c][j], p), p);
            }
        }
    }
    det
}

/// Solution set of A y = b over F_p: a particular solution and a kernel basis.
pub fn solve_fp(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| r.iter().map(|x| x % p).chain(std::iter::once(bi % p)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][c] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = inv_mod(m[rank][c], p).expect("prime field");
        for x in m[rank].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for r in 0..rows {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..=cols {
                    m[r][j] = sub_mod(m[r][j], mul_mod(f, m[rank][j], p), p);
                }
            }
        }
        pivots.push(c);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    if m[rank..].iter().any(|r| r[cols] != 0) {
        return None;
    }
    let mut x = vec![0u64; cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols];
    }
    let kernel = (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = sub_mod(0, m[r][f], p);
            }
            v
        })
        .collect();
    Some((x, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_mod_prime_power() {
        let a = PadicApproxMatrix::from_rows(3, 3, &[vec![1, 3], vec![2, 4]]).unwrap();
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        let sing = PadicApproxMatrix::from_rows(3, 2, &[vec![3, 0], vec![0, 1]]).unwrap();
        assert!(sing.inverse().is_none());
        assert!(!sing.is_invertible());
    }

    #[test]
    fn congruence_test() {
        let a = PadicApproxMatrix::from_rows(5, 3, &[vec![26, 25], vec![0, 1]]).unwrap();
        assert!(a.is_congruent_to_identity(2));
        assert!(!a.is_congruent_to_identity(3));
    }

    #[test]
    fn fp_solver() {
        // x + y = 1, 2x + 2y = 2 over F_3
        let (x, k) = solve_fp(&[vec![1, 1], vec![2, 2]], &[1, 2], 3).unwrap();
        assert_eq!((x[0] + x[1]) % 3, 1);
        assert_eq!(k.len(), 1);
        assert!(solve_fp(&[vec![1, 1], vec![1, 1]], &[0, 1], 3).is_none());
    }
}
