//! Full-rank Z_p-lattices in Q_p^n, stored in canonical Hermite form.
//!
//! A lattice is kept as an upper-triangular basis (columns) with diagonal
//! entries p^{e_i} and each entry (i, j), i < j, reduced to the unique
//! representative of its class mod p^{e_i} Z_p lying in Z[1/p] ∩ [0, p^{e_i}).
//! Equality of lattices is therefore equality of bases.

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::QMatrix;
use crate::qp::{ExactScalar, PContext, Valuation};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    ctx: PContext,
    n: usize,
    basis: QMatrix,
}

impl Lattice {
    /// Z_p^n.
    pub fn standard(ctx: &PContext, n: usize) -> Self {
        Lattice { ctx: *ctx, n, basis: QMatrix::identity(n) }
    }

    /// p^{e_1} Z_p ⊕ … ⊕ p^{e_n} Z_p.
    pub fn diagonal(ctx: &PContext, exponents: &[i64]) -> Self {
        let diag: Vec<ExactScalar> = exponents.iter().map(|&e| ctx.p_power(e)).collect();
        Lattice { ctx: *ctx, n: exponents.len(), basis: QMatrix::diagonal(&diag) }
    }

    /// The lattice spanned by the columns of `gens` (n × m, rank n).
    pub fn from_generators(ctx: &PContext, gens: &QMatrix) -> Result<Self> {
        let basis = hermite_form(ctx, gens)?;
        Ok(Lattice { ctx: *ctx, n: gens.rows(), basis })
    }

    /// Accepts a basis already claimed canonical; re-canonicalizes and rejects
    /// it if it was not.
    pub fn from_canonical_basis(ctx: &PContext, basis: QMatrix) -> Result<Self> {
        let l = Lattice::from_generators(ctx, &basis)?;
        if l.basis != basis {
            return Err(Error::Input("lattice basis is not in canonical form".into()));
        }
        Ok(l)
    }

    pub fn ctx(&self) -> &PContext {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &QMatrix {
        &self.basis
    }

    /// Diagonal exponents e_i of the canonical basis.
    pub fn exponents(&self) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.basis[(i, i)].vp(self.ctx.p()).finite().expect("nonzero diagonal"))
            .collect()
    }

    /// v_p of the covolume: sum of the diagonal exponents.
    pub fn volume_exponent(&self) -> i64 {
        self.exponents().iter().sum()
    }

    /// p^e · L.
    pub fn scaled(&self, e: i64) -> Lattice {
        let basis = self.basis.scale(&self.ctx.p_power(e));
        Lattice::from_generators(&self.ctx, &basis).expect("scaling keeps full rank")
    }

    fn check_compatible(&self, other: &Lattice) -> Result<()> {
        if self.ctx.p() != other.ctx.p() || self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "lattices over (p={}, n={}) and (p={}, n={})",
                self.ctx.p(),
                self.n,
                other.ctx.p(),
                other.n
            )));
        }
        Ok(())
    }

    /// Whether x lies in the lattice.
    pub fn contains_vector(&self, x: &[ExactScalar]) -> bool {
        let col = QMatrix::from_columns(&[x.to_vec()]).expect("vector");
        let coords = self.basis.solve(&col).expect("basis invertible");
        coords.entries().iter().all(|c| c.is_p_integral(self.ctx.p()))
    }

    /// other ⊆ self.
    pub fn contains(&self, other: &Lattice) -> bool {
        if self.check_compatible(other).is_err() {
            return false;
        }
        let coords = self.basis.solve(&other.basis).expect("basis invertible");
        coords.entries().iter().all(|c| c.is_p_integral(self.ctx.p()))
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        Lattice::from_generators(&self.ctx, &self.basis.hcat(&other.basis))
    }

    /// {y : y·x ∈ Z_p for all x ∈ L} under the standard pairing.
    pub fn dual(&self) -> Lattice {
        let inv_t = self.basis.inverse().expect("basis invertible").transpose();
        Lattice::from_generators(&self.ctx, &inv_t).expect("full rank")
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Lattice> {
        self.check_compatible(other)?;
        Ok(self.dual().sum(&other.dual())?.dual())
    }

    /// Exponent e with [self : small] = p^e.
    pub fn index(&self, small: &Lattice) -> Result<i64> {
        self.check_compatible(small)?;
        if !self.contains(small) {
            return Err(Error::NotNested);
        }
        Ok(small.volume_exponent() - self.volume_exponent())
    }

    /// The image A·L.
    pub fn apply(&self, a: &QMatrix) -> Result<Lattice> {
        if !a.is_square() || a.rows() != self.n {
            return Err(Error::DimensionMismatch("matrix does not act on this lattice".into()));
        }
        if a.det().is_zero() {
            return Err(Error::Singular);
        }
        Lattice::from_generators(&self.ctx, &a.mul(&self.basis))
    }

    /// Smith exponents of `self` relative to `reference`, ascending.
    pub fn elementary_divisors(&self, reference: &Lattice) -> Result<Vec<i64>> {
        Ok(adapted_basis(reference, self)?.0)
    }
}

/// [L_big : L_small] as a p-exponent.
pub fn lattice_index(big: &Lattice, small: &Lattice) -> Result<i64> {
    big.index(small)
}

pub fn lattice_sum(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    a.sum(b)
}

pub fn lattice_intersect(a: &Lattice, b: &Lattice) -> Result<Lattice> {
    a.intersect(b)
}

pub fn apply(a: &QMatrix, l: &Lattice) -> Result<Lattice> {
    l.apply(a)
}

pub fn elementary_divisors(reference: &Lattice, l: &Lattice) -> Result<Vec<i64>> {
    l.elementary_divisors(reference)
}

/// Smith normal form of `l` relative to `reference` over Z_(p).
///
/// Returns exponents e_1 ≤ … ≤ e_n and a matrix P whose columns b_i form a
/// basis of `reference` such that the p^{e_i} b_i form a basis of `l`.
pub fn adapted_basis(reference: &Lattice, l: &Lattice) -> Result<(Vec<i64>, QMatrix)> {
    reference.check_compatible(l)?;
    let p = reference.ctx.p();
    let n = reference.n;
    let mut m = reference.basis.solve(&l.basis)?;
    // invariant: reference-coordinates of l = pinv · m · (unimodular)
    let mut pinv = QMatrix::identity(n);
    let mut exps = Vec::with_capacity(n);
    for t in 0..n {
        let mut best: Option<(Valuation, usize, usize)> = None;
        for i in t..n {
            for j in t..n {
                let v = m[(i, j)].vp(p);
                if best.map_or(true, |(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let (v, bi, bj) = best.expect("nonempty block");
        let e = v.finite().ok_or(Error::NotFullRank)?;
        m.swap_rows(t, bi);
        pinv.swap_cols(t, bi);
        m.swap_cols(t, bj);
        let pivot = m[(t, t)].clone();
        for i in t + 1..n {
            if m[(i, t)].is_zero() {
                continue;
            }
            let f = &m[(i, t)] / &pivot;
            for j in t..n {
                let d = &f * &m[(t, j)];
                m[(i, j)] = &m[(i, j)] - &d;
            }
            // row_i -= f row_t  ⇒  col_t of pinv += f col_i
            for r in 0..n {
                let d = &f * &pinv[(r, i)];
                pinv[(r, t)] = &pinv[(r, t)] + &d;
            }
        }
        for j in t + 1..n {
            m[(t, j)] = ExactScalar::zero();
        }
        exps.push(e);
    }
    Ok((exps, reference.basis.mul(&pinv)))
}

/// Representative of x mod p^e Z_p in Z[1/p] ∩ [0, p^e).
fn reduce_mod_p_power(x: &ExactScalar, e: i64, ctx: &PContext) -> ExactScalar {
    let p = ctx.p();
    let v = match x.vp(p) {
        Valuation::Infinite => return ExactScalar::zero(),
        Valuation::Finite(v) => v,
    };
    if v >= e {
        return ExactScalar::zero();
    }
    // x = a / (p^s u) with gcd(u, p) = 1
    let pb = ctx.p_big();
    let mut u = x.denom().clone();
    let mut s: i64 = 0;
    while (&u % &pb).is_zero() {
        u /= &pb;
        s += 1;
    }
    let m = (e + s) as usize;
    debug_assert!(m > 0);
    let modulus = num_traits::pow(pb.clone(), m);
    let uinv = u.modinv(&modulus).expect("unit denominator");
    let c = num_integer::Integer::mod_floor(&(x.numer() * uinv), &modulus);
    ExactScalar::new(c, num_traits::pow(pb, s as usize))
}

/// Canonical Hermite basis of the Z_(p)-span of the columns of `gens`.
fn hermite_form(ctx: &PContext, gens: &QMatrix) -> Result<QMatrix> {
    let p = ctx.p();
    let n = gens.rows();
    let mut active: Vec<Vec<ExactScalar>> = gens.columns();
    let mut basis: Vec<Vec<ExactScalar>> = vec![Vec::new(); n];
    let mut exps = vec![0i64; n];

    for i in (0..n).rev() {
        let (pos, v) = active
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c[i].vp(p)))
            .min_by_key(|&(_, v)| v)
            .ok_or(Error::NotFullRank)?;
        let e = v.finite().ok_or(Error::NotFullRank)?;
        let mut piv = active.swap_remove(pos);
        let factor = &ctx.p_power(e) / &piv[i];
        for x in piv.iter_mut() {
            *x = &*x * &factor;
        }
        for col in active.iter_mut() {
            if col[i].is_zero() {
                continue;
            }
            let f = &col[i] / &piv[i];
            for r in 0..=i {
                if !piv[r].is_zero() {
                    col[r] = &col[r] - &(&f * &piv[r]);
                }
            }
        }
        basis[i] = piv;
        exps[i] = e;
    }

    // reduce above the diagonal; column ops with col_i only touch rows ≤ i
    for j in 0..n {
        for i in (0..j).rev() {
            let x = basis[j][i].clone();
            let r = reduce_mod_p_power(&x, exps[i], ctx);
            if r == x {
                continue;
            }
            let q = &(&x - &r) / &basis[i][i];
            let col_i = basis[i].clone();
            for k in 0..=i {
                if !col_i[k].is_zero() {
                    basis[j][k] = &basis[j][k] - &(&q * &col_i[k]);
                }
            }
        }
    }
    QMatrix::from_columns(&basis)
}

/// JSON form of a lattice: its canonical basis plus a tag.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeFile {
    pub p: u64,
    pub n: usize,
    pub entries: Vec<Vec<ExactScalar>>,
    pub lattice: bool,
}

impl From<&Lattice> for LatticeFile {
    fn from(l: &Lattice) -> Self {
        LatticeFile { p: l.ctx.p(), n: l.n, entries: l.basis.to_rows(), lattice: true }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PContext {
        PContext::new(p, 8).unwrap()
    }

    fn m(rows: &[&[&str]]) -> QMatrix {
        QMatrix::parse_rows(rows)
    }

    #[test]
    fn canonical_form_is_reduced() {
        let c = ctx(3);
        // columns (2, 0) and (1/5, 9/2)
        let l = Lattice::from_generators(&c, &m(&[&["2", "1/5"], &["0", "9/2"]])).unwrap();
        assert_eq!(l.exponents(), vec![0, 2]);
        let b = l.basis();
        assert_eq!(b[(1, 0)], ExactScalar::zero());
        // canonical form of a canonical basis is itself
        assert_eq!(Lattice::from_generators(&c, b).unwrap(), l);
        assert!(Lattice::from_canonical_basis(&c, b.clone()).is_ok());
    }

    #[test]
    fn sum_examples() {
        let c = ctx(5);
        let a = Lattice::diagonal(&c, &[1, 0]);
        let b = Lattice::diagonal(&c, &[0, 1]);
        assert_eq!(a.sum(&a).unwrap(), a);
        assert_eq!(a.sum(&b).unwrap(), Lattice::standard(&c, 2));
        let s = a.sum(&Lattice::standard(&c, 2)).unwrap();
        assert!(s.contains(&Lattice::standard(&c, 2)));
    }

    #[test]
    fn intersection_examples() {
        let c = ctx(5);
        let a = Lattice::diagonal(&c, &[1, 0]);
        let b = Lattice::diagonal(&c, &[0, 1]);
        assert_eq!(a.intersect(&a).unwrap(), a);
        assert_eq!(a.intersect(&b).unwrap(), Lattice::diagonal(&c, &[1, 1]));
        let z = Lattice::standard(&c, 2);
        assert_eq!(z.intersect(&z.scaled(1)).unwrap(), z.scaled(1));
    }

    #[test]
    fn index_examples() {
        let c = ctx(3);
        let z = Lattice::standard(&c, 2);
        assert_eq!(z.index(&Lattice::diagonal(&c, &[1, 0])).unwrap(), 1);
        assert_eq!(z.index(&z).unwrap(), 0);
        let big = Lattice::diagonal(&c, &[-1, 0]);
        let small = Lattice::diagonal(&c, &[1, 2]);
        assert_eq!(big.index(&small).unwrap(), 4);
        assert_eq!(small.index(&big), Err(Error::NotNested));
    }

    #[test]
    fn apply_examples() {
        let c = ctx(3);
        let z = Lattice::standard(&c, 2);
        assert_eq!(z.apply(&QMatrix::identity(2)).unwrap(), z);
        assert_eq!(z.apply(&m(&[&["3", "0"], &["0", "1"]])).unwrap(), Lattice::diagonal(&c, &[1, 0]));
        let shear = m(&[&["1", "1/3"], &["0", "1"]]);
        let img = z.apply(&shear).unwrap();
        let expect = Lattice::from_generators(&c, &m(&[&["1", "1/3"], &["0", "1"]])).unwrap();
        assert_eq!(img, expect);
        assert!(img.contains_vector(&["1/3".parse().unwrap(), "1".parse().unwrap()]));
        assert!(!img.contains_vector(&["1/3".parse().unwrap(), "0".parse().unwrap()]));
        assert_eq!(z.apply(&m(&[&["1", "2"], &["2", "4"]])), Err(Error::Singular));
    }

    #[test]
    fn elementary_divisor_examples() {
        let c = ctx(3);
        let z = Lattice::standard(&c, 2);
        assert_eq!(z.elementary_divisors(&z).unwrap(), vec![0, 0]);
        let d = Lattice::diagonal(&c, &[1, -1]);
        assert_eq!(d.elementary_divisors(&z).unwrap(), vec![-1, 1]);
        let sheared = z.apply(&m(&[&["1", "1/3"], &["0", "1"]])).unwrap();
        // determinant 1 forces the exponents to sum to zero
        assert_eq!(sheared.elementary_divisors(&z).unwrap(), vec![-1, 1]);
    }

    #[test]
    fn adapted_basis_spans() {
        let c = ctx(2);
        let z = Lattice::standard(&c, 3);
        let l = z
            .apply(&m(&[&["1", "1/2", "3"], &["0", "4", "1/8"], &["2", "0", "1"]]))
            .unwrap();
        let (exps, p) = adapted_basis(&z, &l).unwrap();
        assert!(exps.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(Lattice::from_generators(&c, &p).unwrap(), z);
        let scaled: Vec<Vec<ExactScalar>> = p
            .columns()
            .into_iter()
            .zip(&exps)
            .map(|(col, &e)| col.iter().map(|x| x * &c.p_power(e)).collect())
            .collect();
        assert_eq!(Lattice::from_generators(&c, &QMatrix::from_columns(&scaled).unwrap()).unwrap(), l);
    }

    #[test]
    fn reduction_representatives() {
        let c = ctx(3);
        let r = |x: &str, e| reduce_mod_p_power(&x.parse().unwrap(), e, &c).to_string();
        assert_eq!(r("1/2", 1), "2");
        assert_eq!(r("1/6", 0), "2/3");
        assert_eq!(r("4/9", -1), "1/9");
        assert_eq!(r("5", -1), "0");
        assert_eq!(r("9", 2), "0");
        assert_eq!(r("-1/9", -1), "2/9");
    }
}
