//! Brute-force ground truth on finite matrix groups over Z/p^m.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::modular::PadicApproxMatrix;
use crate::qp::{inv_mod, residue_modulus};
use crate::steinitz::{coprime_finite, gl_fp_order};

pub const DEFAULT_CAP: usize = 1_000_000;

/// A finite subgroup of GL(n, Z/p^m), elements in canonical (lexicographic
/// row-major) order.
#[derive(Debug, Clone)]
pub struct FiniteGroupTable {
    p: u64,
    level: u32,
    n: usize,
    elements: Vec<PadicApproxMatrix>,
    generators: Vec<PadicApproxMatrix>,
}

impl FiniteGroupTable {
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn elements(&self) -> &[PadicApproxMatrix] {
        &self.elements
    }

    pub fn generators(&self) -> &[PadicApproxMatrix] {
        &self.generators
    }

    pub fn contains(&self, x: &PadicApproxMatrix) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    /// Every element of `sub` lies in self.
    pub fn contains_group(&self, sub: &FiniteGroupTable) -> bool {
        sub.elements.iter().all(|x| self.contains(x))
    }

    /// Image under reduction mod p^level.
    pub fn reduce(&self, level: u32) -> Result<Vec<PadicApproxMatrix>> {
        let set: HashSet<PadicApproxMatrix> = self.elements.iter().map(|x| x.reduce(level)).collect::<Result<_>>()?;
        let mut v: Vec<_> = set.into_iter().collect();
        v.sort();
        Ok(v)
    }
}

/// |GL(n, Z/p^m)| = |GL(n, F_p)| · p^{n²(m-1)}.
pub fn gl_order(n: usize, p: u64, level: u32) -> Result<BigUint> {
    let base = gl_fp_order(n as u32, p)?;
    let mut order = BigUint::from(1u32);
    for (&q, &e) in base.finite_part() {
        order *= BigUint::from(q).pow(e);
    }
    Ok(order * BigUint::from(p).pow((n * n) as u32 * (level - 1)))
}

/// Closure of `gens` under multiplication and inversion, breadth first.
pub fn enumerate(gens: &[PadicApproxMatrix], cap: usize) -> Result<FiniteGroupTable> {
    let first = gens.first().ok_or_else(|| Error::Input("empty generator list".into()))?;
    let (p, level, n) = (first.p(), first.level(), first.n());
    if gens.iter().any(|g| (g.p(), g.level(), g.n()) != (p, level, n)) {
        return Err(Error::DimensionMismatch("generators over different rings".into()));
    }
    let mut alphabet = Vec::with_capacity(2 * gens.len());
    for g in gens {
        let inv = g
            .inverse()
            .ok_or_else(|| Error::Input(format!("generator {g} is not invertible mod p")))?;
        alphabet.push(g.clone());
        alphabet.push(inv);
    }
    let id = PadicApproxMatrix::identity(p, level, n)?;
    let mut seen: HashSet<PadicApproxMatrix> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in &alphabet {
            let y = x.mul(g);
            if !seen.contains(&y) {
                if seen.len() >= cap {
                    return Err(Error::CapExceeded { cap, trace: Vec::new() });
                }
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut elements: Vec<_> = seen.into_iter().collect();
    elements.sort();
    let table = FiniteGroupTable { p, level, n, elements, generators: gens.to_vec() };
    verify_table(&table)?;
    Ok(table)
}

/// A finite set containing I and closed under right multiplication by the
/// generators is the subgroup they generate; also check inverses and
/// Lagrange against |GL(n, Z/p^m)|.
fn verify_table(t: &FiniteGroupTable) -> Result<()> {
    let violation = |what: &str| Err(Error::InvariantViolation(format!("group table: {what}")));
    if !t.contains(&PadicApproxMatrix::identity(t.p, t.level, t.n)?) {
        return violation("identity missing");
    }
    for x in &t.elements {
        if t.generators.iter().any(|g| !t.contains(&x.mul(g))) {
            return violation("not closed under products");
        }
        match x.inverse() {
            Some(inv) if t.contains(&inv) => {}
            _ => return violation("not closed under inverses"),
        }
    }
    let total = gl_order(t.n, t.p, t.level)?;
    if total % BigUint::from(t.order()) != BigUint::from(0u32) {
        return violation("order does not divide |GL(n, Z/p^m)|");
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PowerImage {
    pub surjective: bool,
    pub image_size: u64,
}

/// {x^k : x ∈ T}, compared against |T|.
pub fn power_surjective(t: &FiniteGroupTable, k: u64) -> PowerImage {
    let image: HashSet<PadicApproxMatrix> = t.elements.iter().map(|x| x.pow(k)).collect();
    PowerImage { surjective: image.len() as u64 == t.order(), image_size: image.len() as u64 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum F1Check {
    Agree(bool),
    Disagree { exhaustive: bool, coprime: bool },
}

impl F1Check {
    pub fn agrees(&self) -> bool {
        matches!(self, F1Check::Agree(_))
    }
}

/// Exhaustive surjectivity of P_k against gcd(k, |T|) = 1.
pub fn validate_f1(t: &FiniteGroupTable, k: u64) -> F1Check {
    let exhaustive = power_surjective(t, k).surjective;
    let coprime = coprime_finite(k, t.order());
    if exhaustive == coprime {
        F1Check::Agree(exhaustive)
    } else {
        F1Check::Disagree { exhaustive, coprime }
    }
}

/// Generators of (Z/p^m)^* as 1×1 matrices: every unit.
pub fn units_generators(p: u64, level: u32) -> Result<Vec<PadicApproxMatrix>> {
    let m = residue_modulus(p, level)?;
    (1..m)
        .filter(|u| u % p != 0)
        .map(|u| PadicApproxMatrix::new(p, level, 1, vec![u]))
        .collect()
}

/// Elementary transvections and diag(u, 1, …, 1) for every unit u.
pub fn gl_generators(n: usize, p: u64, level: u32) -> Result<Vec<PadicApproxMatrix>> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut d = PadicApproxMatrix::identity(p, level, n)?.data().to_vec();
                d[i * n + j] = 1;
                gens.push(PadicApproxMatrix::new(p, level, n, d)?);
            }
        }
    }
    for u in units_generators(p, level)? {
        let mut d = PadicApproxMatrix::identity(p, level, n)?.data().to_vec();
        d[0] = u.get(0, 0);
        gens.push(PadicApproxMatrix::new(p, level, n, d)?);
    }
    Ok(gens)
}

pub fn units_table(p: u64, level: u32) -> Result<FiniteGroupTable> {
    enumerate(&units_generators(p, level)?, DEFAULT_CAP)
}

pub fn gl_table(n: usize, p: u64, level: u32) -> Result<FiniteGroupTable> {
    enumerate(&gl_generators(n, p, level)?, DEFAULT_CAP)
}

/// The affine group (Z/p^m)^* ⋉ Z/p^m as matrices [[a, b], [0, 1]].
pub fn affine_table(p: u64, level: u32) -> Result<FiniteGroupTable> {
    let mut gens = vec![PadicApproxMatrix::from_rows(p, level, &[vec![1, 1], vec![0, 1]])?];
    for u in units_generators(p, level)? {
        gens.push(PadicApproxMatrix::new(p, level, 2, vec![u.get(0, 0), 0, 0, 1])?);
    }
    enumerate(&gens, DEFAULT_CAP)
}

/// Kernel of GL(n, Z/p^m) → GL(n, Z/p^j), enumerated from I + p^j E_ab
/// and I + p^j diag(1, 0, …).
pub fn congruence_table(n: usize, p: u64, level: u32, j: u32) -> Result<FiniteGroupTable> {
    let pj = p.pow(j);
    let mut gens = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let mut d = PadicApproxMatrix::identity(p, level, n)?.data().to_vec();
            d[a * n + b] += pj;
            gens.push(PadicApproxMatrix::new(p, level, n, d)?);
        }
    }
    enumerate(&gens, DEFAULT_CAP)
}

/// The cyclic group generated by one residue class, as a 1×1 table.
pub fn cyclic_units_table(g: u64, p: u64, level: u32) -> Result<FiniteGroupTable> {
    let m = residue_modulus(p, level)?;
    if inv_mod(g % m, m).is_none() {
        return Err(Error::Input(format!("{g} is not a unit mod {m}")));
    }
    enumerate(&[PadicApproxMatrix::new(p, level, 1, vec![g])?], DEFAULT_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_examples() {
        let gens = vec![
            PadicApproxMatrix::from_rows(2, 1, &[vec![0, 1], vec![1, 0]]).unwrap(),
            PadicApproxMatrix::from_rows(2, 1, &[vec![1, 1], vec![0, 1]]).unwrap(),
        ];
        assert_eq!(enumerate(&gens, 100).unwrap().order(), 6);

        let id = PadicApproxMatrix::identity(3, 2, 2).unwrap();
        assert_eq!(enumerate(&[id], 100).unwrap().order(), 1);

        let t = cyclic_units_table(2, 3, 2).unwrap();
        let vals: Vec<u64> = t.elements().iter().map(|x| x.get(0, 0)).collect();
        assert_eq!(vals, vec![1, 2, 4, 5, 7, 8]);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(gl_table(2, 3, 1).map(|t| t.order()), Ok(48)));
        let gens = gl_generators(2, 3, 2).unwrap();
        assert!(matches!(enumerate(&gens, 100), Err(Error::CapExceeded { cap: 100, .. })));
    }

    #[test]
    fn power_images() {
        let t = gl_table(2, 2, 1).unwrap();
        assert_eq!(power_surjective(&t, 5), PowerImage { surjective: true, image_size: 6 });
        assert_eq!(power_surjective(&t, 3), PowerImage { surjective: false, image_size: 4 });
        assert!(power_surjective(&t, 1).surjective);
    }

    #[test]
    fn f1_examples() {
        let t = units_table(3, 2).unwrap();
        assert_eq!(validate_f1(&t, 5), F1Check::Agree(true));
        assert_eq!(validate_f1(&t, 2), F1Check::Agree(false));
        let triv = enumerate(&[PadicApproxMatrix::identity(5, 1, 1).unwrap()], 10).unwrap();
        for k in 1..10 {
            assert_eq!(validate_f1(&triv, k), F1Check::Agree(true));
        }
    }

    #[test]
    fn catalog_table_orders() {
        assert_eq!(gl_table(2, 2, 2).unwrap().order(), 96);
        assert_eq!(units_table(2, 3).unwrap().order(), 4);
        assert_eq!(affine_table(3, 2).unwrap().order(), 54);
        assert_eq!(congruence_table(2, 3, 2, 1).unwrap().order(), 81);
        assert_eq!(gl_order(2, 3, 2).unwrap(), BigUint::from(3888u32));
    }
}
