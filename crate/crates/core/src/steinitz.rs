//! Supernatural (Steinitz) numbers and pro-orders of catalog compact groups.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A formal product ∏ p^{n(p)} with n(p) ∈ N ∪ {∞}.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Supernatural {
    finite_part: BTreeMap<u64, u32>,
    infinite_primes: BTreeSet<u64>,
}

impl Supernatural {
    pub fn one() -> Self {
        Supernatural::default()
    }

    pub fn from_integer(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Input("supernatural numbers are nonzero".into()));
        }
        let mut s = Supernatural::one();
        for (q, e) in num_prime::nt_funcs::factorize64(n) {
            s.finite_part.insert(q, e as u32);
        }
        Ok(s)
    }

    /// p^∞.
    pub fn prime_infinity(p: u64) -> Self {
        Supernatural { finite_part: BTreeMap::new(), infinite_primes: BTreeSet::from([p]) }
    }

    pub fn prime_power(p: u64, e: u32) -> Self {
        let mut s = Supernatural::one();
        if e > 0 {
            s.finite_part.insert(p, e);
        }
        s
    }

    pub fn finite_part(&self) -> &BTreeMap<u64, u32> {
        &self.finite_part
    }

    pub fn infinite_primes(&self) -> &BTreeSet<u64> {
        &self.infinite_primes
    }

    /// Exponent of q; `None` means ∞.
    pub fn exponent(&self, q: u64) -> Option<u32> {
        if self.infinite_primes.contains(&q) {
            None
        } else {
            Some(self.finite_part.get(&q).copied().unwrap_or(0))
        }
    }

    pub fn primes(&self) -> BTreeSet<u64> {
        self.finite_part.keys().chain(&self.infinite_primes).copied().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.infinite_primes.is_empty()
    }

    fn combine(&self, other: &Supernatural, f: impl Fn(u32, u32) -> u32) -> Supernatural {
        let infinite_primes: BTreeSet<u64> = self.infinite_primes.union(&other.infinite_primes).copied().collect();
        let mut finite_part = BTreeMap::new();
        for q in self.finite_part.keys().chain(other.finite_part.keys()) {
            if infinite_primes.contains(q) {
                continue;
            }
            let e = f(
                self.finite_part.get(q).copied().unwrap_or(0),
                other.finite_part.get(q).copied().unwrap_or(0),
            );
            finite_part.insert(*q, e);
        }
        Supernatural { finite_part, infinite_primes }
    }

    /// Componentwise maximum; ∞ dominates.
    pub fn lcm(&self, other: &Supernatural) -> Supernatural {
        self.combine(other, u32::max)
    }

    /// Componentwise sum; ∞ absorbs.
    pub fn mul(&self, other: &Supernatural) -> Supernatural {
        self.combine(other, |a, b| a + b)
    }

    /// self | other.
    pub fn divides(&self, other: &Supernatural) -> bool {
        self.primes().into_iter().all(|q| match (self.exponent(q), other.exponent(q)) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        })
    }

    /// No prime factor of k divides self.
    pub fn coprime_to(&self, k: u64) -> bool {
        coprime(k, self)
    }

    /// The finite value, if finite and representable.
    pub fn to_u64(&self) -> Option<u64> {
        if !self.is_finite() {
            return None;
        }
        self.finite_part.iter().try_fold(1u64, |acc, (&q, &e)| acc.checked_mul(q.checked_pow(e)?))
    }
}

/// True iff no prime factor of k appears in N.
pub fn coprime(k: u64, n: &Supernatural) -> bool {
    assert!(k >= 1, "k must be positive");
    n.primes().into_iter().all(|q| k % q != 0)
}

pub fn lcm(a: &Supernatural, b: &Supernatural) -> Supernatural {
    a.lcm(b)
}

/// P_k is surjective on a profinite group iff k is coprime to its order.
pub fn profinite_surjective(k: u64, order: &Supernatural) -> bool {
    coprime(k, order)
}

impl fmt::Display for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let primes = self.primes();
        if primes.is_empty() {
            return f.write_str("1");
        }
        let terms: Vec<String> = primes
            .into_iter()
            .map(|q| match self.exponent(q) {
                None => format!("{q}^inf"),
                Some(1) => q.to_string(),
                Some(e) => format!("{q}^{e}"),
            })
            .collect();
        f.write_str(&terms.join(" · "))
    }
}

impl FromStr for Supernatural {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("cannot parse supernatural number {s:?}"));
        let s = s.trim();
        if s == "1" {
            return Ok(Supernatural::one());
        }
        let mut out = Supernatural::one();
        for term in s.split(['·', '*']) {
            let term = term.trim();
            let (base, exp) = term.split_once('^').unwrap_or((term, "1"));
            let q: u64 = base.trim().parse().map_err(|_| bad())?;
            if !num_prime::nt_funcs::is_prime64(q) || out.primes().contains(&q) {
                return Err(bad());
            }
            match exp.trim() {
                "inf" | "∞" => {
                    out.infinite_primes.insert(q);
                }
                e => {
                    let e: u32 = e.parse().map_err(|_| bad())?;
                    if e == 0 {
                        return Err(bad());
                    }
                    out.finite_part.insert(q, e);
                }
            }
        }
        Ok(out)
    }
}

impl Serialize for Supernatural {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Compact groups whose pro-order is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CatalogGroup {
    /// GL(n, Z_p).
    GlnZp,
    /// Z_p^*.
    UnitsZp,
    /// (Z_p, +).
    AdditiveZp,
    /// Kernel of GL(n, Z_p) → GL(n, Z/p^level).
    PrincipalCongruence(u32),
}

impl FromStr for CatalogGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GLn_Zp" | "GL_Zp" => Ok(CatalogGroup::GlnZp),
            "UnitsZp" => Ok(CatalogGroup::UnitsZp),
            "AdditiveZp" => Ok(CatalogGroup::AdditiveZp),
            _ => {
                let level = s
                    .strip_prefix("PrincipalCongruence(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|l| l.parse::<u32>().ok())
                    .filter(|&l| l >= 1)
                    .ok_or_else(|| Error::UnknownCatalogEntry(s.to_string()))?;
                Ok(CatalogGroup::PrincipalCongruence(level))
            }
        }
    }
}

/// |GL(n, F_p)| = p^{n(n-1)/2} ∏_{j=1}^{n} (p^j - 1), as a supernatural number.
pub fn gl_fp_order(n: u32, p: u64) -> Result<Supernatural> {
    let mut out = Supernatural::prime_power(p, n * (n.saturating_sub(1)) / 2);
    for j in 1..=n {
        let pj = p
            .checked_pow(j)
            .ok_or_else(|| Error::Input(format!("|GL({n}, F_{p})| too large to factor")))?;
        out = out.mul(&Supernatural::from_integer(pj - 1)?);
    }
    Ok(out)
}

/// Pro-order of a catalog group, as the lcm of its finite quotient orders.
pub fn ord_catalog(group: CatalogGroup, n: u32, p: u64) -> Result<Supernatural> {
    if !num_prime::nt_funcs::is_prime64(p) {
        return Err(Error::NotPrime(p));
    }
    let pinf = Supernatural::prime_infinity(p);
    match group {
        CatalogGroup::GlnZp => {
            if n == 0 {
                return Err(Error::Input("GL(0) is not in the catalog".into()));
            }
            Ok(gl_fp_order(n, p)?.mul(&pinf))
        }
        // Z_2^* ≅ Z/2 × Z_2, while Z_p^* ≅ Z/(p-1) × Z_p for odd p
        CatalogGroup::UnitsZp if p == 2 => Ok(Supernatural::prime_power(2, 1).mul(&pinf)),
        CatalogGroup::UnitsZp => Ok(Supernatural::from_integer(p - 1)?.mul(&pinf)),
        CatalogGroup::AdditiveZp => Ok(pinf),
        CatalogGroup::PrincipalCongruence(_) => Ok(pinf),
    }
}

/// gcd(k, m) = 1 for a finite group order m.
pub fn coprime_finite(k: u64, m: u64) -> bool {
    k.gcd(&m) == 1
}
