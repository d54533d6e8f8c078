//! Exact rationals viewed inside Q_p, p-adic valuations and residues modulo p^m.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A p-adic valuation: an integer, or `Infinite` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// Fixed prime and residue working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PContext {
    p: u64,
    precision: u32,
}

impl PContext {
    pub fn new(p: u64, precision: u32) -> Result<Self> {
        if !num_prime::nt_funcs::is_prime64(p) {
            return Err(Error::NotPrime(p));
        }
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        Ok(PContext { p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn with_precision(&self, precision: u32) -> Result<Self> {
        PContext::new(self.p, precision)
    }

    pub fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    /// p^e as an exact scalar; e may be negative.
    pub fn p_power(&self, e: i64) -> ExactScalar {
        let pe = num_traits::pow(self.p_big(), e.unsigned_abs() as usize);
        if e >= 0 {
            ExactScalar::from(pe)
        } else {
            ExactScalar(BigRational::new(BigInt::one(), pe))
        }
    }

    /// p^m as a machine modulus, if it fits in 63 bits.
    pub fn modulus(&self, level: u32) -> Result<u64> {
        residue_modulus(self.p, level)
    }

    pub fn vp(&self, x: &ExactScalar) -> Valuation {
        x.vp(self.p)
    }
}

pub(crate) fn residue_modulus(p: u64, level: u32) -> Result<u64> {
    let overflow = Error::ModulusOverflow { p, level };
    let m = p.checked_pow(level).ok_or(overflow.clone())?;
    if m >= 1 << 63 {
        return Err(overflow);
    }
    Ok(m)
}

fn int_vp(x: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!x.is_zero());
    let mut v = 0;
    let mut q = x.clone();
    loop {
        let (d, r) = q.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        q = d;
        v += 1;
    }
}

/// An exact rational number, always in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        ExactScalar(BigRational::new(numer.into(), denom.into()))
    }

    pub fn from_ratio(r: BigRational) -> Self {
        ExactScalar(r)
    }

    pub fn integer(n: i64) -> Self {
        ExactScalar(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        ExactScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn recip(&self) -> Self {
        ExactScalar(self.0.recip())
    }

    pub fn pow(&self, e: i32) -> Self {
        ExactScalar(num_traits::Pow::pow(&self.0, e))
    }

    pub fn vp(&self, p: u64) -> Valuation {
        if self.is_zero() {
            return Valuation::Infinite;
        }
        let pb = BigInt::from(p);
        Valuation::Finite(int_vp(self.numer(), &pb) - int_vp(self.denom(), &pb))
    }

    /// Valuation >= 0.
    pub fn is_p_integral(&self, p: u64) -> bool {
        self.vp(p) >= Valuation::Finite(0)
    }

    /// Splits a nonzero scalar as p^v * u with v_p(u) = 0.
    pub fn split_p(&self, p: u64) -> Option<(i64, ExactScalar)> {
        let v = self.vp(p).finite()?;
        let pe = ExactScalar::from(num_traits::pow(BigInt::from(p), v.unsigned_abs() as usize));
        let unit = if v >= 0 { self / &pe } else { self * &pe };
        Some((v, unit))
    }

    /// Residue of a p-integral scalar modulo an arbitrary-precision power of p.
    pub(crate) fn residue_big(&self, p: u64, modulus: &BigInt) -> Result<BigInt> {
        let d = self.denom();
        if (d % BigInt::from(p)).is_zero() {
            return Err(Error::NotPIntegral(self.to_string()));
        }
        let inv = d
            .modinv(modulus)
            .ok_or_else(|| Error::NotPIntegral(self.to_string()))?;
        Ok((self.numer() * inv).mod_floor(modulus))
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mag: BigUint = digits.parse().ok()?;
    let sign = if s.starts_with('-') { Sign::Minus } else { Sign::Plus };
    Some(BigInt::from_biguint(sign, mag))
}

impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseScalar(s.to_string());
        match s.split_once('/') {
            None => Ok(ExactScalar::from(parse_int(s).ok_or_else(bad)?)),
            Some((a, b)) => {
                let b = b.trim();
                if b.starts_with(['+', '-']) {
                    return Err(bad());
                }
                let num = parse_int(a).ok_or_else(bad)?;
                let den = parse_int(b).ok_or_else(bad)?;
                if den.is_zero() {
                    return Err(bad());
                }
                Ok(ExactScalar(BigRational::new(num, den)))
            }
        }
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // accept "a/b" strings and bare JSON integers
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("bad scalar {other}"))),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl From<BigInt> for ExactScalar {
    fn from(n: BigInt) -> Self {
        ExactScalar(BigRational::from_integer(n))
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::integer(n)
    }
}

impl From<u64> for ExactScalar {
    fn from(n: u64) -> Self {
        ExactScalar::from(BigInt::from(n))
    }
}

impl From<(i64, i64)> for ExactScalar {
    fn from((a, b): (i64, i64)) -> Self {
        ExactScalar::new(a, b)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl<'a> $tr<&'a ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                ExactScalar((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar(self.0.$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &'a ExactScalar) -> ExactScalar {
                ExactScalar(self.0.$method(&rhs.0))
            }
        }
        impl<'a> $tr<ExactScalar> for &'a ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-&self.0)
    }
}

impl std::iter::Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |a, b| a + b)
    }
}

/// An element of Z/p^m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueScalar {
    pub value: u64,
    pub level: u32,
    pub modulus: u64,
}

impl ResidueScalar {
    pub fn new(value: u64, p: u64, level: u32) -> Result<Self> {
        let modulus = residue_modulus(p, level)?;
        Ok(ResidueScalar { value: value % modulus, level, modulus })
    }

    pub fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        ResidueScalar { value: add_mod(self.value, rhs.value, self.modulus), ..self }
    }

    pub fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.modulus, rhs.modulus);
        ResidueScalar { value: mul_mod(self.value, rhs.value, self.modulus), ..self }
    }
}

impl fmt::Display for ResidueScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.value, self.modulus)
    }
}

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - (b % m) as u128) % m as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Inverse modulo m when gcd(a, m) = 1.
pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Valuation of a residue value at level m (`level` for zero).
pub(crate) fn residue_vp(a: u64, p: u64, level: u32) -> u32 {
    if a == 0 {
        return level;
    }
    let mut v = 0;
    let mut a = a;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}

/// p-adic valuation of x; `Valuation::Infinite` for zero.
pub fn vp(x: &ExactScalar, ctx: &PContext) -> Valuation {
    x.vp(ctx.p())
}

/// x mod p^m for p-integral x, inverting the denominator modulo p^m.
pub fn reduce_mod(x: &ExactScalar, m: u32, ctx: &PContext) -> Result<ResidueScalar> {
    let modulus = ctx.modulus(m)?;
    let r = x.residue_big(ctx.p(), &BigInt::from(modulus))?;
    Ok(ResidueScalar {
        value: r.to_u64().expect("residue below modulus"),
        level: m,
        modulus,
    })
}

/// Lifts a residue to its least non-negative integer representative.
pub fn lift_residue(r: &ResidueScalar) -> ExactScalar {
    ExactScalar::from(r.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    #[test]
    fn valuations() {
        let c3 = PContext::new(3, 10).unwrap();
        assert_eq!(vp(&ExactScalar::zero(), &c3), Valuation::Infinite);
        assert_eq!(vp(&q("1/3"), &c3), Valuation::Finite(-1));
        assert_eq!(vp(&q("18/5"), &c3), Valuation::Finite(2));
        assert_eq!(vp(&q("-7"), &c3), Valuation::Finite(0));
    }

    #[test]
    fn infinity_orders_above_everything() {
        assert!(Valuation::Infinite > Valuation::Finite(i64::MAX));
        assert_eq!(Valuation::Finite(2) + Valuation::Infinite, Valuation::Infinite);
    }

    #[test]
    fn residues() {
        let c3 = PContext::new(3, 10).unwrap();
        let c5 = PContext::new(5, 10).unwrap();
        assert_eq!(reduce_mod(&q("1/2"), 2, &c3).unwrap().value, 5);
        assert_eq!(reduce_mod(&ExactScalar::zero(), 3, &c5).unwrap().value, 0);
        assert!(matches!(reduce_mod(&q("1/3"), 1, &c3), Err(Error::NotPIntegral(_))));
        assert!(matches!(reduce_mod(&q("3/3"), 1, &c3), Ok(r) if r.value == 1));
        assert_eq!(reduce_mod(&q("-1"), 2, &c5).unwrap().value, 24);
    }

    #[test]
    fn context_rejects_composites() {
        assert_eq!(PContext::new(4, 3), Err(Error::NotPrime(4)));
        assert_eq!(PContext::new(1, 3), Err(Error::NotPrime(1)));
        assert_eq!(PContext::new(7, 0), Err(Error::ZeroPrecision));
        assert!(PContext::new(2, 1).is_ok());
    }

    #[test]
    fn parsing() {
        assert_eq!(q("-6/4"), ExactScalar::new(-3, 2));
        assert_eq!(q("+12"), ExactScalar::integer(12));
        assert_eq!(q(" 5 / 10 "), ExactScalar::new(1, 2));
        for bad in ["", "1/0", "a", "1/-2", "1.5", "--3", "/3"] {
            assert!(bad.parse::<ExactScalar>().is_err(), "{bad}");
        }
        assert_eq!(q("-3/9").to_string(), "-1/3");
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(2, 9), Some(5));
        assert_eq!(inv_mod(3, 9), None);
        assert_eq!(pow_mod(11, 3, 25), 6);
        assert_eq!(sub_mod(1, 3, 9), 7);
        assert_eq!(residue_vp(18, 3, 5), 2);
        assert!(residue_modulus(2, 63).is_err());
        assert_eq!(residue_modulus(5, 20).unwrap(), 95_367_431_640_625);
    }
}
