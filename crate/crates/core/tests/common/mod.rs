#![allow(dead_code)]

use ppm_core::modular::PadicApproxMatrix;
use ppm_core::{ExactScalar, QMatrix};
use proptest::prelude::*;
use rand::Rng;

/// a/b with |a|, |b| ≤ bound, b ≠ 0.
pub fn rational<R: Rng>(rng: &mut R, bound: i64) -> ExactScalar {
    let a = rng.gen_range(-bound..=bound);
    let b = loop {
        let b = rng.gen_range(-bound..=bound);
        if b != 0 {
            break b;
        }
    };
    ExactScalar::from((a, b))
}

pub fn invertible<R: Rng>(rng: &mut R, n: usize, bound: i64) -> QMatrix {
    loop {
        let rows = (0..n).map(|_| (0..n).map(|_| rational(rng, bound)).collect()).collect();
        let a = QMatrix::from_rows(rows).unwrap();
        if !a.det().is_zero() {
            return a;
        }
    }
}

/// Conjugate of a random strictly upper triangular perturbation of I.
pub fn unipotent<R: Rng>(rng: &mut R, n: usize, bound: i64) -> QMatrix {
    let mut u = QMatrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            u[(i, j)] = rational(rng, bound);
        }
    }
    let c = invertible(rng, n, 3);
    c.mul(&u).mul(&c.inverse().unwrap())
}

pub fn residue_matrix<R: Rng>(rng: &mut R, p: u64, level: u32, n: usize) -> PadicApproxMatrix {
    let m = p.pow(level);
    PadicApproxMatrix::new(p, level, n, (0..n * n).map(|_| rng.gen_range(0..m)).collect()).unwrap()
}

pub fn invertible_residue<R: Rng>(rng: &mut R, p: u64, level: u32, n: usize) -> PadicApproxMatrix {
    loop {
        let a = residue_matrix(rng, p, level, n);
        if a.is_invertible() {
            return a;
        }
    }
}

/// I + c·M with M random mod p^level.
pub fn congruence_residue<R: Rng>(rng: &mut R, p: u64, level: u32, n: usize, c: u64) -> PadicApproxMatrix {
    let id = PadicApproxMatrix::identity(p, level, n).unwrap();
    id.add(&residue_matrix(rng, p, level, n).scale(c))
}

pub fn arb_rational(bound: i64) -> impl Strategy<Value = ExactScalar> {
    (-bound..=bound, (1..=bound)).prop_map(|(a, b)| ExactScalar::from((a, b)))
}

pub fn arb_matrix(n: usize, bound: i64) -> impl Strategy<Value = QMatrix> {
    proptest::collection::vec(arb_rational(bound), n * n).prop_map(move |v| {
        let rows = v.chunks(n).map(|r| r.to_vec()).collect();
        QMatrix::from_rows(rows).unwrap()
    })
}

pub fn arb_invertible(bound: i64) -> impl Strategy<Value = QMatrix> {
    (2usize..=3)
        .prop_flat_map(move |n| arb_matrix(n, bound))
        .prop_filter("invertible", |a| !a.det().is_zero())
}

pub fn arb_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5])
}
