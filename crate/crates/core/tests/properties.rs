mod common;

use ppm_core::dynamics::{bounded_group, type_r_matrix, Caps, GeneratorSet};
use ppm_core::lattice::Lattice;
use ppm_core::modular::PadicApproxMatrix;
use ppm_core::oracle::{self, validate_f1};
use ppm_core::qp::reduce_mod;
use ppm_core::roots::{axb_root, congruence_root, unipotent_root, AffineElement, RootResult};
use ppm_core::scale::{displacement, scale_newton, scale_tidy_default};
use ppm_core::steinitz::{coprime, Supernatural};
use ppm_core::{Error, ExactScalar, PContext, QMatrix, Valuation};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(p: u64) -> PContext {
    PContext::new(p, 12).unwrap()
}

fn fin(v: Valuation) -> i64 {
    v.finite().unwrap()
}

fn arb_supernatural() -> impl Strategy<Value = Supernatural> {
    proptest::collection::vec((prop::sample::select(vec![2u64, 3, 5, 7]), 0u32..5, any::<bool>()), 0..4).prop_map(|parts| {
        parts.into_iter().fold(Supernatural::one(), |acc, (q, e, inf)| {
            let factor = if inf { Supernatural::prime_infinity(q) } else { Supernatural::prime_power(q, e) };
            acc.lcm(&factor)
        })
    })
}

/// a/b with p ∤ b.
fn arb_integral(p: u64) -> impl Strategy<Value = ExactScalar> {
    (-500i64..=500, 1i64..=60)
        .prop_filter("unit denominator", move |(_, b)| b % p as i64 != 0)
        .prop_map(|(a, b)| ExactScalar::from((a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valuation_is_multiplicative(p in common::arb_prime(), x in common::arb_rational(200), y in common::arb_rational(200)) {
        prop_assume!(!x.is_zero() && !y.is_zero());
        prop_assert_eq!(fin((&x * &y).vp(p)), fin(x.vp(p)) + fin(y.vp(p)));
        if let Valuation::Finite(s) = (&x + &y).vp(p) {
            prop_assert!(s >= fin(x.vp(p)).min(fin(y.vp(p))));
        }
    }

    #[test]
    fn reduction_is_a_ring_map((p, x, y) in common::arb_prime().prop_flat_map(|p| (Just(p), arb_integral(p), arb_integral(p))), m in 1u32..6) {
        let c = ctx(p);
        let rx = reduce_mod(&x, m, &c).unwrap();
        let ry = reduce_mod(&y, m, &c).unwrap();
        prop_assert_eq!(reduce_mod(&(&x + &y), m, &c).unwrap(), rx.add(ry));
        prop_assert_eq!(reduce_mod(&(&x * &y), m, &c).unwrap(), rx.mul(ry));
    }

    #[test]
    fn tidying_agrees_with_newton_polygon(p in common::arb_prime(), a in common::arb_invertible(50)) {
        let c = ctx(p);
        let report = scale_tidy_default(&a, &c).unwrap();
        prop_assert_eq!(report.scale_exponent, scale_newton(&a, &c).unwrap());
        prop_assert_eq!(displacement(&a, &report.minimizing_lattice).unwrap(), report.scale_exponent);
    }

    #[test]
    fn scale_of_powers(p in common::arb_prime(), a in common::arb_invertible(12), e in 1i64..4) {
        let c = ctx(p);
        prop_assert_eq!(scale_newton(&a.pow(e).unwrap(), &c).unwrap(), e * scale_newton(&a, &c).unwrap());
    }

    #[test]
    fn scale_of_inverse_and_determinant(p in common::arb_prime(), a in common::arb_invertible(50)) {
        let c = ctx(p);
        let forward = scale_newton(&a, &c).unwrap();
        let backward = scale_newton(&a.inverse().unwrap(), &c).unwrap();
        prop_assert_eq!(forward - backward, -fin(a.det().vp(p)));
    }

    #[test]
    fn displacement_bounds_scale(p in common::arb_prime(), a in common::arb_invertible(20), l in common::arb_invertible(9)) {
        prop_assume!(a.rows() == l.rows());
        let c = ctx(p);
        let lattice = Lattice::from_generators(&c, &l).unwrap();
        prop_assert!(displacement(&a, &lattice).unwrap() >= scale_newton(&a, &c).unwrap());
    }

    #[test]
    fn type_r_means_both_scales_vanish(p in common::arb_prime(), a in common::arb_invertible(9)) {
        let c = ctx(p);
        let both_zero = scale_newton(&a, &c).unwrap() == 0 && scale_newton(&a.inverse().unwrap(), &c).unwrap() == 0;
        prop_assert_eq!(type_r_matrix(&a, &c).unwrap(), both_zero);
    }

    #[test]
    fn type_r_singletons_are_bounded(p in common::arb_prime(), a in common::arb_invertible(9)) {
        let c = ctx(p);
        let g = GeneratorSet::new(&c, vec![a.clone()]).unwrap();
        let result = bounded_group(&g, &Caps::default()).unwrap();
        prop_assert_eq!(result.is_bounded(), type_r_matrix(&a, &c).unwrap());
        if let Some(l) = result.lattice() {
            prop_assert_eq!(&l.apply(&a).unwrap(), l);
        }
    }

    #[test]
    fn supernatural_lcm_laws(a in arb_supernatural(), b in arb_supernatural(), c in arb_supernatural(), k in 1u64..400) {
        prop_assert_eq!(a.lcm(&b), b.lcm(&a));
        prop_assert_eq!(a.lcm(&b).lcm(&c), a.lcm(&b.lcm(&c)));
        prop_assert_eq!(a.lcm(&a), a.clone());
        prop_assert!(a.divides(&a.lcm(&b)) && a.divides(&a.mul(&b)));
        prop_assert_eq!(coprime(k, &a.lcm(&b)), coprime(k, &a) && coprime(k, &b));
        prop_assert_eq!(coprime(k, &a.mul(&b)), coprime(k, &a) && coprime(k, &b));
    }

    #[test]
    fn unipotent_roots_power_back(seed in any::<u64>(), n in 2usize..=4, k in 1u64..=12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = common::unipotent(&mut rng, n, 20);
        let r = unipotent_root(&u, k).unwrap().found().unwrap();
        prop_assert!(r.is_unipotent());
        prop_assert_eq!(r.pow(k as i64).unwrap(), u);
    }

    #[test]
    fn congruence_roots_power_back(seed in any::<u64>(), p in common::arb_prime(), n in 1usize..=3, k in 1u64..=12) {
        prop_assume!(k % p != 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = if p == 2 { 4 } else { p };
        let a = common::congruence_residue(&mut rng, p, 10, n, c);
        let r = congruence_root(&a, k).unwrap().found().unwrap();
        prop_assert_eq!(r.pow(k), a);
    }

    #[test]
    fn affine_roots_power_back(p in prop::sample::select(vec![3u64, 5, 7]), a in 1u64..10_000, b in 0u64..10_000, k in 1u64..=12) {
        prop_assume!(a % p != 0);
        let c = PContext::new(p, 4).unwrap();
        let elem = AffineElement::new(a, b, p, 4).unwrap();
        match axb_root(&elem, k, &c) {
            Ok(RootResult::Found(r)) => prop_assert_eq!(r.pow(k), elem.reduce(p, r.a.level).unwrap()),
            Ok(_) | Err(Error::PrecisionExhausted(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_power_maps_follow_coprimality(
        seed in any::<u64>(),
        p in common::arb_prime(),
        level in 1u32..=2,
        n in 1usize..=2,
        count in 1usize..=3,
        k in 1u64..=30,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<PadicApproxMatrix> = (0..count).map(|_| common::invertible_residue(&mut rng, p, level, n)).collect();
        // GL(2, Z/25) alone has 300000 elements
        let table = match oracle::enumerate(&gens, 100_000) {
            Err(Error::CapExceeded { .. }) => return Ok(()),
            t => t.unwrap(),
        };
        prop_assert!(validate_f1(&table, k).agrees(), "order {}, k = {}", table.order(), k);
    }

    #[test]
    fn tables_reduce_level_by_level(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3]), count in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let gens: Vec<PadicApproxMatrix> = (0..count).map(|_| common::invertible_residue(&mut rng, p, 2, 2)).collect();
        let top = oracle::enumerate(&gens, 100_000).unwrap();
        let reduced: Vec<PadicApproxMatrix> = gens.iter().map(|g| g.reduce(1).unwrap()).collect();
        let bottom = oracle::enumerate(&reduced, 100_000).unwrap();
        prop_assert_eq!(top.reduce(1).unwrap(), bottom.elements().to_vec());
        prop_assert_eq!(top.order() % bottom.order(), 0);
    }
}

#[test]
fn identity_is_type_r_and_fixes_the_standard_lattice() {
    let c = ctx(3);
    let g = GeneratorSet::new(&c, vec![QMatrix::identity(3)]).unwrap();
    let result = bounded_group(&g, &Caps::default()).unwrap();
    assert_eq!(result.lattice(), Some(&Lattice::standard(&c, 3)));
}
