use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use primavoid::bounds::{sign_surd, Interval};
use primavoid::charsum::CharacterGroup;
use primavoid::gf::{build_field, Basis, BuildOptions, FieldCtx, FieldParams};
use primavoid::hyperplane::{intersection, random_general_position, AvoidedSet};
use primavoid::ntheory::{euler_phi, factor_u64, is_prime_u64, primes_up_to, FactorCache};

fn field(p: u32, m: u32, n: u32) -> Arc<FieldCtx> {
    Arc::new(build_field(FieldParams::new(p, m, n).unwrap(), &BuildOptions::default()).unwrap())
}

#[test]
fn field_axioms_on_random_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, m, n) in [(2, 1, 8), (3, 2, 3), (5, 1, 4), (2, 3, 4), (11, 1, 12), (251, 1, 2)] {
        let f = field(p, m, n);
        for _ in 0..2000 {
            let a = f.random_element(&mut rng);
            let b = f.random_element(&mut rng);
            let c = f.random_element(&mut rng);
            assert_eq!(f.add(&a, &b), f.add(&b, &a));
            assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
            assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
            assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
            assert_eq!(f.sub(&f.add(&a, &b), &b), a);
            if !a.is_zero() {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
            }
        }
    }
}

#[test]
fn frobenius() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (p, m, n) in [(2, 1, 7), (3, 1, 5), (2, 2, 3), (7, 1, 3), (3, 3, 2)] {
        let f = field(p, m, n);
        let order = f.order().clone();
        for _ in 0..500 {
            let a = f.random_element(&mut rng);
            let b = f.random_element(&mut rng);
            let fr = |x| f.pow_u64(x, p as u64);
            assert_eq!(fr(&f.add(&a, &b)), f.add(&fr(&a), &fr(&b)));
            assert_eq!(f.pow(&a, &order), a);
        }
        // Fixed points of x -> x^q are exactly the subfield.
        let q = f.q();
        let fixed = f.elements().filter(|x| f.pow_u64(x, q) == *x).count() as u64;
        assert_eq!(fixed, q);
    }
}

#[test]
fn primitive_counts_match_phi() {
    for (p, m, n) in [(2, 1, 2), (2, 1, 12), (3, 1, 7), (2, 2, 6), (2, 3, 4), (2, 4, 3), (2, 6, 2), (5, 1, 5), (7, 1, 4), (13, 1, 3), (61, 1, 2)] {
        if !is_prime_u64(p as u64) {
            continue;
        }
        let f = field(p, m, n);
        let count = f.elements().filter(|x| f.is_primitive(x)).count() as u64;
        let phi = euler_phi(f.unit_factorization()).to_u64().unwrap();
        assert_eq!(count, phi, "{p}^{m}^{n}");
        assert!(f.is_primitive(f.generator()));
    }
}

#[test]
fn inclusion_exclusion() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for (p, m, n) in [(3, 1, 3), (2, 2, 3), (5, 1, 2), (2, 1, 5)] {
        let f = field(p, m, n);
        let q = f.q() as i64;
        for _ in 0..5 {
            let arr = random_general_position(Basis::power(f.clone()), &mut rng);
            let mut total = q.pow(n);
            for mask in 1u32..1 << n {
                let j: Vec<usize> = (0..n as usize).filter(|i| mask >> i & 1 == 1).collect();
                let sub = intersection(&arr, &j).unwrap().expect("general position");
                assert_eq!(sub.dimension(), n as usize - j.len());
                let size = q.pow(sub.dimension() as u32);
                total += if j.len() % 2 == 0 { size } else { -size };
            }
            assert_eq!(total, (q - 1).pow(n));
            assert_eq!(AvoidedSet::new(&arr).unwrap().len() as i64, total);
        }
    }
}

#[test]
fn characters_have_unit_values_and_orthogonality() {
    let f = field(3, 1, 5);
    let g = CharacterGroup::new(f.clone()).unwrap();
    for chi in g.nontrivial().step_by(7) {
        let s = g.sum(f.elements(), chi);
        assert!(s.magnitude <= 1e-9 + s.error_bound);
        for y in f.elements().skip(1).step_by(17) {
            assert!((g.eval(chi, &y).norm() - 1.0).abs() < 1e-12);
        }
    }
}

/// ln W(t) against the three bounds; true when each holds strictly.
fn w_bounds_hold(t: &BigUint, omega: usize) -> [bool; 3] {
    let w = BigUint::one() << omega;
    let i1 = w.pow(4) * BigUint::from(10u32).pow(4) < BigUint::from(49u32).pow(4) * t;
    let i2 = w.pow(8) * BigUint::from(10u32).pow(8) < BigUint::from(45147u32).pow(8) * t;
    let prec = 128;
    let lnt = Interval::from_int(BigInt::from(t.clone()), prec).ln().unwrap();
    let rhs = lnt
        .mul(&Interval::from_ratio(96, 100, prec))
        .div(&lnt.ln().unwrap())
        .unwrap();
    let lhs = Interval::from_int(2, prec).ln().unwrap().scale(omega as i64);
    [i1, i2, lhs.compare(&rhs) == Some(std::cmp::Ordering::Less)]
}

#[test]
fn squarefree_divisor_bounds() {
    for t in 3..200_000u64 {
        let f = factor_u64(t);
        assert_eq!(w_bounds_hold(&BigUint::from(t), f.omega()), [true; 3], "{t}");
    }
    for f in FactorCache::shipped().unwrap().iter() {
        assert_eq!(w_bounds_hold(f.value(), f.omega()), [true; 3], "{}", f.value());
    }
}

#[test]
fn primality_agrees_with_sieve() {
    let primes = primes_up_to(200_000);
    let mut it = primes.iter().peekable();
    for n in 0..200_000u64 {
        let sieve = it.peek().is_some_and(|&&p| p as u64 == n);
        if sieve {
            it.next();
        }
        assert_eq!(is_prime_u64(n), sieve, "{n}");
    }
}

proptest! {
    #[test]
    fn factor_u64_roundtrip(n in 1u64..u64::MAX) {
        let f = factor_u64(n);
        prop_assert_eq!(f.product(), BigUint::from(n));
        for (p, _) in f.factors() {
            prop_assert!(is_prime_u64(p.to_u64().unwrap()));
        }
    }

    #[test]
    fn ln_encloses(num in 1u64..1_000_000_000, den in 1u64..1_000_000) {
        let i = Interval::from_ratio(num, den, 80).ln().unwrap();
        let x = (num as f64 / den as f64).ln();
        prop_assert!(i.lo_f64() <= x + 1e-12 && x - 1e-12 <= i.hi_f64());
        prop_assert!(i.hi_f64() - i.lo_f64() < 1e-18);
    }

    #[test]
    fn surd_sign_matches_float(a in -1_000_000i64..1_000_000, b in -1000i64..1000, q in 2u64..10_000) {
        let v = a as f64 + b as f64 * (q as f64).sqrt();
        prop_assume!(v.abs() > 1e-6);
        let s = sign_surd(&BigInt::from(a), &BigInt::from(b), q);
        prop_assert_eq!(s, v.partial_cmp(&0.0).unwrap());
    }

    #[test]
    fn digits_roundtrip(seed in any::<u64>()) {
        let f = field(3, 2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = Basis::random(f.clone(), &mut rng);
        let y = f.random_element(&mut rng);
        prop_assert_eq!(b.combine(&b.digits(&y)), y);
    }
}
