mod common;

use common::{brute_force_modulus, f, z, OracleRing};
use proptest::prelude::*;
use valring::{Error, Family, Filter, Ring, RingParams};

fn small_rings() -> Vec<std::sync::Arc<Ring>> {
    vec![
        z(3, 1),
        z(3, 2),
        z(3, 3),
        z(3, 4),
        z(3, 5),
        z(5, 2),
        z(5, 3),
        z(7, 2),
        z(11, 2),
        f(3, 1, 3),
        f(3, 2, 1),
        f(3, 2, 2),
        f(5, 2, 1),
        f(5, 2, 2),
        f(3, 3, 1),
        f(3, 3, 2),
        f(7, 2, 1),
        f(3, 4, 1),
    ]
}

#[test]
fn modulus_matches_brute_force_choice() {
    for (p, s) in [(3u32, 2u32), (3, 3), (3, 4), (5, 2), (7, 2), (5, 3)] {
        let ring = Ring::new(p, s, 1, Family::Fqtr).unwrap();
        let m: Vec<u64> = ring.modulus().unwrap().iter().map(|&c| c as u64).collect();
        assert_eq!(m, brute_force_modulus(p as u64, s as usize), "F_{p}^{s}");
    }
    // x^2 + 1 over F_3
    assert_eq!(f(3, 2, 1).modulus().unwrap(), &[1, 0, 1]);
}

#[test]
fn exhaustive_arithmetic_against_oracle() {
    for ring in small_rings() {
        let o = OracleRing::of(&ring);
        let n = ring.size();
        for a in 0..n {
            assert_eq!(ring.neg(a) as u64, o.neg(a as u64), "{ring} neg {a}");
            for b in 0..n {
                assert_eq!(ring.add(a, b) as u64, o.add(a as u64, b as u64), "{ring} {a}+{b}");
                assert_eq!(ring.mul(a, b) as u64, o.mul(a as u64, b as u64), "{ring} {a}*{b}");
                assert_eq!(ring.sub(a, b), ring.add(a, ring.neg(b)));
            }
        }
    }
}

#[test]
fn units_valuations_and_inverses() {
    for ring in small_rings() {
        let o = OracleRing::of(&ring);
        for a in 0..ring.size() {
            assert_eq!(ring.valuation(a), o.valuation(a as u64), "{ring} v({a})");
            let brute = o.brute_inverse(a as u64);
            assert_eq!(ring.is_unit(a), brute.is_some(), "{ring} unit {a}");
            match brute {
                Some(b) => {
                    assert_eq!(ring.inv(a).unwrap() as u64, b);
                    if ring.family() == Family::Zpr {
                        assert_eq!(ring.inv_ext_gcd(a).unwrap() as u64, b);
                    }
                }
                None => assert_eq!(ring.inv(a), Err(Error::NotAUnit(a))),
            }
        }
    }
}

#[test]
fn cardinalities_and_ideal_chain() {
    for ring in small_rings() {
        let (q, r) = (ring.q() as u64, ring.r());
        assert_eq!(ring.size() as u64, q.pow(r));
        assert_eq!(ring.enumerate(Filter::Units).count() as u64, q.pow(r) - q.pow(r - 1));
        assert_eq!(ring.enumerate(Filter::Units).count() as u64, ring.unit_count());
        for k in 0..=r {
            let counted = ring.enumerate(Filter::All).filter(|&a| ring.valuation(a) >= k).count() as u64;
            assert_eq!(counted, q.pow(r - k), "{ring} k={k}");
            assert_eq!(ring.ideal_size(k), counted);
        }
    }
}

#[test]
fn uniformizer_structure() {
    for ring in small_rings() {
        let zz = ring.uniformizer();
        let r = ring.r();
        let mut pow = ring.one();
        for k in 0..r {
            assert_ne!(pow, 0, "{ring}: z^{k} must be nonzero");
            assert_eq!(ring.valuation(pow), k);
            pow = ring.mul(pow, zz);
        }
        assert_eq!(pow, 0, "{ring}: z^r = 0");
        // every nonzero x is a unit times z^v(x)
        for x in 1..ring.size() {
            let v = ring.valuation(x);
            let zv = (0..v).fold(ring.one(), |acc, _| ring.mul(acc, zz));
            assert!(ring.enumerate(Filter::Units).any(|u| ring.mul(u, zv) == x), "{ring} {x}");
        }
    }
}

#[test]
fn valuation_laws() {
    for ring in small_rings() {
        let r = ring.r();
        for a in 0..ring.size() {
            for b in 0..ring.size() {
                let (va, vb) = (ring.valuation(a), ring.valuation(b));
                assert_eq!(ring.valuation(ring.mul(a, b)), (va + vb).min(r));
                assert!(ring.valuation(ring.add(a, b)) >= va.min(vb));
            }
        }
    }
}

#[test]
fn construction_errors() {
    assert_eq!(Ring::new(2, 1, 3, Family::Zpr).unwrap_err(), Error::EvenPrime);
    assert_eq!(Ring::new(9, 1, 2, Family::Zpr).unwrap_err(), Error::NonPrime(9));
    assert_eq!(Ring::new(3, 2, 2, Family::Zpr).unwrap_err(), Error::BadFamilyCombo(2));
    assert!(matches!(Ring::new(3, 1, 0, Family::Zpr), Err(Error::InvalidParameter(_))));
    assert!(matches!(Ring::new(3, 1, 11, Family::Zpr), Err(Error::RingTooLarge { .. })));
    let params = RingParams { p: 3, s: 1, r: 11, family: Family::Zpr };
    assert!(Ring::with_cap(params, 1 << 18).is_ok());
    let r9 = z(3, 2);
    assert!(matches!(r9.element(9), Err(Error::ElementOutOfRange { index: 9, size: 9 })));
}

#[test]
fn checked_elements_detect_mismatch() {
    let (a, b) = (z(3, 2), f(3, 2, 1));
    let x = a.element(2).unwrap();
    let y = b.element(2).unwrap();
    assert_eq!(x.add(&y).unwrap_err(), Error::RingMismatch);
    assert_eq!(x.mul(&y).unwrap_err(), Error::RingMismatch);
    let w = a.element(7).unwrap();
    assert_eq!(x.add(&w).unwrap().index(), 0);
    assert_eq!(x.mul(&w).unwrap().index(), 5);
    assert_eq!(x.inv().unwrap().index(), 5);
    assert_eq!(x.coefficients(), vec![2, 0]);
}

fn big_rings() -> Vec<std::sync::Arc<Ring>> {
    vec![z(3, 10), z(251, 2), z(13, 4), f(5, 2, 3), f(3, 3, 3), f(3, 2, 5), f(7, 2, 2)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn large_ring_axioms(which in 0usize..7, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let ring = &big_rings()[which];
        let n = ring.size();
        let (a, b, c) = (a % n, b % n, c % n);
        let o = OracleRing::of(ring);
        prop_assert_eq!(ring.add(a, b) as u64, o.add(a as u64, b as u64));
        prop_assert_eq!(ring.mul(a, b) as u64, o.mul(a as u64, b as u64));
        prop_assert_eq!(ring.mul(a, ring.add(b, c)), ring.add(ring.mul(a, b), ring.mul(a, c)));
        prop_assert_eq!(ring.mul(ring.mul(a, b), c), ring.mul(a, ring.mul(b, c)));
        prop_assert_eq!(ring.add(a, ring.neg(a)), 0);
        prop_assert_eq!(ring.valuation(a), o.valuation(a as u64));
        if ring.is_unit(a) {
            let inv = ring.inv(a).unwrap();
            prop_assert_eq!(ring.mul(a, inv), 1);
            if ring.family() == Family::Zpr {
                prop_assert_eq!(ring.inv_ext_gcd(a).unwrap(), inv);
            }
        } else {
            prop_assert!(ring.inv(a).is_err());
        }
    }
}
