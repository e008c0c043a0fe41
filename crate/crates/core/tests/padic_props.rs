mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use pisen::padic::{Padic, PadicContext};

use common::{euclid_residue, exp_series, log_series, vp_rational};

const P: u64 = 5;
const M: i64 = 24;

fn ctx() -> PadicContext {
    PadicContext::new(P, M).unwrap()
}

fn modulus(prec: i64) -> BigInt {
    BigInt::from(P).pow(prec as u32)
}

/// Integer residue of a p-adic integer modulo `p^prec`.
fn residue(x: &Padic, prec: i64) -> BigInt {
    assert!(x.valuation() >= 0);
    if x.is_zero() {
        return BigInt::zero();
    }
    (x.unit() * BigInt::from(P).pow(x.valuation() as u32)).mod_floor(&modulus(prec))
}

fn rational_residue(q: &BigRational, prec: i64) -> BigInt {
    euclid_residue(q.numer(), q.denom(), &modulus(prec))
}

fn nonzero_small() -> impl Strategy<Value = i64> {
    (-10_000i64..10_000).prop_filter("nonzero", |n| *n != 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn from_rational_matches_euclid(num in -1_000_000i64..1_000_000, den in 1i64..1_000_000) {
        prop_assume!(den % P as i64 != 0);
        let x = ctx().from_rational(num, den).unwrap();
        let expected = euclid_residue(&num.into(), &den.into(), &modulus(M));
        prop_assert_eq!(residue(&x, M), expected);
    }

    #[test]
    fn inverse_matches_euclid(n in nonzero_small()) {
        prop_assume!(n % P as i64 != 0);
        let x = ctx().int(n).inv().unwrap();
        prop_assert_eq!(residue(&x, M), euclid_residue(&BigInt::one(), &n.into(), &modulus(M)));
    }

    #[test]
    fn valuation_of_rational(num in nonzero_small(), den in 1i64..10_000) {
        let x = ctx().from_rational(num, den).unwrap();
        let q = BigRational::new(num.into(), den.into());
        prop_assert_eq!(x.valuation(), vp_rational(&q, P));
    }

    #[test]
    fn ring_laws(a in -5000i64..5000, b in -5000i64..5000, c in -5000i64..5000) {
        let k = ctx();
        let (x, y, z) = (k.int(a), k.int(b), k.int(c));
        prop_assert!((&(&x + &y) + &z).agrees_to(&(&x + &(&y + &z)), M));
        prop_assert!((&(&x * &y) * &z).agrees_to(&(&x * &(&y * &z)), M));
        prop_assert!((&x * &(&y + &z)).agrees_to(&(&(&x * &y) + &(&x * &z)), M));
        prop_assert!((&x * &y).agrees_to(&(&y * &x), M));
        prop_assert!((&x - &x).is_zero());
    }

    #[test]
    fn ultrametric(a in nonzero_small(), b in nonzero_small()) {
        let k = ctx();
        let (x, y) = (k.int(a), k.int(b));
        let s = &x + &y;
        prop_assert!(s.valuation() >= x.valuation().min(y.valuation()));
        if x.valuation() != y.valuation() {
            prop_assert_eq!(s.valuation(), x.valuation().min(y.valuation()));
        }
        prop_assert_eq!((&x * &y).valuation(), x.valuation() + y.valuation());
    }

    #[test]
    fn division_undoes_multiplication(a in nonzero_small(), b in nonzero_small()) {
        let k = ctx();
        let (x, y) = (k.int(a), k.int(b));
        let q = (&x * &y).div(&y).unwrap();
        prop_assert!(q.agrees_to(&x, M - y.valuation()));
    }

    #[test]
    fn log_matches_rational_series(a in -2000i64..2000) {
        let x = ctx().int(1 + P as i64 * a);
        let y = BigRational::from_integer((P as i64 * a).into());
        let oracle = log_series(&y, (M + 8) as u32);
        let l = x.log().unwrap();
        prop_assert_eq!(residue(&l, M), rational_residue(&oracle, M));
    }

    #[test]
    fn exp_matches_rational_series(a in -2000i64..2000) {
        let x = ctx().int(P as i64 * a);
        let oracle = exp_series(&BigRational::from_integer((P as i64 * a).into()), (2 * M) as u32);
        let e = x.exp().unwrap();
        prop_assert_eq!(residue(&e, M), rational_residue(&oracle, M));
    }

    #[test]
    fn log_exp_roundtrip_and_homomorphism(a in -5000i64..5000, b in -5000i64..5000) {
        let k = ctx();
        let p = P as i64;
        let (x, y) = (k.int(1 + p * a), k.int(1 + p * b));
        prop_assert!(x.log().unwrap().exp().unwrap().agrees_to(&x, M));
        prop_assert!((&x * &y).log().unwrap().agrees_to(&(&x.log().unwrap() + &y.log().unwrap()), M));
        let (s, t) = (k.int(p * a), k.int(p * b));
        prop_assert!(s.exp().unwrap().log().unwrap().agrees_to(&s, M));
        prop_assert!((&s + &t).exp().unwrap().agrees_to(&(&s.exp().unwrap() * &t.exp().unwrap()), M));
    }

    #[test]
    fn pow_zp_matches_integer_powers(a in -500i64..500, n in 0i64..40) {
        let x = ctx().int(1 + P as i64 * a);
        let by_series = x.pow_zp(&ctx().int(n)).unwrap();
        prop_assert!(by_series.agrees_to(&x.pow_int(n).unwrap(), M));
    }

    #[test]
    fn pow_zp_adds_exponents(a in -500i64..500, m in -1000i64..1000, n in -1000i64..1000) {
        let k = ctx();
        let x = k.int(1 + P as i64 * a);
        let lhs = x.pow_zp(&k.int(m + n)).unwrap();
        let rhs = &x.pow_zp(&k.int(m)).unwrap() * &x.pow_zp(&k.int(n)).unwrap();
        prop_assert!(lhs.agrees_to(&rhs, M));
    }

    #[test]
    fn higher_precision_is_consistent(num in nonzero_small(), den in 1i64..5000, a in -500i64..500) {
        prop_assume!(den % P as i64 != 0);
        let lo = ctx();
        let hi = PadicContext::new(P, M + 8).unwrap();
        let q = |k: PadicContext| k.from_rational(num, den).unwrap();
        prop_assert!(q(hi).reduce_to(M).agrees_to(&q(lo), M));
        let one_plus = |k: PadicContext| &k.one() + &k.int(P as i64 * a);
        let l_hi = one_plus(hi).log().unwrap();
        prop_assert!(l_hi.reduce_to(M).agrees_to(&one_plus(lo).log().unwrap(), M));
        let prod_hi = &q(hi) * &l_hi;
        prop_assert!(prod_hi.reduce_to(M).agrees_to(&(&q(lo) * &one_plus(lo).log().unwrap()), M));
    }
}

#[test]
fn parse_round_trips_rational_strings() {
    let k = ctx();
    for s in ["0", "1", "-7", "3/4", "-125/3", "1/25"] {
        let x = k.parse(s).unwrap();
        assert_eq!(x.to_rational_string(), s);
    }
}

#[test]
fn other_primes() {
    for p in [2u64, 3, 7, 11] {
        let k = PadicContext::new(p, 20).unwrap();
        let chi = if p == 2 { k.int(5) } else { k.int(1 + p as i64) };
        let l = chi.log().unwrap();
        assert!(l.exp().unwrap().agrees_to(&chi, 20), "p = {p}");
        assert_eq!(l.valuation(), if p == 2 { 2 } else { 1 });
    }
}
