//! Random valid (phi, N)-data and independent oracles shared by the test targets.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use pisen::phin::{chain_form_matrix, PhiNData};

/// Random chain-form data of dimension `d`: a random partition into blocks,
/// each a chain whose steps either keep the twist (weight `+1`) or drop it by
/// one or two (weight jumps anywhere in `-2..=4`).
pub fn random_phin<R: Rng>(rng: &mut R, d: usize) -> PhiNData {
    let mut blocks = Vec::new();
    let mut left = d;
    while left > 0 {
        let len = rng.gen_range(1..=left);
        blocks.push(len);
        left -= len;
    }
    let mut weights = Vec::with_capacity(d);
    let mut twists = Vec::with_capacity(d);
    for &len in &blocks {
        let mut w = rng.gen_range(-3..=3);
        let mut m = rng.gen_range(-2..=2);
        for k in 0..len {
            if k > 0 {
                if rng.gen_bool(0.6) {
                    w += 1;
                } else {
                    w += rng.gen_range(-2..=4);
                    m -= rng.gen_range(1..=2);
                }
            }
            weights.push(w);
            twists.push(m);
        }
    }
    let n = chain_form_matrix(&blocks, true);
    PhiNData::new(n, None, weights, Some(twists)).expect("consistent shapes")
}

/// Longest run of indices linked by `N` with equal twists.
pub fn longest_equal_twist_run(data: &PhiNData) -> usize {
    let m = data.twists();
    let mut best = 0;
    for chain in data.chains() {
        let mut run = 1;
        best = best.max(1);
        for j in chain.start + 1..chain.end {
            run = if m[j] == m[j - 1] { run + 1 } else { 1 };
            best = best.max(run);
        }
    }
    best
}

/// `num/den mod p^k` by the extended Euclidean algorithm on integers.
pub fn euclid_residue(num: &BigInt, den: &BigInt, modulus: &BigInt) -> BigInt {
    let e = den.extended_gcd(modulus);
    assert!(e.gcd.is_one(), "denominator must be prime to the modulus");
    (num * e.x).mod_floor(modulus)
}

/// `log(1 + x) = sum_{k>=1} (-1)^(k+1) x^k / k` in exact rationals, `terms` terms.
pub fn log_series(x: &BigRational, terms: u32) -> BigRational {
    let mut acc = BigRational::zero();
    let mut pow = x.clone();
    for k in 1..=terms {
        let term = &pow / BigRational::from_integer(k.into());
        acc = if k % 2 == 1 { acc + term } else { acc - term };
        pow = &pow * x;
    }
    acc
}

/// `exp(x) = sum_{k>=0} x^k / k!` in exact rationals, `terms` terms.
pub fn exp_series(x: &BigRational, terms: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut term = BigRational::one();
    for k in 1..terms {
        term = &term * x / BigRational::from_integer(k.into());
        acc += &term;
    }
    acc
}

/// Exact p-adic valuation of a nonzero rational.
pub fn vp_rational(q: &BigRational, p: u64) -> i64 {
    assert!(!q.is_zero());
    let count = |n: &BigInt| {
        let mut n = n.abs();
        let pb = BigInt::from(p);
        let mut v = 0;
        while (&n % &pb).is_zero() {
            n /= &pb;
            v += 1;
        }
        v
    };
    count(q.numer()) - count(q.denom())
}
