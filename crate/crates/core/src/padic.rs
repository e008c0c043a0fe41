//! Capped absolute precision p-adic numbers.
//!
//! A [`Padic`] is `p^val * unit + O(p^prec)` with `unit` a p-adic unit stored
//! modulo `p^(prec - val)`. Every digit a value reports is a true digit of the
//! exact result; operations lower `prec` according to the usual propagation
//! rules instead of guessing.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Precision marker for the exact zero.
pub const EXACT: i64 = i64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("precision {0} is below the minimum of 4 digits")]
    PrecisionTooSmall(i64),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by an exact zero")]
    DivisionByZero,
    #[error("precision underflow: operand is only known to be O(p^{prec})")]
    PrecisionUnderflow { prec: i64 },
    #[error("{op} outside its domain: {reason}")]
    Domain { op: &'static str, reason: String },
    #[error("primes differ: {0} and {1}")]
    PrimeMismatch(u64, u64),
    #[error("cannot parse {0:?} as a rational")]
    Parse(String),
}

pub type Result<T, E = PadicError> = std::result::Result<T, E>;

/// The prime and the default absolute precision used to create values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PadicContext {
    p: u64,
    precision: i64,
}

impl Default for PadicContext {
    fn default() -> Self {
        PadicContext { p: 5, precision: 24 }
    }
}

impl PadicContext {
    pub fn new(p: u64, precision: i64) -> Result<Self> {
        if !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        if precision < 4 {
            return Err(PadicError::PrecisionTooSmall(precision));
        }
        Ok(PadicContext { p, precision })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn with_precision(&self, precision: i64) -> Result<Self> {
        PadicContext::new(self.p, precision)
    }

    /// Smallest valuation of `x - 1` (resp. `x`) for which log (resp. exp)
    /// converges and the two are mutually inverse.
    pub fn log_threshold(&self) -> i64 {
        log_threshold(self.p)
    }

    pub fn int(&self, n: i64) -> Padic {
        Padic::from_rational_prec(&BigInt::from(n), &BigInt::one(), self.p, self.precision)
            .expect("nonzero denominator")
    }

    pub fn one(&self) -> Padic {
        Padic::one(self.p, self.precision)
    }

    pub fn zero(&self) -> Padic {
        Padic::zero_to(self.p, self.precision)
    }

    pub fn from_rational(&self, num: i64, den: i64) -> Result<Padic> {
        Padic::from_rational_prec(&BigInt::from(num), &BigInt::from(den), self.p, self.precision)
    }

    pub fn from_ratio(&self, q: &BigRational) -> Padic {
        Padic::from_rational_prec(q.numer(), q.denom(), self.p, self.precision)
            .expect("BigRational has a nonzero denominator")
    }

    pub fn parse(&self, s: &str) -> Result<Padic> {
        let q = parse_rational(s)?;
        Ok(self.from_ratio(&q))
    }
}

pub(crate) fn log_threshold(p: u64) -> i64 {
    if p == 2 {
        2
    } else {
        1
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn p_pow(p: u64, k: i64) -> BigInt {
    debug_assert!(k >= 0);
    num_traits::pow(BigInt::from(p), k as usize)
}

/// `v_p(n)` for a nonzero integer.
pub fn vp_int(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `floor(log_p k)` for `k >= 1`.
pub(crate) fn ilog(p: u64, k: u64) -> i64 {
    let mut e = 0;
    let mut acc = p;
    while acc <= k {
        e += 1;
        acc = match acc.checked_mul(p) {
            Some(a) => a,
            None => break,
        };
    }
    e
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(m)
}

/// Parses `"a"` or `"a/b"` (optional sign, no decimals).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || PadicError::Parse(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let ok = |x: &str| {
        let digits = x.strip_prefix('-').or_else(|| x.strip_prefix('+')).unwrap_or(x);
        !digits.is_empty() && digits.bytes().all(|c| c.is_ascii_digit())
    };
    if !ok(num) || !ok(den) {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(PadicError::ZeroDenominator);
    }
    Ok(BigRational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Padic {
    p: u64,
    val: i64,
    unit: BigInt,
    prec: i64,
}

impl Padic {
    /// `O(p^prec)`.
    pub fn zero_to(p: u64, prec: i64) -> Padic {
        Padic { p, val: prec, unit: BigInt::zero(), prec }
    }

    pub fn exact_zero(p: u64) -> Padic {
        Padic::zero_to(p, EXACT)
    }

    pub fn one(p: u64, prec: i64) -> Padic {
        Padic::normalize(p, 0, BigInt::one(), prec)
    }

    pub fn from_rational_prec(num: &BigInt, den: &BigInt, p: u64, prec: i64) -> Result<Padic> {
        if den.is_zero() {
            return Err(PadicError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(Padic::zero_to(p, prec));
        }
        let vn = vp_int(num, p);
        let vd = vp_int(den, p);
        let val = vn - vd;
        if val >= prec {
            return Ok(Padic::zero_to(p, prec));
        }
        let n = num / p_pow(p, vn);
        let d = den / p_pow(p, vd);
        let modulus = p_pow(p, prec - val);
        let value = (n * mod_inverse(&d.mod_floor(&modulus), &modulus)).mod_floor(&modulus);
        Ok(Padic { p, val, unit: value, prec })
    }

    /// Builds `p^val * value + O(p^prec)`, pulling any factors of `p` out of `value`.
    fn normalize(p: u64, mut val: i64, value: BigInt, prec: i64) -> Padic {
        if value.is_zero() || val >= prec {
            return Padic::zero_to(p, prec);
        }
        if prec == EXACT {
            unreachable!("only the zero is exact");
        }
        let mut unit = value.mod_floor(&p_pow(p, prec - val));
        if unit.is_zero() {
            return Padic::zero_to(p, prec);
        }
        let pb = BigInt::from(p);
        loop {
            let (q, r) = unit.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            unit = q;
            val += 1;
        }
        if val >= prec {
            return Padic::zero_to(p, prec);
        }
        Padic { p, val, unit, prec }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Valuation; for a zero this is the precision it is known to (`EXACT` for the exact zero).
    pub fn valuation(&self) -> i64 {
        self.val
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn relative_precision(&self) -> i64 {
        if self.is_zero() {
            0
        } else {
            self.prec - self.val
        }
    }

    /// True when every known digit vanishes.
    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.prec == EXACT
    }

    fn check_prime(&self, other: &Padic) {
        assert_eq!(self.p, other.p, "p-adic operands with different primes");
    }

    pub fn try_add(&self, other: &Padic) -> Result<Padic> {
        if self.p != other.p {
            return Err(PadicError::PrimeMismatch(self.p, other.p));
        }
        Ok(self + other)
    }

    fn add_impl(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        let prec = self.prec.min(other.prec);
        let vmin = self.val.min(other.val);
        if vmin >= prec {
            return Padic::zero_to(self.p, prec);
        }
        let mut value = BigInt::zero();
        for x in [self, other] {
            if !x.is_zero() {
                value += &x.unit * p_pow(self.p, x.val - vmin);
            }
        }
        Padic::normalize(self.p, vmin, value, prec)
    }

    fn mul_impl(&self, other: &Padic) -> Padic {
        self.check_prime(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Padic::exact_zero(self.p);
        }
        let prec = (self.prec + other.val).min(other.prec + self.val);
        let val = self.val + other.val;
        if self.is_zero() || other.is_zero() || val >= prec {
            return Padic::zero_to(self.p, prec);
        }
        Padic::normalize(self.p, val, &self.unit * &other.unit, prec)
    }

    fn neg_impl(&self) -> Padic {
        if self.is_zero() {
            return self.clone();
        }
        Padic::normalize(self.p, self.val, -&self.unit, self.prec)
    }

    /// Inverse; relative precision is preserved, so `prec` becomes `prec - 2v`.
    pub fn inv(&self) -> Result<Padic> {
        if self.is_exact_zero() {
            return Err(PadicError::DivisionByZero);
        }
        if self.is_zero() {
            return Err(PadicError::PrecisionUnderflow { prec: self.prec });
        }
        let r = self.prec - self.val;
        let modulus = p_pow(self.p, r);
        let unit = mod_inverse(&self.unit, &modulus);
        Ok(Padic { p: self.p, val: -self.val, unit, prec: self.prec - 2 * self.val })
    }

    pub fn div(&self, other: &Padic) -> Result<Padic> {
        Ok(self * &other.inv()?)
    }

    /// Division by an exact integer: loses `v_p(k)` digits of absolute precision.
    pub fn div_int(&self, k: i64) -> Result<Padic> {
        if k == 0 {
            return Err(PadicError::DivisionByZero);
        }
        if self.is_exact_zero() {
            return Ok(self.clone());
        }
        let kb = BigInt::from(k);
        let a = vp_int(&kb, self.p);
        if self.is_zero() {
            return Ok(Padic::zero_to(self.p, self.prec - a));
        }
        let r = self.prec - self.val;
        let modulus = p_pow(self.p, r);
        let k_unit = (kb / p_pow(self.p, a)).mod_floor(&modulus);
        let unit = (&self.unit * mod_inverse(&k_unit, &modulus)).mod_floor(&modulus);
        Ok(Padic { p: self.p, val: self.val - a, unit, prec: self.prec - a })
    }

    /// Multiplication by an exact integer.
    pub fn mul_int(&self, k: i64) -> Padic {
        if k == 0 {
            return Padic::exact_zero(self.p);
        }
        if self.is_exact_zero() {
            return self.clone();
        }
        let kb = BigInt::from(k);
        let a = vp_int(&kb, self.p);
        if self.is_zero() {
            return Padic::zero_to(self.p, self.prec + a);
        }
        let value = &self.unit * (kb / p_pow(self.p, a));
        Padic::normalize(self.p, self.val + a, value, self.prec + a)
    }

    pub fn pow_int(&self, n: i64) -> Result<Padic> {
        if n < 0 {
            return self.inv()?.pow_int(-n);
        }
        if n == 0 {
            if self.is_exact_zero() {
                return Err(PadicError::Domain { op: "pow_int", reason: "0^0 has no precision".into() });
            }
            let rel = if self.is_zero() { self.prec } else { self.prec - self.val };
            return Ok(Padic::one(self.p, rel));
        }
        let mut acc: Option<Padic> = None;
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => &a * &base,
                });
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc.expect("n > 0"))
    }

    /// Lowers the absolute precision to at most `prec`.
    pub fn reduce_to(&self, prec: i64) -> Padic {
        if prec >= self.prec {
            return self.clone();
        }
        if self.is_zero() || self.val >= prec {
            return Padic::zero_to(self.p, prec);
        }
        Padic::normalize(self.p, self.val, self.unit.clone(), prec)
    }

    /// True when `self - other` vanishes to absolute precision `n`.
    pub fn agrees_to(&self, other: &Padic, n: i64) -> bool {
        (self - other).valuation() >= n
    }

    /// `log(x) = sum_{k>=1} (-1)^(k+1) (x-1)^k / k` on `1 + p^e Z_p`, `e` = 1 (odd p) or 2.
    pub fn log(&self) -> Result<Padic> {
        let t = log_threshold(self.p);
        if self.is_exact_zero() {
            return Err(PadicError::Domain { op: "log", reason: "argument is zero".into() });
        }
        let target = self.prec;
        let y = self - &Padic::one(self.p, target);
        let vy = y.valuation();
        if vy < t {
            return Err(PadicError::Domain {
                op: "log",
                reason: format!("v_p(x - 1) = {vy} is below {t}"),
            });
        }
        if y.is_zero() {
            return Ok(Padic::zero_to(self.p, target));
        }
        let cutoff = log_cutoff(self.p, vy, target);
        let mut sum = Padic::exact_zero(self.p);
        let mut power = y.clone();
        for k in 1..cutoff {
            let term = power.div_int(k)?;
            sum = if k % 2 == 1 { &sum + &term } else { &sum - &term };
            power = &power * &y;
        }
        Ok(sum.reduce_to(target))
    }

    /// `exp(x) = sum x^k / k!` on `p^e Z_p`, `e` = 1 (odd p) or 2.
    pub fn exp(&self) -> Result<Padic> {
        let t = log_threshold(self.p);
        if self.is_exact_zero() {
            return Err(PadicError::Domain {
                op: "exp",
                reason: "exact zero carries no target precision".into(),
            });
        }
        let target = self.prec;
        let vx = self.valuation();
        if vx < t {
            return Err(PadicError::Domain {
                op: "exp",
                reason: format!("v_p(x) = {vx} is below {t}"),
            });
        }
        let one = Padic::one(self.p, target);
        if self.is_zero() {
            return Ok(one);
        }
        let cutoff = exp_cutoff(self.p, vx, target);
        let mut sum = one.clone();
        let mut term = one;
        for k in 1..cutoff {
            term = (&term * self).div_int(k)?;
            sum = &sum + &term;
        }
        Ok(sum.reduce_to(target))
    }

    /// `x^a = exp(a log x)` for a 1-unit `x` and a p-adic integer `a`.
    pub fn pow_zp(&self, a: &Padic) -> Result<Padic> {
        if a.valuation() < 0 {
            return Err(PadicError::Domain {
                op: "pow_zp",
                reason: format!("exponent has valuation {}", a.valuation()),
            });
        }
        let l = self.log()?;
        let e = a * &l;
        if e.is_exact_zero() {
            return Ok(Padic::one(self.p, self.prec));
        }
        e.exp()
    }

    /// The value as an exact rational congruent to it at the known precision.
    ///
    /// Uses rational reconstruction when a small fraction exists, otherwise the
    /// balanced integer residue.
    pub fn to_rational(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let r = self.prec - self.val;
        let modulus = p_pow(self.p, r);
        let (a, b) = rational_reconstruction(&self.unit, &modulus).unwrap_or_else(|| {
            let half = &modulus >> 1;
            let s = if self.unit > half { &self.unit - &modulus } else { self.unit.clone() };
            (s, BigInt::one())
        });
        let scale = p_pow(self.p, self.val.abs());
        if self.val >= 0 {
            BigRational::new(a * scale, b)
        } else {
            BigRational::new(a, b * scale)
        }
    }

    pub fn to_rational_string(&self) -> String {
        let q = self.to_rational();
        if q.denom().is_one() {
            q.numer().to_string()
        } else {
            format!("{}/{}", q.numer(), q.denom())
        }
    }

    /// Truncated integer value when `v >= 0`, else `None`. Mostly for tests.
    pub fn to_i64(&self) -> Option<i64> {
        let q = self.to_rational();
        if q.denom().is_one() {
            q.numer().to_i64()
        } else {
            None
        }
    }
}

/// First `K` such that every log-series term with index `>= K` is `O(p^target)`.
///
/// The bound `k*vy - floor(log_p k)` is nondecreasing in `k` on the domain.
pub(crate) fn log_cutoff(p: u64, vy: i64, target: i64) -> i64 {
    let mut k: i64 = 1;
    while k.saturating_mul(vy) - ilog(p, k as u64) < target {
        k += 1;
    }
    k
}

/// First `K` such that every exp-series term with index `>= K` is `O(p^target)`,
/// using `v_p(k!) <= (k-1)/(p-1)`.
pub(crate) fn exp_cutoff(p: u64, vx: i64, target: i64) -> i64 {
    let q = (p - 1) as i64;
    let mut k: i64 = 1;
    while k * vx * q - (k - 1) < target * q {
        k += 1;
    }
    k
}

/// Finds `a/b` with `a = b*u mod m`, `|a|, b <= sqrt(m/2)`.
fn rational_reconstruction(u: &BigInt, m: &BigInt) -> Option<(BigInt, BigInt)> {
    let bound: BigInt = num_integer::Roots::sqrt(&(m >> 1usize));
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    let (a, b) = if t1.is_negative() { (-r1, -t1) } else { (r1, t1) };
    if !a.gcd(&b).is_one() {
        return None;
    }
    Some((a, b))
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.is_zero() {
            return write!(f, "O({}^{})", self.p, self.prec);
        }
        write!(f, "{} + O({}^{})", self.to_rational_string(), self.p, self.prec)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $imp:ident) => {
        impl $tr<&Padic> for &Padic {
            type Output = Padic;
            fn $m(self, rhs: &Padic) -> Padic {
                self.$imp(rhs)
            }
        }
        impl $tr<Padic> for Padic {
            type Output = Padic;
            fn $m(self, rhs: Padic) -> Padic {
                (&self).$imp(&rhs)
            }
        }
        impl $tr<&Padic> for Padic {
            type Output = Padic;
            fn $m(self, rhs: &Padic) -> Padic {
                (&self).$imp(rhs)
            }
        }
    };
}

impl Padic {
    fn sub_impl(&self, other: &Padic) -> Padic {
        self.add_impl(&other.neg_impl())
    }
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, sub_impl);
forward_binop!(Mul, mul, mul_impl);

impl Neg for &Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_impl()
    }
}

impl Neg for Padic {
    type Output = Padic;
    fn neg(self) -> Padic {
        self.neg_impl()
    }
}
