//! Capped relative-precision p-adic numbers in `ℚ_p`.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `p^val · unit`, with `unit` a p-adic unit known modulo `p^prec`.
///
/// Zero is flagged separately and stores the power of `p` it is known to
/// divide in `val`. Arithmetic follows the usual ultrametric rules: the
/// result never claims more digits than its inputs determine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    p: u64,
    val: i64,
    unit: BigUint,
    prec: u32,
    zero: bool,
}

/// Absolute precision standing in for an exact zero.
pub const EXACT_ZERO: i64 = 1 << 40;

/// Primality by trial division; primes here are small.
pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if p < 5 || !is_prime(p) {
        return Err(Error::InvalidArgument(format!("p must be a prime >= 5, got {p}")));
    }
    Ok(())
}

fn pow_p(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// Strips the factors of `p` from a nonzero integer.
fn split_p(mut n: BigInt, p: u64) -> (i64, BigInt) {
    let pb = BigInt::from(p);
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return (v, n);
        }
        n = q;
        v += 1;
    }
}

/// `v_p` of a nonzero rational.
pub fn valuation_of(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        return None;
    }
    let (a, _) = split_p(r.numer().clone(), p);
    let (b, _) = split_p(r.denom().clone(), p);
    Some(a - b)
}

fn inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

fn to_unsigned(n: &BigInt) -> BigUint {
    n.to_biguint().expect("non-negative after mod_floor")
}

impl PadicNumber {
    /// Zero known modulo `p^abs_prec`.
    pub fn zero(p: u64, abs_prec: i64) -> Self {
        PadicNumber {
            p,
            val: abs_prec,
            unit: BigUint::zero(),
            prec: 0,
            zero: true,
        }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Self::from_integer(1, p, prec)
    }

    /// An integer, stored with `prec` digits of relative precision.
    pub fn from_integer(n: i64, p: u64, prec: u32) -> Self {
        Self::from_rational_relative(&BigRational::from_integer(BigInt::from(n)), p, prec)
    }

    /// `p^val · unit` with `unit` reduced modulo `p^prec`.
    pub fn new(p: u64, val: i64, unit: BigUint, prec: u32) -> Result<Self> {
        check_prime(p)?;
        if prec == 0 {
            return Err(Error::PrecisionExhausted("a nonzero value needs at least one digit".into()));
        }
        if (&unit % p).is_zero() {
            return Err(Error::Divisibility(format!("unit {unit}"), p));
        }
        Ok(PadicNumber {
            p,
            val,
            unit: unit % pow_p(p, prec),
            prec,
            zero: false,
        })
    }

    /// A rational known modulo `p^abs_prec`.
    pub fn from_rational(r: &BigRational, p: u64, abs_prec: i64) -> Self {
        match valuation_of(r, p) {
            None => Self::zero(p, abs_prec),
            Some(v) if v >= abs_prec => Self::zero(p, abs_prec),
            Some(v) => Self::from_rational_relative(r, p, (abs_prec - v) as u32),
        }
    }

    /// A rational with `prec` digits of relative precision.
    pub fn from_rational_relative(r: &BigRational, p: u64, prec: u32) -> Self {
        if r.is_zero() {
            return Self::zero(p, i64::from(prec));
        }
        let (a, num) = split_p(r.numer().clone(), p);
        let (b, den) = split_p(r.denom().clone(), p);
        let m = BigInt::from(pow_p(p, prec));
        let unit = (num * inv_mod(&den.mod_floor(&m), &m)).mod_floor(&m);
        PadicNumber {
            p,
            val: a - b,
            unit: to_unsigned(&unit),
            prec,
            zero: false,
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Valuation; for zero, the power of `p` it is known to divide.
    pub fn valuation(&self) -> i64 {
        self.val
    }

    /// Relative precision (0 for zero).
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// The value is known modulo `p^absolute_precision`.
    pub fn absolute_precision(&self) -> i64 {
        if self.zero {
            self.val
        } else {
            self.val + i64::from(self.prec)
        }
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    /// The representative `p^val · unit` as a rational.
    pub fn to_rational(&self) -> BigRational {
        if self.zero {
            return BigRational::zero();
        }
        let u = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, self.unit.clone()));
        let pb = BigRational::from_integer(BigInt::from(self.p));
        if self.val >= 0 {
            u * pb.pow(self.val as i32)
        } else {
            u / pb.pow((-self.val) as i32)
        }
    }

    /// Integer residue modulo `p^n` for a value with `val >= 0` known to at least `n` digits.
    pub fn residue(&self, n: u32) -> Option<BigUint> {
        if self.absolute_precision() < i64::from(n) || self.val < 0 {
            return None;
        }
        if self.zero {
            return Some(BigUint::zero());
        }
        let m = pow_p(self.p, n);
        Some((pow_p(self.p, self.val as u32) * &self.unit) % m)
    }

    /// Drops digits so that the value is known modulo `p^abs_prec` only.
    pub fn reduce_to(&self, abs_prec: i64) -> Self {
        if abs_prec >= self.absolute_precision() {
            return self.clone();
        }
        if self.zero || self.val >= abs_prec {
            return Self::zero(self.p, abs_prec);
        }
        let prec = (abs_prec - self.val) as u32;
        PadicNumber {
            p: self.p,
            val: self.val,
            unit: &self.unit % pow_p(self.p, prec),
            prec,
            zero: false,
        }
    }

    /// `self ≡ other (mod p^n)`, decided on the digits both values carry.
    ///
    /// Returns `None` when either value is known to fewer than `n` digits.
    pub fn congruent(&self, other: &Self, n: i64) -> Option<bool> {
        if self.absolute_precision() < n || other.absolute_precision() < n {
            return None;
        }
        let d = self.sub(other);
        Some(d.is_zero() || d.valuation() >= n)
    }

    fn same_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "p-adic operands with different primes");
    }

    fn scaled_unit(&self, shift: i64) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.unit.clone()) * BigInt::from(pow_p(self.p, shift as u32))
    }

    pub fn neg(&self) -> Self {
        if self.zero {
            return self.clone();
        }
        let m = pow_p(self.p, self.prec);
        PadicNumber {
            unit: (&m - &self.unit) % &m,
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_prime(other);
        let abs = self.absolute_precision().min(other.absolute_precision());
        if self.zero {
            return other.reduce_to(abs);
        }
        if other.zero {
            return self.reduce_to(abs);
        }
        let v = self.val.min(other.val);
        if v >= abs {
            return Self::zero(self.p, abs);
        }
        let sum = self.scaled_unit(self.val - v) + other.scaled_unit(other.val - v);
        let m = BigInt::from(pow_p(self.p, (abs - v) as u32));
        let sum = sum.mod_floor(&m);
        if sum.is_zero() {
            return Self::zero(self.p, abs);
        }
        let (k, rest) = split_p(sum, self.p);
        let val = v + k;
        let prec = (abs - val) as u32;
        PadicNumber {
            p: self.p,
            val,
            unit: to_unsigned(&rest.mod_floor(&BigInt::from(pow_p(self.p, prec)))),
            prec,
            zero: false,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same_prime(other);
        if self.zero || other.zero {
            return Self::zero(self.p, self.val + other.val);
        }
        let prec = self.prec.min(other.prec);
        PadicNumber {
            p: self.p,
            val: self.val + other.val,
            unit: (&self.unit * &other.unit) % pow_p(self.p, prec),
            prec,
            zero: false,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.zero {
            return Err(Error::InvalidArgument("inverse of a p-adic zero".into()));
        }
        let m = BigInt::from(pow_p(self.p, self.prec));
        let u = inv_mod(&BigInt::from_biguint(Sign::Plus, self.unit.clone()), &m);
        Ok(PadicNumber {
            p: self.p,
            val: -self.val,
            unit: to_unsigned(&u),
            prec: self.prec,
            zero: false,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other);
        if other.zero {
            return Err(Error::InvalidArgument("division by a p-adic zero".into()));
        }
        if self.zero {
            return Ok(Self::zero(self.p, self.val - other.val));
        }
        Ok(self.mul(&other.inverse()?))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.p, self.prec.max(1));
        if self.zero {
            return if e == 0 { acc } else { Self::zero(self.p, self.val * i64::from(e)) };
        }
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// The integer `n` at the relative precision of `self`; a zero template
    /// lends its absolute precision instead.
    pub fn int_like(&self, n: i64) -> Self {
        let prec = if self.zero { self.val.clamp(1, 4096) as u32 } else { self.prec };
        Self::from_integer(n, self.p, prec)
    }
}

impl fmt::Display for PadicNumber {
    /// `unit*p^val (mod p^A)` with `A` the absolute precision.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            write!(f, "0 (mod {}^{})", self.p, self.val)
        } else {
            write!(f, "{}*{}^{} (mod {}^{})", self.unit, self.p, self.val, self.p, self.absolute_precision())
        }
    }
}

/// Iwasawa logarithm: `log_p(p) = 0`, `log_p(ζ) = 0` for roots of unity.
///
/// For `x = p^v u`, `log_p(x) = log(u^{p-1})/(p-1)` with `u^{p-1}` a 1-unit,
/// summed exactly over ℚ and then reduced. The result is known modulo
/// `p^N` where `N` is the relative precision of `x`.
pub fn padic_log(x: &PadicNumber) -> Result<PadicNumber> {
    if x.is_zero() {
        return Err(Error::ZeroInput);
    }
    let p = x.prime();
    let n = i64::from(x.precision());
    let m = pow_p(p, x.precision());
    let y = (x.unit().modpow(&BigUint::from(p - 1), &m) + &m - BigUint::one()) % &m;
    let y = BigRational::from_integer(BigInt::from_biguint(Sign::Plus, y));
    if y.is_zero() {
        return Ok(PadicNumber::zero(p, n));
    }
    let vy = valuation_of(&y, p).expect("nonzero");
    let log_p_of = |k: i64| ((k as f64).ln() / (p as f64).ln()).floor() as i64;
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    let mut k = 1i64;
    // terms y^k/k have valuation >= k·v(y) - log_p(k), increasing in k
    while k * vy - log_p_of(k) < n || k == 1 {
        power *= &y;
        let term = &power / BigRational::from_integer(BigInt::from(k));
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
        if k as usize > crate::numeric::MAX_ITERATIONS {
            return Err(Error::NonConvergence {
                scheme: "p-adic logarithm series",
                iterations: crate::numeric::MAX_ITERATIONS,
            });
        }
    }
    let sum = sum / BigRational::from_integer(BigInt::from(p - 1));
    Ok(PadicNumber::from_rational(&sum, p, n))
}

/// The `(p-1)`-th root of unity congruent to `y` modulo `p`, to `n` digits.
pub fn teichmuller(y: i64, p: u64, n: u32) -> Result<PadicNumber> {
    check_prime(p)?;
    if y.rem_euclid(p as i64) == 0 {
        return Err(Error::Divisibility(format!("{y}"), p));
    }
    let m = pow_p(p, n);
    let mut x = BigUint::from(y.rem_euclid(p as i64) as u64);
    // x ↦ x^p converges to ω(y), one digit per step
    for _ in 0..n {
        x = x.modpow(&BigUint::from(p), &m);
    }
    PadicNumber::new(p, 0, x, n)
}

/// `v_p` of a nonzero integer.
pub fn valuation_of_int(n: i64, p: u64) -> Option<i64> {
    if n == 0 {
        return None;
    }
    Some(split_p(BigInt::from(n), p).0)
}

/// Prints a rational as `a/b`, or `a` when integral.
pub fn rational_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a` or `a/b`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("bad rational '{s}'"));
    let mut parts = s.trim().splitn(2, '/');
    let num: BigInt = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let den: BigInt = match parts.next() {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

/// Nearest integer to a float as a `BigInt`, for small magnitudes.
pub(crate) fn round_to_bigint(x: f64) -> Option<BigInt> {
    if !x.is_finite() || x.abs() > 9.0e15 {
        return None;
    }
    Some(BigInt::from(x.round() as i64))
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}
