//! Truncated power series over exact rationals or p-adic numbers.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::number::{PadicNumber, EXACT_ZERO};
use crate::error::{Error, Result};

/// Coefficient ring of a [`PowerSeries`].
///
/// `zero_like` is an exact zero; `int_like` creates integers at the working
/// precision of `self`, so a series creates its constants from a template.
pub trait Coeff: Clone + Debug + PartialEq {
    fn zero_like(&self) -> Self;
    fn int_like(&self, n: i64) -> Self;
    fn is_zero_coeff(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negate(&self) -> Self;
    fn try_div(&self, other: &Self) -> Result<Self>;
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn int_like(&self, n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negate(&self) -> Self {
        -self
    }
    fn try_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::InvalidArgument("division by zero".into()));
        }
        Ok(self / other)
    }
}

impl Coeff for PadicNumber {
    fn zero_like(&self) -> Self {
        PadicNumber::zero(self.prime(), EXACT_ZERO)
    }
    fn int_like(&self, n: i64) -> Self {
        PadicNumber::int_like(self, n)
    }
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn minus(&self, other: &Self) -> Self {
        self.sub(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn negate(&self) -> Self {
        self.neg()
    }
    fn try_div(&self, other: &Self) -> Result<Self> {
        self.div(other)
    }
}

/// `Σ_{k < M} c_k t^k`, known modulo `t^M` where `M = order()`.
///
/// Equality compares coefficients only.
#[derive(Debug, Clone)]
pub struct PowerSeries<C: Coeff> {
    coeffs: Vec<C>,
    template: C,
}

impl<C: Coeff> PartialEq for PowerSeries<C> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

pub type RationalSeries = PowerSeries<BigRational>;
pub type PadicSeries = PowerSeries<PadicNumber>;

impl<C: Coeff> PowerSeries<C> {
    /// Series with the given coefficients, known modulo `t^{coeffs.len()}`.
    pub fn new(coeffs: Vec<C>, template: C) -> Self {
        PowerSeries { coeffs, template }
    }

    pub fn zero(template: &C, order: usize) -> Self {
        Self::new(vec![template.zero_like(); order], template.clone())
    }

    /// `c` as a constant series modulo `t^order`.
    pub fn constant(c: C, order: usize) -> Self {
        let mut s = Self::zero(&c, order);
        if order > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// The series `t` modulo `t^order`.
    pub fn variable(template: &C, order: usize) -> Self {
        let mut s = Self::zero(template, order);
        if order > 1 {
            s.coeffs[1] = template.int_like(1);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn template(&self) -> &C {
        &self.template
    }

    pub fn map<D: Coeff, F: Fn(&C) -> D>(&self, template: D, f: F) -> PowerSeries<D> {
        PowerSeries::new(self.coeffs.iter().map(f).collect(), template)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut s = self.clone();
        s.coeffs.truncate(order);
        s
    }

    /// Index of the first coefficient not known to be zero.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero_coeff())
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let coeffs = (0..m).map(|k| self.coeffs[k].plus(&other.coeffs[k])).collect();
        Self::new(coeffs, self.template.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let coeffs = (0..m).map(|k| self.coeffs[k].minus(&other.coeffs[k])).collect();
        Self::new(coeffs, self.template.clone())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(C::negate).collect(), self.template.clone())
    }

    pub fn scale(&self, c: &C) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.times(c)).collect(), self.template.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.order().min(other.order());
        let mut out = vec![self.template.zero_like(); m];
        for (i, a) in self.coeffs.iter().take(m).enumerate() {
            if a.is_zero_coeff() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(m - i).enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out, self.template.clone())
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::constant(self.template.int_like(1), self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplication by `t^k`; the order grows by `k`.
    pub fn shift_up(&self, k: usize) -> Self {
        let mut coeffs = vec![self.template.zero_like(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self::new(coeffs, self.template.clone())
    }

    /// Division by `t^k`; the first `k` coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<Self> {
        if self.coeffs.iter().take(k).any(|c| !c.is_zero_coeff()) {
            return Err(Error::InvalidArgument(format!("series is not divisible by t^{k}")));
        }
        Ok(Self::new(self.coeffs.iter().skip(k).cloned().collect(), self.template.clone()))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = (1..self.order())
            .map(|k| self.coeffs[k].times(&self.template.int_like(k as i64)))
            .collect();
        Self::new(coeffs, self.template.clone())
    }

    /// Antiderivative with zero constant term; the order grows by one.
    pub fn integral(&self) -> Result<Self> {
        let mut coeffs = vec![self.template.zero_like()];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.try_div(&self.template.int_like(k as i64 + 1))?);
        }
        Ok(Self::new(coeffs, self.template.clone()))
    }

    /// Multiplicative inverse of a series with invertible constant term.
    pub fn inverse(&self) -> Result<Self> {
        let m = self.order();
        if m == 0 {
            return Ok(self.clone());
        }
        let a0 = &self.coeffs[0];
        let one = self.template.int_like(1);
        let inv0 = one.try_div(a0)?;
        let mut b = vec![inv0.clone()];
        for n in 1..m {
            let mut acc = self.template.zero_like();
            for k in 1..=n {
                acc = acc.plus(&self.coeffs[k].times(&b[n - k]));
            }
            b.push(acc.times(&inv0).negate());
        }
        Ok(Self::new(b, self.template.clone()))
    }

    /// `self ∘ g` for `g` without constant term, by Horner's rule.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if g.order() > 0 && !g.coeffs[0].is_zero_coeff() {
            return Err(Error::InvalidArgument("composition needs g(0) = 0".into()));
        }
        let m = self.order().min(g.order());
        let g = g.truncate(m);
        let mut acc = Self::zero(&self.template, m);
        for c in self.coeffs.iter().take(m).rev() {
            acc = acc.mul(&g);
            acc.coeffs[0] = acc.coeffs[0].plus(c);
        }
        Ok(acc)
    }

    /// Compositional inverse of `g = a_1 t + ...` with `a_1` invertible.
    pub fn reversion(&self) -> Result<Self> {
        let m = self.order();
        if m < 2 || !self.coeffs[0].is_zero_coeff() {
            return Err(Error::InvalidArgument("reversion needs g(0) = 0 and order >= 2".into()));
        }
        let a1 = self.coeffs[1].clone();
        let t = Self::variable(&self.template, m);
        // h ↦ h - (g∘h - t)/a1 gains at least one correct coefficient per pass
        let mut h = t.scale(&self.template.int_like(1).try_div(&a1)?);
        for _ in 0..m {
            let defect = self.compose(&h)?.sub(&t);
            if defect.coeffs.iter().all(C::is_zero_coeff) {
                break;
            }
            let mut step = Vec::with_capacity(m);
            for c in &defect.coeffs {
                step.push(c.try_div(&a1)?);
            }
            h = h.sub(&Self::new(step, self.template.clone()));
        }
        Ok(h)
    }

    /// `exp(f)` for `f` without constant term.
    pub fn exp(&self) -> Result<Self> {
        let m = self.order();
        if m > 0 && !self.coeffs[0].is_zero_coeff() {
            return Err(Error::InvalidArgument("exp needs f(0) = 0".into()));
        }
        let mut e = vec![self.template.int_like(1)];
        for n in 1..m {
            let mut acc = self.template.zero_like();
            for k in 1..=n {
                let kf = self.coeffs[k].times(&self.template.int_like(k as i64));
                acc = acc.plus(&kf.times(&e[n - k]));
            }
            e.push(acc.try_div(&self.template.int_like(n as i64))?);
        }
        e.truncate(m);
        Ok(Self::new(e, self.template.clone()))
    }

    /// `log(1 + g) = Σ_{n>=1} (-1)^{n+1} g^n / n` for `g` without constant term.
    pub fn log_one_plus(&self) -> Result<Self> {
        let m = self.order();
        if m > 0 && !self.coeffs[0].is_zero_coeff() {
            return Err(Error::InvalidArgument("log(1 + g) needs g(0) = 0".into()));
        }
        let mut acc = Self::zero(&self.template, m);
        let mut power = Self::constant(self.template.int_like(1), m);
        for n in 1..m.max(1) {
            power = power.mul(self);
            let term = power.map(self.template.clone(), |c| c.clone());
            let mut divided = Vec::with_capacity(m);
            for c in term.coeffs() {
                divided.push(c.try_div(&self.template.int_like(n as i64))?);
            }
            let term = Self::new(divided, self.template.clone());
            acc = if n % 2 == 1 { acc.add(&term) } else { acc.sub(&term) };
        }
        Ok(acc)
    }

    /// `log f` for `f` with constant term one.
    pub fn log(&self) -> Result<Self> {
        let one = Self::constant(self.template.int_like(1), self.order());
        let g = self.sub(&one);
        if self.order() > 0 && !g.coeffs[0].is_zero_coeff() {
            return Err(Error::InvalidArgument("log needs constant term 1".into()));
        }
        g.log_one_plus()
    }
}

impl RationalSeries {
    pub fn from_integers(values: &[i64]) -> Self {
        let coeffs = values
            .iter()
            .map(|&v| BigRational::from_integer(BigInt::from(v)))
            .collect();
        Self::new(coeffs, BigRational::zero())
    }

    /// Each coefficient reduced into `ℚ_p` modulo `p^abs_prec`.
    pub fn reduce(&self, p: u64, abs_prec: i64) -> PadicSeries {
        let template = PadicNumber::zero(p, abs_prec);
        self.map(template, |c| PadicNumber::from_rational(c, p, abs_prec))
    }

    /// Each coefficient with `prec` digits of relative precision.
    pub fn reduce_relative(&self, p: u64, prec: u32) -> PadicSeries {
        let template = PadicNumber::zero(p, i64::from(prec));
        self.map(template, |c| PadicNumber::from_rational_relative(c, p, prec))
    }

    pub fn is_one(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| if k == 0 { c.is_one() } else { c.is_zero() })
    }
}

impl PadicSeries {
    /// Smallest absolute precision among the coefficients.
    pub fn absolute_precision(&self) -> i64 {
        self.coeffs
            .iter()
            .map(PadicNumber::absolute_precision)
            .min()
            .unwrap_or(i64::MAX)
    }

    /// Coefficient-wise congruence modulo `p^n`; `None` if some coefficient
    /// is known to fewer than `n` digits.
    pub fn congruent(&self, other: &Self, n: i64) -> Option<bool> {
        let m = self.order().min(other.order());
        let mut all = true;
        for k in 0..m {
            all &= self.coeffs[k].congruent(&other.coeffs[k], n)?;
        }
        Some(all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn geometric_inverse() {
        let f = RationalSeries::from_integers(&[1, -1, 0, 0, 0, 0]);
        let g = f.inverse().unwrap();
        assert_eq!(g, RationalSeries::from_integers(&[1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn exp_log_round_trip() {
        let f = RationalSeries::new(vec![q(0, 1), q(1, 1), q(-1, 3), q(2, 7), q(0, 1), q(5, 2)], q(0, 1));
        let back = f.exp().unwrap().log().unwrap();
        assert_eq!(back, f);
        let e = RationalSeries::variable(&q(0, 1), 5).exp().unwrap();
        assert_eq!(e.coeff(4), &q(1, 24));
    }

    #[test]
    fn reversion_inverts_composition() {
        let g = RationalSeries::new(vec![q(0, 1), q(2, 1), q(1, 1), q(-1, 5), q(3, 1), q(0, 1), q(1, 9)], q(0, 1));
        let h = g.reversion().unwrap();
        let t = RationalSeries::variable(&q(0, 1), 7);
        assert_eq!(g.compose(&h).unwrap(), t);
        assert_eq!(h.compose(&g).unwrap(), t);
    }

    #[test]
    fn calculus() {
        let f = RationalSeries::from_integers(&[3, 1, 4, 1, 5]);
        assert_eq!(f.derivative(), RationalSeries::from_integers(&[1, 8, 3, 20]));
        let back = f.derivative().integral().unwrap();
        assert!(back.sub(&f).coeffs()[1..].iter().all(|c| c.is_zero()));
        assert!(f.shift_down(1).is_err());
        assert_eq!(f.shift_up(2).order(), 7);
    }

    #[test]
    fn padic_reduction_commutes_with_products() {
        let f = RationalSeries::new(vec![q(1, 1), q(2, 3), q(-7, 4), q(5, 1)], q(0, 1));
        let g = RationalSeries::new(vec![q(3, 1), q(0, 1), q(1, 2), q(-1, 6)], q(0, 1));
        let (p, n) = (7, 6);
        let exact = f.mul(&g).reduce(p, n);
        let modular = f.reduce(p, n).mul(&g.reduce(p, n));
        assert_eq!(exact.congruent(&modular, n), Some(true));
    }
}
