//! Formal σ, λ and θ̂ series for a rational Weierstrass model
//! `y² = 4x³ - g2 x - g3`, and the α = 2 theta distribution relation as an
//! exact congruence.
//!
//! The local parameter at the origin is `t = -2x/y`. Writing
//! `x = t^{-2}/W(t)` and `y = -2t^{-3}/W(t)` turns the curve equation into
//! `W = 1 - (g2/4) t⁴ W² - (g3/4) t⁶ W³`, solved by fixed-point iteration;
//! the invariant differential is `dx/y = (1 + t W'/(2W)) dt`.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

use super::number::{check_prime, rational_string, rational_to_f64, round_to_bigint, valuation_of, PadicNumber};
use super::series::{PadicSeries, RationalSeries};
use crate::error::{Error, Result};
use crate::report::{params, VerificationReport};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn zero_template() -> BigRational {
    BigRational::zero()
}

/// A rational model `y² = 4x³ - g2 x - g3` with good reduction at `p >= 5`.
#[derive(Debug, Clone, PartialEq)]
pub struct CMCurveModel {
    pub g2: BigRational,
    pub g3: BigRational,
    pub p: u64,
    /// Informational: the CM field when it can be read off `(g2, g3)` and
    /// the behaviour of `p` in it.
    pub pi_norm_note: String,
}

impl CMCurveModel {
    pub fn new(g2: BigRational, g3: BigRational, p: u64) -> Result<Self> {
        check_prime(p)?;
        let delta = discriminant(&g2, &g3);
        if delta.is_zero() {
            return Err(Error::InvalidArgument("singular model: Δ = 0".into()));
        }
        for (name, v) in [("g2", &g2), ("g3", &g3)] {
            if valuation_of(v, p).is_some_and(|k| k < 0) {
                return Err(Error::InvalidArgument(format!("{name} is not p-integral for p = {p}")));
            }
        }
        if valuation_of(&delta, p) != Some(0) {
            return Err(Error::InvalidArgument(format!("bad reduction: p = {p} divides Δ")));
        }
        let pi_norm_note = cm_note(&g2, &g3, p);
        Ok(CMCurveModel { g2, g3, p, pi_norm_note })
    }

    pub fn from_integers(g2: i64, g3: i64, p: u64) -> Result<Self> {
        Self::new(rat(g2), rat(g3), p)
    }

    /// The same curve, revalidated for good reduction at another prime.
    pub fn with_prime(&self, p: u64) -> Result<Self> {
        Self::new(self.g2.clone(), self.g3.clone(), p)
    }

    /// `Δ = g2³ - 27 g3²`.
    pub fn delta(&self) -> BigRational {
        discriminant(&self.g2, &self.g3)
    }

    /// `e*_{0,2}` where it is forced by an automorphism of order 4 or 6.
    pub fn e_star(&self) -> Result<BigRational> {
        if self.g2.is_zero() || self.g3.is_zero() {
            Ok(BigRational::zero())
        } else {
            Err(Error::InvalidArgument(
                "e*_(0,2) is only known to be rational (zero) for g2 = 0 or g3 = 0".into(),
            ))
        }
    }

    /// Header line of the series dump format.
    pub fn header(&self, n: i64, m: usize) -> String {
        format!(
            "model g2={} g3={} p={} N={} M={}",
            rational_string(&self.g2),
            rational_string(&self.g3),
            self.p,
            n,
            m
        )
    }
}

fn discriminant(g2: &BigRational, g3: &BigRational) -> BigRational {
    g2 * g2 * g2 - rat(27) * g3 * g3
}

fn cm_note(g2: &BigRational, g3: &BigRational, p: u64) -> String {
    if g3.is_zero() {
        let kind = if p % 4 == 1 { "split (ordinary)" } else { "inert (supersingular)" };
        format!("CM by Z[i]; p = {p} is {kind} in Q(i)")
    } else if g2.is_zero() {
        let kind = if p % 3 == 1 { "split (ordinary)" } else { "inert (supersingular)" };
        format!("CM by Z[(1+sqrt(-3))/2]; p = {p} is {kind} in Q(sqrt(-3))")
    } else {
        "CM field not read off from (g2, g3)".into()
    }
}

/// `W(t)` modulo `t^m`.
pub fn w_series(model: &CMCurveModel, m: usize) -> RationalSeries {
    let one = RationalSeries::constant(rat(1), m);
    let t = RationalSeries::variable(&zero_template(), m);
    let t4 = t.pow(4).scale(&(&model.g2 / rat(4)));
    let t6 = t.pow(6).scale(&(&model.g3 / rat(4)));
    let mut w = one.clone();
    // each pass fixes at least four more coefficients
    for _ in 0..=m / 4 {
        let w2 = w.mul(&w);
        let w3 = w2.mul(&w);
        w = one.sub(&t4.mul(&w2)).sub(&t6.mul(&w3));
    }
    w
}

/// Formal logarithm `λ(t) = ∫ dx/y` modulo `t^m`, with `λ(t) = t + O(t⁵)`.
pub fn formal_group_log(model: &CMCurveModel, m: usize) -> Result<RationalSeries> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("formal_group_log needs M >= 2, got {m}")));
    }
    let w = w_series(model, m);
    let t = RationalSeries::variable(&zero_template(), m);
    let ratio = t.mul(&w.derivative()).mul(&w.inverse()?);
    let integrand = RationalSeries::constant(rat(1), m).add(&ratio.scale(&BigRational::new(1.into(), 2.into())));
    integrand.truncate(m - 1).integral()
}

/// Taylor coefficients of `σ(z)` modulo `z^m` from the recursion
/// `a_{m,n} = 3(m+1) a_{m+1,n-1} + (16/3)(n+1) a_{m-2,n+1} - (1/3)(2m+3n-1)(4m+6n-1) a_{m-1,n}`,
/// `σ(z) = Σ a_{m,n} (g2/2)^m (2g3)^n z^{4m+6n+1} / (4m+6n+1)!`.
pub fn sigma_series(model: &CMCurveModel, m: usize) -> Result<RationalSeries> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("sigma_series needs M >= 2, got {m}")));
    }
    let mut a: HashMap<(i64, i64), BigRational> = HashMap::new();
    let get = |a: &HashMap<(i64, i64), BigRational>, i: i64, j: i64| -> BigRational {
        if i < 0 || j < 0 {
            BigRational::zero()
        } else {
            a.get(&(i, j)).cloned().unwrap_or_else(BigRational::zero)
        }
    };
    let half_g2 = &model.g2 / rat(2);
    let two_g3 = &model.g3 * rat(2);
    let mut coeffs = vec![BigRational::zero(); m];
    let mut degree = 0i64;
    while (degree + 1) < m as i64 {
        for j in 0..=degree / 6 {
            let rest = degree - 6 * j;
            if rest % 4 != 0 {
                continue;
            }
            let i = rest / 4;
            let value = if i == 0 && j == 0 {
                rat(1)
            } else {
                rat(3 * (i + 1)) * get(&a, i + 1, j - 1)
                    + BigRational::new(BigInt::from(16 * (j + 1)), BigInt::from(3)) * get(&a, i - 2, j + 1)
                    - BigRational::new(BigInt::from((2 * i + 3 * j - 1) * (4 * i + 6 * j - 1)), BigInt::from(3))
                        * get(&a, i - 1, j)
            };
            let k = (degree + 1) as usize;
            let mut factorial = BigInt::one();
            for f in 2..=k {
                factorial *= f;
            }
            coeffs[k] += &value * half_g2.pow(i as i32) * two_g3.pow(j as i32) / BigRational::from_integer(factorial);
            a.insert((i, j), value);
        }
        degree += 2;
    }
    Ok(RationalSeries::new(coeffs, zero_template()))
}

/// `θ̂(t) = exp(-e* z²/2) σ(z)` at `z = λ(t)`, modulo `t^m`.
pub fn theta_hat_series(model: &CMCurveModel, e_star: &BigRational, m: usize) -> Result<RationalSeries> {
    let sigma = sigma_series(model, m)?;
    let z = RationalSeries::variable(&zero_template(), m);
    let gauss = z.mul(&z).scale(&(-e_star / rat(2))).exp()?;
    let theta = gauss.mul(&sigma);
    theta.compose(&formal_group_log(model, m)?)
}

/// `[2](t) = λ^{-1}(2λ(t))` modulo `t^m`.
pub fn doubling_series(model: &CMCurveModel, m: usize) -> Result<RationalSeries> {
    let lambda = formal_group_log(model, m)?;
    lambda.reversion()?.compose(&lambda.scale(&rat(2)))
}

/// `θ̂([2]t)` modulo `t^m` two ways: (a) by composing with the formal
/// doubling, (b) as `-θ̂(t)⁴ ℘̂'(t) = 2t (θ̂(t)/t)⁴ / W(t)`.
pub fn formal_duplication(model: &CMCurveModel, m: usize) -> Result<(RationalSeries, RationalSeries)> {
    if m < 8 {
        return Err(Error::InvalidArgument(format!("formal_duplication needs M >= 8, got {m}")));
    }
    let e_star = model.e_star()?;
    let theta = theta_hat_series(model, &e_star, m + 1)?;
    let route_a = theta.compose(&doubling_series(model, m + 1)?)?.truncate(m);
    let u = theta.shift_down(1)?;
    let w_inv = w_series(model, m).inverse()?;
    let route_b = u.pow(4).mul(&w_inv).scale(&rat(2)).shift_up(1).truncate(m);
    Ok((route_a, route_b))
}

/// Rational roots `e1, e2, e3` of `4x³ - g2 x - g3`.
pub fn half_period_values(model: &CMCurveModel) -> Result<[BigRational; 3]> {
    let lcm = model.g2.denom().lcm(model.g3.denom());
    let a3 = BigInt::from(4) * &lcm;
    let f = |x: &BigRational| rat(4) * x * x * x - &model.g2 * x - &model.g3;
    let g2 = rational_to_f64(&model.g2);
    let g3 = rational_to_f64(&model.g3);
    let mut out = Vec::with_capacity(3);
    for root in cubic_roots(g2, g3) {
        if root.im.abs() > 1e-7 * (1.0 + root.norm()) {
            return Err(Error::IrrationalHalfPeriods);
        }
        let scaled = round_to_bigint(root.re * rational_to_f64(&BigRational::from_integer(a3.clone())))
            .ok_or(Error::IrrationalHalfPeriods)?;
        let candidate = BigRational::new(scaled, a3.clone());
        if !f(&candidate).is_zero() {
            return Err(Error::IrrationalHalfPeriods);
        }
        out.push(candidate);
    }
    out.sort();
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

/// Roots of `4x³ - g2 x - g3` by Durand–Kerner iteration.
fn cubic_roots(g2: f64, g3: f64) -> [Complex64; 3] {
    let f = |x: Complex64| x * x * x - g2 / 4.0 * x - g3 / 4.0;
    let seed = Complex64::new(0.4, 0.9);
    let scale = 1.0 + g2.abs().sqrt() + g3.abs().cbrt();
    let mut r = [seed * scale, seed * seed * scale, seed * seed * seed * scale];
    for _ in 0..500 {
        let prev = r;
        for i in 0..3 {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= r[i] - r[j];
                }
            }
            r[i] -= f(r[i]) / den;
        }
        if (0..3).all(|i| (r[i] - prev[i]).norm() < 1e-15 * scale) {
            break;
        }
    }
    r
}

/// `log_p` of `θ̂(t)/t` on the residue disc of the origin.
///
/// `log_p θ̂ = log_p(t) + log(θ̂/t)`; the first term is kept symbolic
/// (`has_log_t_term`) and `series` holds the second, computed in `ℚ_p` from
/// `log(1 + g) = Σ (-1)^{n+1} g^n / n` with precision tracked through the
/// divisions.
#[derive(Debug, Clone, PartialEq)]
pub struct LogThetaHat {
    pub series: PadicSeries,
    pub has_log_t_term: bool,
}

pub fn log_theta_hat(model: &CMCurveModel, e_star: &BigRational, m: usize, p: u64, n: u32) -> Result<LogThetaHat> {
    let model = model.with_prime(p)?;
    let unit_part = theta_hat_series(&model, e_star, m + 1)?.shift_down(1)?;
    let reduced = unit_part.reduce_relative(p, n);
    let series = reduced.log()?;
    for (k, c) in series.coeffs().iter().enumerate() {
        if !c.is_zero() && c.precision() < 1 {
            return Err(Error::PrecisionExhausted(format!("coefficient of t^{k}")));
        }
        if c.is_zero() && c.absolute_precision() < 1 {
            return Err(Error::PrecisionExhausted(format!("coefficient of t^{k}")));
        }
    }
    Ok(LogThetaHat {
        series,
        has_log_t_term: true,
    })
}

/// Series dump: the model header, then one `k: unit*p^val (mod p^A)` line
/// per coefficient.
pub fn dump_series(model: &CMCurveModel, series: &PadicSeries, n: i64) -> String {
    let mut out = model.header(n, series.order());
    out.push('\n');
    for (k, c) in series.coeffs().iter().enumerate() {
        out.push_str(&format!("{k}: {c}\n"));
    }
    out
}

struct DistributionSides {
    /// `θ̂([2]t)/t`, before the eighth power.
    lhs: RationalSeries,
    unit: RationalSeries,
    w: RationalSeries,
    e: [BigRational; 3],
    constant: BigRational,
}

/// Sides of `(θ̂([2]t)/t)⁸ = C u³² Π_i (e_i t² W - 1)⁴ W^{-12}` with
/// `u = θ̂/t` and `C = Δ² Δ'^{-2}` (shifted by `constant_shift`), modulo `t^m`.
/// This is `θ̂([2]t)⁸ = C θ̂³² Π(e_i - ℘̂)⁴` after removing the factor `t⁸`.
fn distribution_sides(model: &CMCurveModel, m: usize, constant_shift: &BigRational) -> Result<(DistributionSides, BigRational, BigRational)> {
    let e = half_period_values(model)?;
    let diff = (&e[0] - &e[1]) * (&e[1] - &e[2]) * (&e[2] - &e[0]);
    let delta_prime = &diff * &diff;
    let delta = model.delta();
    if delta != rat(16) * &delta_prime {
        return Err(Error::Consistency(format!(
            "Δ = {} but 16Δ' = {}",
            rational_string(&delta),
            rational_string(&(rat(16) * &delta_prime))
        )));
    }
    let constant = (&delta * &delta + constant_shift) / (&delta_prime * &delta_prime);
    let (route_a, _) = formal_duplication(model, m + 1)?;
    let lhs = route_a.shift_down(1)?;
    let theta = theta_hat_series(model, &model.e_star()?, m + 1)?;
    let unit = theta.shift_down(1)?;
    let w = w_series(model, m);
    Ok((DistributionSides { lhs, unit, w, e, constant }, delta, delta_prime))
}

fn rhs_series<C: super::series::Coeff>(
    unit: &super::series::PowerSeries<C>,
    w: &super::series::PowerSeries<C>,
    e: &[C; 3],
    constant: &C,
) -> Result<super::series::PowerSeries<C>> {
    let m = unit.order().min(w.order());
    let template = unit.template().clone();
    let t2w = w.shift_up(2).truncate(m);
    let one = super::series::PowerSeries::constant(template.int_like(1), m);
    let mut product = one.clone();
    for ei in e {
        product = product.mul(&t2w.scale(ei).sub(&one).pow(4));
    }
    Ok(unit.pow(32).mul(&product).mul(&w.inverse()?.pow(12)).scale(constant))
}

/// Exact check of the α = 2 theta distribution relation modulo `(p^N, t^M)`.
///
/// `lhs` of the report is the number of coefficients violating the
/// congruence (summed over the exact-rational and the `ℚ_p` pipelines), `rhs`
/// is zero and the tolerance is zero.
pub fn verify_padic_distribution(model: &CMCurveModel, p: u64, n: u32, m: usize) -> Result<VerificationReport> {
    padic_distribution_report(model, p, n, m, &BigRational::zero())
}

/// [`verify_padic_distribution`] with the constant `Δ²` replaced by
/// `Δ² + constant_shift`; a nonzero shift is the negative control.
pub fn padic_distribution_report(
    model: &CMCurveModel,
    p: u64,
    n: u32,
    m: usize,
    constant_shift: &BigRational,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let model = &model.with_prime(p)?;
    let (sides, delta, delta_prime) = distribution_sides(model, m, constant_shift)?;

    let rhs_exact = rhs_series(&sides.unit, &sides.w, &sides.e, &sides.constant)?;
    let diff = sides.lhs.pow(8).sub(&rhs_exact);
    let exact_mismatches = diff
        .coeffs()
        .iter()
        .filter(|c| valuation_of(c, p).is_some_and(|v| v < i64::from(n)))
        .count();

    // the same identity evaluated in ℚ_p with guard digits
    let guard = n + m as u32 + 8;
    let red = |s: &RationalSeries| s.reduce_relative(p, guard);
    let red_c = |c: &BigRational| PadicNumber::from_rational_relative(c, p, guard);
    let e_p = [red_c(&sides.e[0]), red_c(&sides.e[1]), red_c(&sides.e[2])];
    let rhs_p = rhs_series(&red(&sides.unit), &red(&sides.w), &e_p, &red_c(&sides.constant))?;
    let lhs_p = red(&sides.lhs).pow(8);
    let mut padic_mismatches = 0usize;
    for (k, (a, b)) in lhs_p.coeffs().iter().zip(rhs_p.coeffs()).enumerate() {
        match a.congruent(b, i64::from(n)) {
            Some(true) => {}
            Some(false) => padic_mismatches += 1,
            None => {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient of t^{k} is known to fewer than {n} digits"
                )))
            }
        }
    }

    let mismatches = (exact_mismatches + padic_mismatches) as f64;
    Ok(VerificationReport::new(
        "padic-dist",
        None,
        params([
            ("g2", json!(rational_string(&model.g2))),
            ("g3", json!(rational_string(&model.g3))),
            ("p", json!(p)),
            ("N", json!(n)),
            ("M", json!(m)),
            ("delta", json!(rational_string(&delta))),
            ("delta_prime", json!(rational_string(&delta_prime))),
            ("half_period_values", json!(sides.e.iter().map(rational_string).collect::<Vec<_>>())),
            ("constant", json!(rational_string(&sides.constant))),
            ("constant_shift", json!(rational_string(constant_shift))),
            ("exact_mismatches", json!(exact_mismatches)),
            ("padic_mismatches", json!(padic_mismatches)),
            ("cm_note", json!(model.pi_norm_note)),
        ]),
        Complex64::new(mismatches, 0.0),
        Complex64::new(0.0, 0.0),
        0.0,
    )
    .timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> CMCurveModel {
        CMCurveModel::from_integers(4, 0, 5).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn model_validation() {
        assert!(CMCurveModel::from_integers(0, 0, 5).is_err());
        assert!(CMCurveModel::from_integers(4, 0, 2).is_err());
        assert!(CMCurveModel::from_integers(4, 0, 11).unwrap().pi_norm_note.contains("inert"));
        assert!(model().pi_norm_note.contains("split"));
        assert_eq!(model().delta(), rat(64));
    }

    #[test]
    fn lambda_leading_terms() {
        let l = formal_group_log(&model(), 12).unwrap();
        assert_eq!(l.coeff(1), &rat(1));
        assert!(l.coeff(2).is_zero());
        assert_eq!(l.coeff(5), &q(-2, 5));
    }

    #[test]
    fn sigma_leading_terms() {
        let s = sigma_series(&model(), 12).unwrap();
        assert_eq!(s.coeff(1), &rat(1));
        for k in [0, 2, 3, 4] {
            assert!(s.coeff(k).is_zero());
        }
        assert_eq!(s.coeff(5), &q(-1, 60));
        let general = CMCurveModel::new(q(3, 1), q(2, 1), 7).unwrap();
        assert_eq!(sigma_series(&general, 9).unwrap().coeff(7), &q(-2, 840));
    }

    #[test]
    fn half_periods_of_the_square_model() {
        assert_eq!(half_period_values(&model()).unwrap(), [rat(-1), rat(0), rat(1)]);
        let irr = CMCurveModel::from_integers(0, 4, 5).unwrap();
        assert!(matches!(half_period_values(&irr), Err(Error::IrrationalHalfPeriods)));
    }

    #[test]
    fn duplication_routes_agree() {
        let (a, b) = formal_duplication(&model(), 16).unwrap();
        assert_eq!(a, b);
        assert_eq!(doubling_series(&model(), 8).unwrap().coeff(1), &rat(2));
    }

    #[test]
    fn distribution_and_control() {
        let r = verify_padic_distribution(&model(), 5, 8, 16).unwrap();
        assert!(r.pass, "{:?}", r);
        let bad = padic_distribution_report(&model(), 5, 8, 16, &rat(5)).unwrap();
        assert!(!bad.pass);
    }
}
