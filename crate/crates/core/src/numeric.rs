//! Precision settings and the complex special functions shared by the
//! analytic modules: Euler gamma, its reciprocal, and the upper incomplete
//! gamma function in the two normalisations the lattice sums need.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex scalar used throughout the analytic layer.
pub type ComplexValue = Complex64;

/// Iteration cap for every series and continued fraction in the crate.
pub const MAX_ITERATIONS: usize = 10_000;

/// Distance from a non-positive integer at which [`gamma`] reports a pole.
/// Equal to the default `quad_tol`.
pub const POLE_TOLERANCE: f64 = 1e-15;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// zeta(k) for k = 2..=32
const ZETA_INT: [f64; 31] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_925_9,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
    1.000_000_000_465_662_9,
    1.000_000_000_232_831_2,
];

/// Tolerances shared by the lattice sums and the verification harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    /// Lower bound on the truncation of Gaussian-weighted lattice sums:
    /// terms with `|z0 + γ|² ≤ factor·A` are always included.
    pub truncation_radius_factor: f64,
    /// Termination tolerance for series, continued fractions and sum tails.
    pub quad_tol: f64,
    /// Advertised absolute accuracy of top-level results.
    pub target_abs_error: f64,
}

impl PrecisionConfig {
    pub fn new(truncation_radius_factor: f64, quad_tol: f64, target_abs_error: f64) -> Result<Self> {
        let cfg = PrecisionConfig {
            truncation_radius_factor,
            quad_tol,
            target_abs_error,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_radius_factor >= 10.0) || !self.truncation_radius_factor.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "truncation_radius_factor must be >= 10, got {}",
                self.truncation_radius_factor
            )));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < self.target_abs_error && self.target_abs_error < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < quad_tol < target_abs_error < 1, got quad_tol = {}, target_abs_error = {}",
                self.quad_tol, self.target_abs_error
            )));
        }
        Ok(())
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            truncation_radius_factor: 40.0,
            quad_tol: 1e-15,
            target_abs_error: 1e-10,
        }
    }
}

/// Rejects NaN and infinite components.
pub fn ensure_finite(value: Complex64, what: &str) -> Result<Complex64> {
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidArgument(format!("{what} is not finite: {value}")))
    }
}

/// Euler's constant `c = lim (1 + 1/2 + ... + 1/n - log n)`.
pub fn euler_constant() -> f64 {
    EULER_GAMMA
}

/// `sin(π s)` with the argument reduced to the nearest integer first, so
/// that zeros at integers are reproduced exactly.
fn sin_pi(s: Complex64) -> Complex64 {
    let k = s.re.round();
    let r = Complex64::new(s.re - k, s.im);
    let v = (r * PI).sin();
    if (k as i64).rem_euclid(2) == 0 {
        v
    } else {
        -v
    }
}

fn lanczos(s: Complex64) -> Complex64 {
    // valid for Re(s) >= 0.5
    let z = s - 1.0;
    let mut x = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * ((z + 0.5) * t.ln() - t).exp() * x
}

/// Index `k >= 0` when `s` lies within `tol` of `-k`.
fn nonpositive_integer_near(s: Complex64, tol: f64) -> Option<i64> {
    let k = (-s.re).round();
    if k >= 0.0 && (s + k).norm() < tol {
        Some(k as i64)
    } else {
        None
    }
}

/// Euler gamma function.
pub fn gamma(s: Complex64) -> Result<Complex64> {
    let s = ensure_finite(s, "gamma argument")?;
    if let Some(k) = nonpositive_integer_near(s, POLE_TOLERANCE) {
        return Err(Error::GammaPole(-k));
    }
    if s.re < 0.5 {
        Ok(PI / (sin_pi(s) * lanczos(1.0 - s)))
    } else {
        Ok(lanczos(s))
    }
}

/// Reciprocal gamma `1/Γ(s)`, an entire function; exactly zero at the
/// non-positive integers.
pub fn rgamma(s: Complex64) -> Complex64 {
    if s.re < 0.5 {
        sin_pi(s) * lanczos(1.0 - s) / PI
    } else {
        1.0 / lanczos(s)
    }
}

/// `(e^u - 1)/u`, continuous at `u = 0`.
pub(crate) fn expm1_over(u: Complex64) -> Complex64 {
    if u.norm() < 0.1 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for n in 2..30 {
            term *= u / n as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (u.exp() - 1.0) / u
    }
}

/// `ln(1 + y)/y`, continuous at `y = 0`.
pub(crate) fn log1p_over(y: Complex64) -> Complex64 {
    if y.norm() < 0.1 {
        let mut pow = Complex64::new(1.0, 0.0);
        let mut sum = pow;
        for n in 1..40 {
            pow *= -y;
            let term = pow / (n + 1) as f64;
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum
    } else {
        (1.0 + y).ln() / y
    }
}

/// `(Γ(1+ε) - 1)/ε` for `|ε| <= 1/4`, from the Taylor series of `ln Γ(1+ε)`.
fn gamma1_minus_one_over(eps: Complex64) -> Complex64 {
    // ln Γ(1+ε)/ε = -c + Σ_{k>=2} (-1)^k ζ(k) ε^{k-1} / k
    let mut l_over = Complex64::new(-EULER_GAMMA, 0.0);
    let mut pow = Complex64::new(1.0, 0.0);
    for (i, &z) in ZETA_INT.iter().enumerate() {
        let k = (i + 2) as f64;
        pow *= -eps;
        l_over -= pow * (z / k);
    }
    let l = l_over * eps;
    expm1_over(l) * l_over
}

/// Upper incomplete gamma near a pole `s = -m + ε`, `x` small.
///
/// Uses `Γ(s,x) = Γ(s) - Σ_n (-1)^n x^{s+n} / (n! (s+n))` with the `n = m`
/// term combined analytically against the pole of `Γ(s)`.
fn upper_gamma_near_pole(m: i64, eps: Complex64, x: f64) -> Result<Complex64> {
    let s = eps - m as f64;
    let lnx = x.ln();
    let mut m_fact = 1.0;
    for k in 1..=m {
        m_fact *= k as f64;
    }
    let sign_m = if m % 2 == 0 { 1.0 } else { -1.0 };
    let inv_p0 = sign_m / m_fact;

    // Γ(ε - m) - (-1)^m / (m! ε) = G1(ε)/P(ε) + D(ε)
    let mut p_eps = Complex64::new(1.0, 0.0);
    let mut u_over = Complex64::new(0.0, 0.0);
    for k in 1..=m {
        let kf = k as f64;
        p_eps *= eps - kf;
        u_over += log1p_over(-eps / kf) / kf;
    }
    let u = u_over * eps;
    let d = inv_p0 * expm1_over(u) * u_over;
    let regular = gamma1_minus_one_over(eps) / p_eps + d;

    // (-1)^m (1 - x^ε)/(m! ε)
    let pole_term = inv_p0 * (-lnx) * expm1_over(eps * lnx);

    let mut sum = Complex64::new(0.0, 0.0);
    let mut coeff = 1.0; // (-1)^n x^n / n!
    let mut converged = false;
    for n in 0..MAX_ITERATIONS as i64 {
        if n > 0 {
            coeff *= -x / n as f64;
        }
        if n != m {
            let term = coeff / (s + n as f64);
            sum += term;
            if n > m && term.norm() < f64::EPSILON * 1e-2 * sum.norm().max(1e-300) {
                converged = true;
                break;
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            scheme: "incomplete gamma series near pole",
            iterations: MAX_ITERATIONS,
        });
    }
    let xs = (s * lnx).exp();
    Ok(regular + pole_term - xs * sum)
}

/// Lower incomplete gamma `γ(s, x)` by its power series, `s` away from poles.
fn lower_gamma_series(s: Complex64, x: f64) -> Result<Complex64> {
    let mut term = 1.0 / s;
    let mut sum = term;
    for n in 1..MAX_ITERATIONS {
        term *= x / (s + n as f64);
        sum += term;
        if term.norm() < f64::EPSILON * 1e-2 * sum.norm() {
            let prefactor = (s * x.ln() - x).exp();
            return Ok(prefactor * sum);
        }
    }
    Err(Error::NonConvergence {
        scheme: "lower incomplete gamma series",
        iterations: MAX_ITERATIONS,
    })
}

/// Legendre continued fraction for `e^x x^{-s} Γ(s, x)`, modified Lentz.
fn upper_gamma_cf_scaled(s: Complex64, x: f64) -> Result<Complex64> {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(x + 1.0, 0.0) - s;
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITERATIONS {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.norm() < TINY {
            d = Complex64::new(TINY, 0.0);
        }
        c = b + an / c;
        if c.norm() < TINY {
            c = Complex64::new(TINY, 0.0);
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).norm() < f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        scheme: "incomplete gamma continued fraction",
        iterations: MAX_ITERATIONS,
    })
}

fn use_continued_fraction(s: Complex64, x: f64) -> bool {
    x >= s.norm() + 1.0
}

fn near_pole(s: Complex64) -> Option<(i64, Complex64)> {
    let m = (-s.re).round();
    if m >= 0.0 {
        let eps = s + m;
        if eps.norm() < 0.25 {
            return Some((m as i64, eps));
        }
    }
    None
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ e^{-t} t^{s-1} dt` for `x > 0`.
///
/// Continued fraction for `x >= |s| + 1`, otherwise `Γ(s)` minus the lower
/// series (with the pole of `Γ(s)` cancelled analytically near `s = 0, -1, ...`).
pub fn upper_incomplete_gamma(s: Complex64, x: f64) -> Result<Complex64> {
    let s = ensure_finite(s, "incomplete gamma order")?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "upper incomplete gamma needs x > 0, got {x}"
        )));
    }
    if use_continued_fraction(s, x) {
        let h = upper_gamma_cf_scaled(s, x)?;
        return Ok((s * x.ln() - x).exp() * h);
    }
    match near_pole(s) {
        Some((m, eps)) => upper_gamma_near_pole(m, eps, x),
        None => Ok(gamma(s)? - lower_gamma_series(s, x)?),
    }
}

/// `∫_1^∞ e^{-x t} t^{s-1} dt = x^{-s} Γ(s, x)`, the per-term weight of the
/// lattice integrals. Computed without forming `x^s` on the continued
/// fraction branch.
pub fn tail_integral(s: Complex64, x: f64) -> Result<Complex64> {
    let s = ensure_finite(s, "tail integral order")?;
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "tail integral needs x > 0, got {x}"
        )));
    }
    if use_continued_fraction(s, x) {
        return Ok((-x).exp() * upper_gamma_cf_scaled(s, x)?);
    }
    let g = upper_incomplete_gamma(s, x)?;
    Ok(g * (-s * x.ln()).exp())
}

/// Upper bound on `|∫_1^∞ e^{-x t} t^{s-1} dt|` valid for `x > max(Re s - 1, 0)`.
pub(crate) fn tail_integral_bound(s_re: f64, x: f64) -> f64 {
    let shift = (s_re - 1.0).max(0.0);
    if x <= shift {
        return f64::INFINITY;
    }
    (-x).exp() / (x - shift)
}
