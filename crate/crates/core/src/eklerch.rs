//! Eisenstein–Kronecker–Lerch series
//!
//! ```text
//! K*_a(z0, w0, s) = Σ*_γ (z̄0 + γ̄)^a ⟨γ, w0⟩ / |z0 + γ|^{2s}
//! ```
//!
//! continued to all `s` through the incomplete-gamma (Ewald) splitting
//!
//! ```text
//! A^s Γ(s) K*_a(z0, w0, s) = I_a(z0, w0, s) - δ(z0)/s ⟨w0, z0⟩
//!                          + I_a(w0, z0, a+1-s) ⟨w0, z0⟩ + δ(w0)/(s-1)
//! ```
//!
//! where `I_a(z0, w0, s) = ∫_1^∞ θ*_a(t, z0, w0) t^{s-1} dt` and `δ(x)` is
//! one exactly when `a = 0` and `x ∈ Γ`. `I_a` is summed term by term, each
//! lattice term contributing `(z̄0+γ̄)^a ⟨γ,w0⟩ ∫_1^∞ e^{-t|z0+γ|²/A} t^{s-1} dt`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::numeric::{self, rgamma, tail_integral, tail_integral_bound, PrecisionConfig};

/// Distance from `s = 1` below which `kstar` reports the pole instead of a value.
pub const POLE_DISTANCE: f64 = 1e-12;

/// Minimum distance from poles required by [`functional_equation_defect`].
pub const DEFECT_POLE_DISTANCE: f64 = 1e-3;

/// Parameters of one `K*_a(z0, w0, s)` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EKQuery {
    pub a: u32,
    pub z0: Complex64,
    pub w0: Complex64,
    pub s: Complex64,
    pub lattice: Lattice,
}

impl EKQuery {
    pub fn new(a: u32, z0: Complex64, w0: Complex64, s: Complex64, lattice: &Lattice) -> Self {
        EKQuery {
            a,
            z0,
            w0,
            s,
            lattice: lattice.clone(),
        }
    }
}

/// Result of [`kstar`].
///
/// At the pole (`a = 0`, `w0 ∈ Γ`, `s = 1`) `is_pole` is set, `pole_residue`
/// holds `1/A` and `value` holds the constant term of the Laurent expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct EKResult {
    pub value: Complex64,
    pub is_pole: bool,
    pub pole_residue: Option<Complex64>,
    pub truncation_radius_used: f64,
    pub estimated_error: f64,
}

#[derive(Debug, Clone, Copy)]
struct LatticeSum {
    value: Complex64,
    radius: f64,
    error: f64,
}

/// Smallest `x` beyond which the Gaussian-weighted terms
/// `(A x)^{a/2} e^{-t x}` (times the tail-integral factor) are below tolerance,
/// inflated by 1.5 in radius and floored by the configured factor.
fn truncation_x(a: u32, s_re: f64, t: f64, area: f64, cfg: &PrecisionConfig) -> f64 {
    let tol = cfg.quad_tol * 1e-2 * area.powf(a as f64 / 2.0).max(1.0);
    let mut x = (s_re + 2.0).max(2.0) / t;
    loop {
        let decay = if t == 1.0 {
            tail_integral_bound(s_re, x)
        } else {
            (-t * x).exp()
        };
        let bound = (area * x).powf(a as f64 / 2.0) * decay * (x + 1.0);
        if bound <= tol || x > 1e4 {
            break;
        }
        x += 0.5;
    }
    (2.25 * x).max(cfg.truncation_radius_factor)
}

fn conj_pow(u: Complex64, a: u32) -> Complex64 {
    u.conj().powu(a)
}

/// `θ*_a(t, z0, w0) = Σ*_γ exp(-t|z0+γ|²/A) ⟨γ, w0⟩ (z̄0 + γ̄)^a` for `t >= 1`.
pub fn theta_star(
    a: u32,
    t: f64,
    z0: Complex64,
    w0: Complex64,
    lattice: &Lattice,
    cfg: &PrecisionConfig,
) -> Result<Complex64> {
    if !(t >= 1.0) {
        return Err(Error::InvalidArgument(format!("theta_star needs t >= 1, got {t}")));
    }
    let area = lattice.area_param();
    let x_max = truncation_x(a, 0.0, t, area, cfg);
    let radius = (area * x_max).sqrt() + z0.norm();
    let mut sum = Complex64::new(0.0, 0.0);
    for gamma in lattice.points_in_disc(radius, Some(z0)) {
        let u = z0 + gamma;
        let x = u.norm_sqr() / area;
        if x == 0.0 {
            continue;
        }
        sum += (-t * x).exp() * lattice.pairing(gamma, w0) * conj_pow(u, a);
    }
    Ok(sum)
}

fn i_sum(
    a: u32,
    z0: Complex64,
    w0: Complex64,
    s: Complex64,
    lattice: &Lattice,
    cfg: &PrecisionConfig,
) -> Result<LatticeSum> {
    let area = lattice.area_param();
    let x_max = truncation_x(a, s.re, 1.0, area, cfg);
    let radius = (area * x_max).sqrt() + z0.norm();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for gamma in lattice.points_in_disc(radius, Some(z0)) {
        let u = z0 + gamma;
        let x = u.norm_sqr() / area;
        if x == 0.0 {
            continue;
        }
        let term = conj_pow(u, a) * lattice.pairing(gamma, w0) * tail_integral(s, x)?;
        abs_sum += term.norm();
        sum += term;
    }
    let value = numeric::ensure_finite(sum, "lattice integral")?;
    Ok(LatticeSum {
        value,
        radius,
        error: cfg.quad_tol + 4.0 * f64::EPSILON * abs_sum,
    })
}

/// `I_a(z0, w0, s) = ∫_1^∞ θ*_a(t, z0, w0) t^{s-1} dt`, entire in `s`.
pub fn i_integral(
    a: u32,
    z0: Complex64,
    w0: Complex64,
    s: Complex64,
    lattice: &Lattice,
    cfg: &PrecisionConfig,
) -> Result<Complex64> {
    Ok(i_sum(a, z0, w0, s, lattice, cfg)?.value)
}

/// `K*_a(z0, w0, s)` through the incomplete-gamma continuation.
pub fn kstar(q: &EKQuery, cfg: &PrecisionConfig) -> Result<EKResult> {
    let s = numeric::ensure_finite(q.s, "s")?;
    let lattice = &q.lattice;
    let area = lattice.area_param();
    let a = q.a;
    let delta_z = a == 0 && lattice.is_lattice_point(q.z0);
    let delta_w = a == 0 && lattice.is_lattice_point(q.w0);
    let pair = lattice.pairing(q.w0, q.z0);
    let dual_s = Complex64::new((a + 1) as f64, 0.0) - s;

    if delta_w && (s - 1.0).norm() < POLE_DISTANCE {
        // A^sΓ(s)K* = F(s) + 1/(s-1); constant term is (F(1) + c - log A)/A.
        let one = Complex64::new(1.0, 0.0);
        let direct = i_sum(a, q.z0, q.w0, one, lattice, cfg)?;
        let dual = i_sum(a, q.w0, q.z0, Complex64::new(0.0, 0.0), lattice, cfg)?;
        let delta_term = if delta_z { pair } else { Complex64::new(0.0, 0.0) };
        let f1 = direct.value - delta_term + dual.value * pair;
        let value = (f1 + numeric::EULER_GAMMA - area.ln()) / area;
        return Ok(EKResult {
            value,
            is_pole: true,
            pole_residue: Some(Complex64::new(1.0 / area, 0.0)),
            truncation_radius_used: direct.radius.max(dual.radius),
            estimated_error: (direct.error + dual.error) / area,
        });
    }

    let direct = i_sum(a, q.z0, q.w0, s, lattice, cfg)?;
    let dual = i_sum(a, q.w0, q.z0, dual_s, lattice, cfg)?;
    let mut bracket = direct.value + dual.value * pair;
    if delta_w {
        bracket += 1.0 / (s - 1.0);
    }
    let a_pow = (-s * area.ln()).exp();
    let mut value = rgamma(s) * bracket;
    if delta_z {
        // δ/s · 1/Γ(s) = δ/Γ(s+1), regular at s = 0
        value -= pair * rgamma(s + 1.0);
    }
    value *= a_pow;
    let value = numeric::ensure_finite(value, "K*")?;
    let scale = (a_pow * rgamma(s)).norm();
    Ok(EKResult {
        value,
        is_pole: false,
        pole_residue: None,
        truncation_radius_used: direct.radius.max(dual.radius),
        estimated_error: scale * (direct.error + dual.error) + 4.0 * f64::EPSILON * value.norm(),
    })
}

/// `lim_{s→1} (A K*_0(0,0,s) - 1/(s-1)) = I_0(0,0,1) - 1 + I_0(0,0,0) - log A + c`.
pub fn kstar_regularized_at_1(lattice: &Lattice, cfg: &PrecisionConfig) -> Result<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i1 = i_integral(0, zero, zero, one, lattice, cfg)?;
    let i0 = i_integral(0, zero, zero, zero, lattice, cfg)?;
    Ok(i1 - 1.0 + i0 - lattice.area_param().ln() + numeric::euler_constant())
}

/// `A·K*_0(0, z, 1) = I_0(0, z, 1) - 1 + I_0(z, 0, 0)` for `z ∉ Γ`.
pub fn kstar_a0_at_1(z: Complex64, lattice: &Lattice, cfg: &PrecisionConfig) -> Result<Complex64> {
    if lattice.is_lattice_point(z) {
        return Err(Error::Pole(format!(
            "A·K*_0(0, z, 1) has a pole at the lattice point z = {z}"
        )));
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i1 = i_integral(0, zero, z, one, lattice, cfg)?;
    let i0 = i_integral(0, z, zero, zero, lattice, cfg)?;
    Ok(i1 - 1.0 + i0)
}

fn distance_to_gamma_poles(s: Complex64) -> f64 {
    let k = (-s.re).round().max(0.0);
    (s + k).norm().min(s.norm())
}

/// `|A^sΓ(s)K*_a(z0,w0,s) - ⟨w0,z0⟩ A^{s'}Γ(s')K*_a(w0,z0,s')|` with `s' = a+1-s`.
pub fn functional_equation_defect(q: &EKQuery, cfg: &PrecisionConfig) -> Result<f64> {
    let lattice = &q.lattice;
    let s = q.s;
    let dual_s = Complex64::new((q.a + 1) as f64, 0.0) - s;
    let one = Complex64::new(1.0, 0.0);
    let pole_at_one = q.a == 0
        && (lattice.is_lattice_point(q.w0) || lattice.is_lattice_point(q.z0));
    for v in [s, dual_s] {
        let near = distance_to_gamma_poles(v) < DEFECT_POLE_DISTANCE
            || (pole_at_one && (v - one).norm() < DEFECT_POLE_DISTANCE);
        if near {
            return Err(Error::Pole(format!(
                "functional equation evaluated within {DEFECT_POLE_DISTANCE} of a pole (s = {s})"
            )));
        }
    }
    let area = lattice.area_param();
    let completed = |a: u32, z0, w0, s: Complex64| -> Result<Complex64> {
        let r = kstar(&EKQuery::new(a, z0, w0, s, lattice), cfg)?;
        Ok((s * area.ln()).exp() * numeric::gamma(s)? * r.value)
    };
    let lhs = completed(q.a, q.z0, q.w0, s)?;
    let rhs = lattice.pairing(q.w0, q.z0) * completed(q.a, q.w0, q.z0, dual_s)?;
    Ok((lhs - rhs).norm())
}

/// `K*_1(0, w, 1)`, the limit of `K_1(z, w, 1) - 1/z` as `z → 0`.
pub fn k1_limit_at_zero(w: Complex64, lattice: &Lattice, cfg: &PrecisionConfig) -> Result<Complex64> {
    if lattice.is_lattice_point(w) {
        return Err(Error::Pole(format!("K*_1(0, w, 1) needs w off the lattice, got {w}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    let q = EKQuery::new(1, zero, w, Complex64::new(1.0, 0.0), lattice);
    Ok(kstar(&q, cfg)?.value)
}

/// `Σ'_γ γ^{-k}` for `k >= 3`, i.e. `K*_k(0, 0, k)`. Zero for odd `k`.
pub fn eisenstein_series(lattice: &Lattice, k: u32, cfg: &PrecisionConfig) -> Result<Complex64> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "eisenstein_series needs k >= 3 for absolute convergence, got {k}"
        )));
    }
    if k % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let zero = Complex64::new(0.0, 0.0);
    let q = EKQuery::new(k, zero, zero, Complex64::new(k as f64, 0.0), lattice);
    Ok(kstar(&q, cfg)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::default()
    }

    #[test]
    fn theta_star_basic_symmetries() {
        let l = Lattice::new(c(1.0, 0.0), c(0.3, 1.2)).unwrap();
        let v = theta_star(0, 1.5, c(0.0, 0.0), c(0.0, 0.0), &l, &cfg()).unwrap();
        assert!(v.re > 0.0 && v.im.abs() < 1e-15);
        let odd = theta_star(3, 1.0, c(0.0, 0.0), c(0.0, 0.0), &l, &cfg()).unwrap();
        assert!(odd.norm() < 1e-14);
        assert!(theta_star(0, 0.5, c(0.0, 0.0), c(0.0, 0.0), &l, &cfg()).is_err());
    }

    #[test]
    fn theta_star_matches_brute_force() {
        let l = Lattice::gaussian();
        let mut brute = 0.0;
        for m in -40i64..=40 {
            for n in -40i64..=40 {
                let r2 = (m * m + n * n) as f64;
                if r2 > 0.0 && r2 <= 1600.0 {
                    brute += (-r2 * std::f64::consts::PI).exp();
                }
            }
        }
        let v = theta_star(0, 1.0, c(0.0, 0.0), c(0.0, 0.0), &l, &cfg()).unwrap();
        assert!((v.re - brute).abs() < 1e-12);
    }

    #[test]
    fn odd_weight_vanishes_at_origin() {
        let l = Lattice::gaussian();
        for &s in &[c(3.0, 0.0), c(0.4, 0.3)] {
            let r = kstar(&EKQuery::new(1, c(0.0, 0.0), c(0.0, 0.0), s, &l), &cfg()).unwrap();
            assert!(r.value.norm() < 1e-10);
        }
    }

    #[test]
    fn pole_is_reported() {
        let l = Lattice::gaussian();
        let r = kstar(&EKQuery::new(0, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), &l), &cfg()).unwrap();
        assert!(r.is_pole);
        let res = r.pole_residue.unwrap();
        assert!((res.re - 1.0 / l.area_param()).abs() < 1e-15);
        // constant term agrees with the closed-form regularized value
        let reg = kstar_regularized_at_1(&l, &cfg()).unwrap();
        assert!((r.value * l.area_param() - reg).norm() < 1e-12);
    }

    #[test]
    fn no_pole_at_zero_for_lattice_z0() {
        // the 1/s term cancels against Γ(s): K*_0(0, w0, 0) = -⟨w0, 0⟩ = -1
        let l = Lattice::gaussian();
        let r = kstar(&EKQuery::new(0, c(0.0, 0.0), c(0.3, 0.2), c(0.0, 0.0), &l), &cfg()).unwrap();
        assert!(!r.is_pole);
        assert!((r.value + 1.0).norm() < 1e-14);
    }

    #[test]
    fn self_dual_defect() {
        let l = Lattice::gaussian();
        let z = c(0.31, 0.17);
        let q = EKQuery::new(0, z, z, c(0.5, 0.0), &l);
        assert!(functional_equation_defect(&q, &cfg()).unwrap() <= 1e-10);
    }

    #[test]
    fn defect_refuses_pole_neighbourhood() {
        let l = Lattice::gaussian();
        let q = EKQuery::new(0, c(0.0, 0.0), c(0.2, 0.0), c(1e-4, 0.0), &l);
        assert!(matches!(functional_equation_defect(&q, &cfg()), Err(Error::Pole(_))));
    }

    #[test]
    fn lattice_argument_errors() {
        let l = Lattice::gaussian();
        assert!(kstar_a0_at_1(c(1.0, 1.0), &l, &cfg()).is_err());
        assert!(k1_limit_at_zero(c(0.0, 1.0), &l, &cfg()).is_err());
    }
}
