//! Weierstrass `σ, ζ, ℘, ℘'`, quasi-periods, the reduced theta function
//! `θ(z) = exp(-e*_{0,2} z²/2) σ(z)` and the lattice invariants.
//!
//! Every evaluation reduces `z` to `z_r = z - γ` with `γ` the nearest lattice
//! point and then works on a disc of radius `R = 5|b2|` (`b2` the longer
//! reduced basis vector): lattice points inside the disc are summed directly,
//! points outside enter through the tails `T_{2j} = Σ_{|γ|>R} γ^{-2j}`,
//! obtained as `G_{2j}` minus the inner partial sum.

use std::time::Instant;

use num_complex::Complex64;

use crate::eklerch::eisenstein_series;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::numeric::PrecisionConfig;
use crate::report::{complex_json, params, VerificationReport};

/// Largest `j` with `G_{2j}` entering the tail expansions.
pub const SERIES_ORDER: usize = 18;

const LOCAL_RADIUS_FACTOR: f64 = 5.0;

/// Tolerance of the internal consistency checks run by [`build_context`].
pub const BUILD_TOLERANCE: f64 = 1e-8;

/// Default tolerance of [`addition_identity_check`].
pub const ADDITION_TOLERANCE: f64 = 1e-9;

/// Which sign rule the measured `ε(γ)` follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignConvention {
    /// `ε = +1` on `2Γ`, `-1` elsewhere (the classical σ law).
    Classical,
    /// `ε = -1` on `2Γ`, `+1` elsewhere.
    Inverted,
    /// Anything else; never observed for a consistent context.
    Other,
}

/// Cached invariants of a lattice.
#[derive(Debug, Clone)]
pub struct ThetaContext {
    pub lattice: Lattice,
    pub eta1: Complex64,
    pub eta2: Complex64,
    pub e_star_02: Complex64,
    pub g2: Complex64,
    pub g3: Complex64,
    pub delta: Complex64,
    pub delta_prime: Complex64,
    /// `℘(ω1/2), ℘(ω2/2), ℘((ω1+ω2)/2)`.
    pub half_period_values: [Complex64; 3],
    /// `ε` on the classes of `Γ/2Γ`, indexed by reduced coordinates mod 2.
    pub epsilon_classes: [[f64; 2]; 2],
    pub cfg: PrecisionConfig,
    basis: [Complex64; 2],
    basis_eta: [Complex64; 2],
    local: Vec<Complex64>,
    // tails[j] = T_{2j}; entries 0 and 1 unused
    tails: Vec<Complex64>,
}

/// [`build_context_with`] at the default precision.
pub fn build_context(lattice: &Lattice) -> Result<ThetaContext> {
    build_context_with(lattice, &PrecisionConfig::default())
}

pub fn build_context_with(lattice: &Lattice, cfg: &PrecisionConfig) -> Result<ThetaContext> {
    cfg.validate()?;
    let basis = lattice.reduced_basis();
    let radius = LOCAL_RADIUS_FACTOR * basis[1].norm();
    let local = lattice.points_in_disc(radius, Some(Complex64::new(0.0, 0.0)));
    let local: Vec<Complex64> = local.into_iter().filter(|g| g.norm_sqr() > 0.0).collect();

    let mut tails = vec![Complex64::new(0.0, 0.0); SERIES_ORDER + 1];
    let mut g = vec![Complex64::new(0.0, 0.0); SERIES_ORDER + 1];
    for j in 2..=SERIES_ORDER {
        let k = 2 * j as i32;
        g[j] = eisenstein_series(lattice, k as u32, cfg)?;
        let inner: Complex64 = local.iter().map(|&p| p.powi(-k)).sum();
        tails[j] = g[j] - inner;
    }
    let g2 = 60.0 * g[2];
    let g3 = 140.0 * g[3];

    let mut ctx = ThetaContext {
        lattice: lattice.clone(),
        eta1: Complex64::new(0.0, 0.0),
        eta2: Complex64::new(0.0, 0.0),
        e_star_02: Complex64::new(0.0, 0.0),
        g2,
        g3,
        delta: g2 * g2 * g2 - 27.0 * g3 * g3,
        delta_prime: Complex64::new(0.0, 0.0),
        half_period_values: [Complex64::new(0.0, 0.0); 3],
        epsilon_classes: [[1.0; 2]; 2],
        cfg: *cfg,
        basis,
        basis_eta: [Complex64::new(0.0, 0.0); 2],
        local,
        tails,
    };

    // η(b) = 2ζ(b/2) on the reduced basis, then ℤ-linearity for (ω1, ω2)
    ctx.basis_eta = [2.0 * ctx.zeta_local(basis[0] / 2.0), 2.0 * ctx.zeta_local(basis[1] / 2.0)];
    let eta_of = |ctx: &ThetaContext, w: Complex64| {
        let (p, q) = ctx.basis_coordinates(w);
        ctx.basis_eta[0] * p as f64 + ctx.basis_eta[1] * q as f64
    };
    ctx.eta1 = eta_of(&ctx, lattice.omega1());
    ctx.eta2 = eta_of(&ctx, lattice.omega2());

    let area = lattice.area_param();
    let (w1, w2) = (lattice.omega1(), lattice.omega2());
    let legendre = ctx.eta1 * w2 - ctx.eta2 * w1 - Complex64::new(0.0, std::f64::consts::TAU);
    if legendre.norm() > BUILD_TOLERANCE {
        return Err(Error::Consistency(format!("Legendre relation off by {:e}", legendre.norm())));
    }
    let e_star_1 = (ctx.eta1 - w1.conj() / area) / w1;
    let e_star_2 = (ctx.eta2 - w2.conj() / area) / w2;
    if (e_star_1 - e_star_2).norm() > BUILD_TOLERANCE * e_star_1.norm().max(1.0) {
        return Err(Error::Consistency(format!(
            "e*_(0,2) from the two generators disagree: {e_star_1} vs {e_star_2}"
        )));
    }
    ctx.e_star_02 = e_star_1;

    ctx.half_period_values = [
        wp(w1 / 2.0, &ctx)?,
        wp(w2 / 2.0, &ctx)?,
        wp((w1 + w2) / 2.0, &ctx)?,
    ];
    let [e1, e2, e3] = ctx.half_period_values;
    let v = (e1 - e2) * (e2 - e3) * (e3 - e1);
    ctx.delta_prime = v * v;

    ctx.epsilon_classes = ctx.measure_epsilon()?;
    Ok(ctx)
}

impl ThetaContext {
    /// Integer coordinates of a lattice point in the reduced basis.
    fn basis_coordinates(&self, g: Complex64) -> (i64, i64) {
        let [b1, b2] = self.basis;
        let det = (b1.conj() * b2).im;
        let x = (g.conj() * b2).im / det;
        let y = (b1.conj() * g).im / det;
        (x.round() as i64, y.round() as i64)
    }

    fn eta_basis(&self, g: Complex64) -> Complex64 {
        let (p, q) = self.basis_coordinates(g);
        self.basis_eta[0] * p as f64 + self.basis_eta[1] * q as f64
    }

    /// Splits `z = z_r + γ` with `γ` the nearest lattice point.
    fn reduce(&self, z: Complex64) -> (Complex64, Complex64) {
        let g = self.lattice.nearest_point(z).value;
        (z - g, g)
    }

    fn zeta_local(&self, z: Complex64) -> Complex64 {
        let mut sum = 1.0 / z;
        for &g in &self.local {
            sum += 1.0 / (z - g) + 1.0 / g + z / (g * g);
        }
        let z2 = z * z;
        let mut zp = z * z2;
        for j in 2..=SERIES_ORDER {
            sum -= self.tails[j] * zp;
            zp *= z2;
        }
        sum
    }

    fn wp_local(&self, z: Complex64) -> Complex64 {
        let mut sum = 1.0 / (z * z);
        for &g in &self.local {
            let d = z - g;
            sum += 1.0 / (d * d) - 1.0 / (g * g);
        }
        let z2 = z * z;
        let mut zp = z2;
        for j in 1..SERIES_ORDER {
            sum += (2 * j + 1) as f64 * self.tails[j + 1] * zp;
            zp *= z2;
        }
        sum
    }

    fn wp_prime_local(&self, z: Complex64) -> Complex64 {
        let mut sum = -2.0 / (z * z * z);
        for &g in &self.local {
            let d = z - g;
            sum -= 2.0 / (d * d * d);
        }
        let z2 = z * z;
        let mut zp = z;
        for j in 1..SERIES_ORDER {
            sum += ((2 * j + 1) * 2 * j) as f64 * self.tails[j + 1] * zp;
            zp *= z2;
        }
        sum
    }

    fn sigma_local(&self, z: Complex64) -> Complex64 {
        let mut prod = z;
        let mut exponent = Complex64::new(0.0, 0.0);
        for &g in &self.local {
            let u = z / g;
            prod *= 1.0 - u;
            exponent += u + u * u / 2.0;
        }
        let z2 = z * z;
        let mut zp = z2 * z2;
        for j in 2..=SERIES_ORDER {
            exponent -= self.tails[j] * zp / (2 * j) as f64;
            zp *= z2;
        }
        prod * exponent.exp()
    }

    fn theta_local(&self, z: Complex64) -> Complex64 {
        (-self.e_star_02 * z * z / 2.0).exp() * self.sigma_local(z)
    }

    fn epsilon_basis(&self, g: Complex64) -> f64 {
        let (p, q) = self.basis_coordinates(g);
        self.epsilon_classes[p.rem_euclid(2) as usize][q.rem_euclid(2) as usize]
    }

    /// Measures `σ(z+γ) / (σ(z) exp(η(γ)(z+γ/2)))` on one representative of
    /// each class of `Γ/2Γ`, at points where both sides are evaluated directly.
    fn measure_epsilon(&self) -> Result<[[f64; 2]; 2]> {
        let [b1, b2] = self.basis;
        let offset = 0.0731 * b1 + 0.0519 * b2;
        let mut out = [[0.0; 2]; 2];
        for (p, q, g) in [(0, 0, 2.0 * b1), (1, 0, b1), (0, 1, b2), (1, 1, b1 + b2)] {
            let z = offset - g / 2.0;
            let ratio = self.sigma_local(z + g)
                / (self.sigma_local(z) * (self.eta_basis(g) * (z + g / 2.0)).exp());
            let sign = if ratio.re >= 0.0 { 1.0 } else { -1.0 };
            if (ratio - sign).norm() > 1e-6 {
                return Err(Error::Consistency(format!(
                    "σ quasi-periodicity ratio {ratio} is not a sign"
                )));
            }
            out[p][q] = sign;
        }
        Ok(out)
    }

    /// The sign rule the measured `ε` follows.
    pub fn sign_convention(&self) -> SignConvention {
        let e = self.epsilon_classes;
        let others = [e[1][0], e[0][1], e[1][1]];
        if e[0][0] == 1.0 && others.iter().all(|&s| s == -1.0) {
            SignConvention::Classical
        } else if e[0][0] == -1.0 && others.iter().all(|&s| s == 1.0) {
            SignConvention::Inverted
        } else {
            SignConvention::Other
        }
    }

    /// `η1 ω2 - η2 ω1 - 2πi`.
    pub fn legendre_defect(&self) -> Complex64 {
        self.eta1 * self.lattice.omega2() - self.eta2 * self.lattice.omega1()
            - Complex64::new(0.0, std::f64::consts::TAU)
    }

    /// Radius of the disc whose lattice points are summed directly.
    pub fn local_radius(&self) -> f64 {
        LOCAL_RADIUS_FACTOR * self.basis[1].norm()
    }
}

fn pole_check(z: Complex64, ctx: &ThetaContext, what: &str) -> Result<()> {
    if ctx.lattice.is_lattice_point(z) {
        Err(Error::Pole(format!("{what} has a pole at the lattice point {z}")))
    } else {
        Ok(())
    }
}

/// Weierstrass `σ(z)`.
pub fn sigma(z: Complex64, ctx: &ThetaContext) -> Complex64 {
    let (zr, g) = ctx.reduce(z);
    if g == Complex64::new(0.0, 0.0) {
        return ctx.sigma_local(zr);
    }
    ctx.epsilon_basis(g) * ctx.sigma_local(zr) * (ctx.eta_basis(g) * (zr + g / 2.0)).exp()
}

/// Weierstrass `ζ(z) = σ'(z)/σ(z)`.
pub fn zeta(z: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    pole_check(z, ctx, "ζ")?;
    let (zr, g) = ctx.reduce(z);
    Ok(ctx.zeta_local(zr) + ctx.eta_basis(g))
}

/// Weierstrass `℘(z)`.
pub fn wp(z: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    pole_check(z, ctx, "℘")?;
    Ok(ctx.wp_local(ctx.reduce(z).0))
}

/// `℘'(z)`.
pub fn wp_prime(z: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    pole_check(z, ctx, "℘'")?;
    Ok(ctx.wp_prime_local(ctx.reduce(z).0))
}

/// Quasi-period `η(γ)` with `ζ(z + γ) = ζ(z) + η(γ)`.
pub fn quasi_period(gamma: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    let (m, n) = ctx
        .lattice
        .lattice_coordinates(gamma)
        .ok_or_else(|| Error::NotALatticePoint(format!("{gamma}")))?;
    Ok(ctx.eta1 * m as f64 + ctx.eta2 * n as f64)
}

/// The sign `ε(γ)` in `σ(z+γ) = ε(γ) σ(z) exp(η(γ)(z + γ/2))`.
pub fn epsilon(gamma: Complex64, ctx: &ThetaContext) -> Result<f64> {
    if !ctx.lattice.is_lattice_point(gamma) {
        return Err(Error::NotALatticePoint(format!("{gamma}")));
    }
    Ok(ctx.epsilon_basis(ctx.lattice.nearest_point(gamma).value))
}

/// Reduced theta `θ(z) = exp(-e*_{0,2} z²/2) σ(z)`, with `θ'(0) = 1`.
pub fn theta(z: Complex64, ctx: &ThetaContext) -> Complex64 {
    let (zr, g) = ctx.reduce(z);
    let base = ctx.theta_local(zr);
    if g == Complex64::new(0.0, 0.0) {
        return base;
    }
    let area = ctx.lattice.area_param();
    ctx.epsilon_basis(g) * base * (zr * g.conj() / area + g.norm_sqr() / (2.0 * area)).exp()
}

/// `log|θ(z)|`, free of overflow for large `|z|`.
pub fn log_abs_theta(z: Complex64, ctx: &ThetaContext) -> Result<f64> {
    pole_check(z, ctx, "log|θ|")?;
    let (zr, g) = ctx.reduce(z);
    let area = ctx.lattice.area_param();
    Ok(ctx.theta_local(zr).norm().ln() + (zr * g.conj()).re / area + g.norm_sqr() / (2.0 * area))
}

/// `θ'(z)/θ(z) = ζ(z) - e*_{0,2} z`.
pub fn theta_log_derivative(z: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    Ok(zeta(z, ctx)? - ctx.e_star_02 * z)
}

/// `θ_{z0}(z) = θ(z + z0) exp(-z z̄0/A - z0 z̄0/(2A))`.
pub fn theta_translate(z: Complex64, z0: Complex64, ctx: &ThetaContext) -> Complex64 {
    let area = ctx.lattice.area_param();
    theta(z + z0, ctx) * (-z * z0.conj() / area - z0.norm_sqr() / (2.0 * area)).exp()
}

/// Kronecker theta `Θ(z, w) = θ(z+w) / (θ(z) θ(w))`.
///
/// A pole error is raised whenever `z` or `w` is a lattice point, even if
/// `z + w` is one as well.
pub fn kronecker_theta(z: Complex64, w: Complex64, ctx: &ThetaContext) -> Result<Complex64> {
    pole_check(z, ctx, "Θ(z, w) in z")?;
    pole_check(w, ctx, "Θ(z, w) in w")?;
    Ok(theta(z + w, ctx) / (theta(z, ctx) * theta(w, ctx)))
}

/// Compares `θ(z+w)θ(z-w)/(θ(z)²θ(w)²)` with `℘(w) - ℘(z)`.
pub fn addition_identity_check(z: Complex64, w: Complex64, ctx: &ThetaContext) -> Result<VerificationReport> {
    let start = Instant::now();
    for (v, what) in [(z, "z"), (w, "w"), (z + w, "z+w"), (z - w, "z-w")] {
        if ctx.lattice.is_lattice_point(v) {
            return Err(Error::Pole(format!("addition identity needs {what} off the lattice")));
        }
    }
    let tz = theta(z, ctx);
    let tw = theta(w, ctx);
    let lhs = theta(z + w, ctx) * theta(z - w, ctx) / (tz * tz * tw * tw);
    let rhs = wp(w, ctx)? - wp(z, ctx)?;
    Ok(VerificationReport::new(
        "addition-identity",
        Some(&ctx.lattice),
        params([("z", complex_json(z)), ("w", complex_json(w))]),
        lhs,
        rhs,
        ADDITION_TOLERANCE,
    )
    .timed(start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gaussian_invariants() {
        let ctx = build_context(&Lattice::gaussian()).unwrap();
        assert!(ctx.e_star_02.norm() < 1e-12);
        assert!(ctx.g3.norm() < 1e-10);
        assert!((ctx.eta1 - PI).norm() < 1e-10);
        assert!(ctx.legendre_defect().norm() < 1e-10);
    }

    #[test]
    fn eisenstein_lattice_has_g2_zero() {
        let ctx = build_context(&Lattice::eisenstein()).unwrap();
        assert!(ctx.g2.norm() < 1e-10 * ctx.g3.norm().max(1.0));
    }

    #[test]
    fn delta_relations() {
        let l = Lattice::new(c(1.0, 0.0), c(0.3, 1.2)).unwrap();
        let ctx = build_context(&l).unwrap();
        assert!((ctx.delta - 16.0 * ctx.delta_prime).norm() < 1e-10 * ctx.delta.norm());
        let [e1, e2, e3] = ctx.half_period_values;
        assert!((e1 + e2 + e3).norm() < 1e-10);
    }

    #[test]
    fn half_periods_are_critical() {
        let ctx = build_context(&Lattice::gaussian()).unwrap();
        for h in [c(0.5, 0.0), c(0.0, 0.5), c(0.5, 0.5)] {
            assert!(wp_prime(h, &ctx).unwrap().norm() < 1e-10);
        }
    }

    #[test]
    fn sign_rule_is_classical() {
        for l in [Lattice::gaussian(), Lattice::eisenstein()] {
            let ctx = build_context(&l).unwrap();
            assert_eq!(ctx.sign_convention(), SignConvention::Classical);
        }
    }

    #[test]
    fn poles_are_reported() {
        let ctx = build_context(&Lattice::gaussian()).unwrap();
        assert!(matches!(wp(c(1.0, 1.0), &ctx), Err(Error::Pole(_))));
        assert!(matches!(kronecker_theta(c(0.0, 0.0), c(0.3, 0.1), &ctx), Err(Error::Pole(_))));
        assert!(matches!(quasi_period(c(0.5, 0.0), &ctx), Err(Error::NotALatticePoint(_))));
    }

    #[test]
    fn theta_is_odd_with_unit_derivative() {
        let ctx = build_context(&Lattice::new(c(1.0, 0.0), c(0.3, 1.2)).unwrap()).unwrap();
        assert_eq!(theta(c(0.0, 0.0), &ctx), c(0.0, 0.0));
        let h = 1e-6;
        let d = (theta(c(h, 0.0), &ctx) - theta(c(-h, 0.0), &ctx)) / (2.0 * h);
        assert!((d - 1.0).norm() < 1e-7);
        let z = c(0.37, -0.81);
        assert!((theta(-z, &ctx) + theta(z, &ctx)).norm() < 1e-12 * theta(z, &ctx).norm().max(1.0));
    }

    #[test]
    fn addition_identity_antisymmetry() {
        let ctx = build_context(&Lattice::gaussian()).unwrap();
        let (z, w) = (c(0.23, 0.11), c(0.41, -0.07));
        let r = addition_identity_check(z, w, &ctx).unwrap();
        let s = addition_identity_check(w, z, &ctx).unwrap();
        assert!(r.pass && s.pass);
        assert!((r.lhs + s.lhs).norm() < 1e-9);
        assert!(addition_identity_check(z, z, &ctx).is_err());
    }
}
