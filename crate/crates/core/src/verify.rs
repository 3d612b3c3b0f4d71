//! Checks of the Kronecker limit formulas, the distribution relations and
//! the theta identities, each producing a [`VerificationReport`].

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::eklerch::{self, kstar_a0_at_1, kstar_regularized_at_1, EKQuery};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::numeric::{euler_constant, PrecisionConfig};
use crate::report::{complex_json, params, VerificationReport};
use crate::weierstrass::{self, build_context_with, ThetaContext};

/// Seed of every random point set drawn by the harness.
pub const DEFAULT_SEED: u64 = 0xEC_2024;

/// Tolerance for identities between two single evaluations.
pub const SINGLE_TOLERANCE: f64 = 1e-8;
/// Tolerance for sums over many evaluations.
pub const SUM_TOLERANCE: f64 = 1e-7;
/// Relative tolerance for eighth-power theta products.
pub const PRODUCT_TOLERANCE: f64 = 1e-7;
/// Kronecker-theorem tolerance once an argument is close to a lattice point.
pub const NEAR_POLE_TOLERANCE: f64 = 1e-5;
/// Relative tolerance of `Δ = 16Δ'`.
pub const DELTA_TOLERANCE: f64 = 1e-10;

/// Points closer than this multiple of `√A` to an excluded point are rejected.
pub const REJECTION_RADIUS: f64 = 0.05;

/// Verification state for one lattice: the theta context, the precision
/// configuration and the seed echoed into every report.
#[derive(Debug, Clone)]
pub struct Verifier {
    pub ctx: ThetaContext,
    pub cfg: PrecisionConfig,
    pub seed: u64,
}

fn lattice_distance(l: &Lattice, z: Complex64) -> f64 {
    l.distance_to_lattice(z) / l.area_param().sqrt()
}

/// `Σ log` of complex values as `(log|v|, arg)`, summed with multiplicity.
fn log_sum(terms: &[(f64, Complex64)]) -> Complex64 {
    terms
        .iter()
        .map(|&(k, v)| k * Complex64::new(v.norm().ln(), v.arg()))
        .sum()
}

/// Moves the imaginary part of `v` by multiples of `2π` to sit closest to
/// that of `reference`.
fn wrap_near(v: Complex64, reference: Complex64) -> Complex64 {
    let turns = ((reference.im - v.im) / TAU).round();
    Complex64::new(v.re, v.im + turns * TAU)
}

fn wrap_principal(v: Complex64) -> Complex64 {
    wrap_near(v, Complex64::new(v.re, 0.0))
}

impl Verifier {
    pub fn new(lattice: &Lattice, cfg: &PrecisionConfig) -> Result<Self> {
        Ok(Verifier {
            ctx: build_context_with(lattice, cfg)?,
            cfg: *cfg,
            seed: DEFAULT_SEED,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.ctx.lattice
    }

    fn area(&self) -> f64 {
        self.ctx.lattice.area_param()
    }

    fn params<I: IntoIterator<Item = (&'static str, Value)>>(&self, items: I) -> Map<String, Value> {
        let mut p = params(items);
        p.insert("seed".into(), json!(self.seed));
        p
    }

    fn log_abs_delta(&self) -> f64 {
        self.ctx.delta.norm().ln()
    }

    /// `A·K*_0(0,z,1)` against `-log|θ(z)|² + |z|²/A - (1/12) log|Δ|²`.
    pub fn second_limit(&self, z: Complex64) -> Result<VerificationReport> {
        let start = Instant::now();
        let lhs = kstar_a0_at_1(z, self.lattice(), &self.cfg)?;
        let rhs = -2.0 * weierstrass::log_abs_theta(z, &self.ctx)? + z.norm_sqr() / self.area()
            - self.log_abs_delta() / 6.0;
        Ok(VerificationReport::new(
            "second-limit",
            Some(self.lattice()),
            self.params([("z", complex_json(z))]),
            lhs,
            Complex64::new(rhs, 0.0),
            SINGLE_TOLERANCE,
        )
        .timed(start))
    }

    /// `lim_{s→1}(A K*_0(0,0,s) - 1/(s-1))` against `-(1/12) log|Δ|² - 2 log A + 2c`.
    pub fn first_limit(&self) -> Result<VerificationReport> {
        let start = Instant::now();
        let lhs = kstar_regularized_at_1(self.lattice(), &self.cfg)?;
        let rhs = -self.log_abs_delta() / 6.0 - 2.0 * self.area().ln() + 2.0 * euler_constant();
        Ok(VerificationReport::new(
            "first-limit",
            Some(self.lattice()),
            self.params([]),
            lhs,
            Complex64::new(rhs, 0.0),
            SINGLE_TOLERANCE,
        )
        .timed(start))
    }

    /// `Σ_{z_n ≠ 0} K*_0(0, z_n, 1)` against `-2 log n / A`.
    pub fn distribution(&self, n: i64) -> Result<VerificationReport> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("distribution needs n >= 2, got {n}")));
        }
        let start = Instant::now();
        let mut lhs = Complex64::new(0.0, 0.0);
        for tp in self.lattice().torsion_points(n, false)? {
            lhs += kstar_a0_at_1(tp.value, self.lattice(), &self.cfg)?;
        }
        lhs /= self.area();
        let rhs = -2.0 * (n as f64).ln() / self.area();
        Ok(VerificationReport::new(
            "distribution",
            Some(self.lattice()),
            self.params([("n", json!(n))]),
            lhs,
            Complex64::new(rhs, 0.0),
            SUM_TOLERANCE,
        )
        .timed(start))
    }

    /// `(1/4) log|Δ'|²` against `-Σ_{z_2 ≠ 0}(log|θ(z_2)|² - |z_2|²/A)`,
    /// additionally requiring `Δ = 16Δ'`.
    pub fn prop_c(&self) -> Result<VerificationReport> {
        let start = Instant::now();
        let lhs = self.ctx.delta_prime.norm().ln() / 2.0;
        let mut rhs = 0.0;
        for tp in self.lattice().torsion_points(2, false)? {
            rhs -= 2.0 * weierstrass::log_abs_theta(tp.value, &self.ctx)? - tp.value.norm_sqr() / self.area();
        }
        let delta_error = self.delta_relation_error();
        Ok(VerificationReport::new(
            "prop-c",
            Some(self.lattice()),
            self.params([("delta_relation_error", json!(delta_error))]),
            Complex64::new(lhs, 0.0),
            Complex64::new(rhs, 0.0),
            SINGLE_TOLERANCE,
        )
        .require(delta_error <= DELTA_TOLERANCE)
        .timed(start))
    }

    fn delta_relation_error(&self) -> f64 {
        (self.ctx.delta - 16.0 * self.ctx.delta_prime).norm() / self.ctx.delta.norm()
    }

    /// `Δ / Δ'` against 16, as a relative error.
    pub fn delta_relation(&self) -> VerificationReport {
        let start = Instant::now();
        VerificationReport::new(
            "delta-16-delta-prime",
            Some(self.lattice()),
            self.params([
                ("g2", complex_json(self.ctx.g2)),
                ("g3", complex_json(self.ctx.g3)),
                ("delta", complex_json(self.ctx.delta)),
                ("delta_prime", complex_json(self.ctx.delta_prime)),
            ]),
            self.ctx.delta / self.ctx.delta_prime,
            Complex64::new(16.0, 0.0),
            16.0 * DELTA_TOLERANCE,
        )
        .timed(start)
    }

    /// `Θ(z, w)` against `exp(z w̄/A) K*_1(z, w, 1)`.
    pub fn kronecker(&self, z: Complex64, w: Complex64) -> Result<VerificationReport> {
        let start = Instant::now();
        let l = self.lattice();
        for (v, what) in [(z, "z"), (w, "w"), (z + w, "z+w")] {
            if l.is_lattice_point(v) {
                return Err(Error::Pole(format!("Kronecker theta needs {what} off the lattice")));
            }
        }
        let near_pole = [z, w, z + w]
            .iter()
            .any(|&v| lattice_distance(l, v) < REJECTION_RADIUS);
        let lhs = weierstrass::kronecker_theta(z, w, &self.ctx)?;
        let k1 = eklerch::kstar(&EKQuery::new(1, z, w, Complex64::new(1.0, 0.0), l), &self.cfg)?;
        let rhs = (z * w.conj() / self.area()).exp() * k1.value;
        let tolerance = if near_pole { NEAR_POLE_TOLERANCE } else { SINGLE_TOLERANCE };
        Ok(VerificationReport::new(
            "kronecker",
            Some(l),
            self.params([
                ("z", complex_json(z)),
                ("w", complex_json(w)),
                ("near_pole", json!(near_pole)),
            ]),
            lhs,
            rhs,
            tolerance,
        )
        .timed(start))
    }

    /// `θ(2z)⁸` against `Δ² θ(z)⁸ Π_{z_2≠0} θ_{z_2}(z)⁸`, compared as
    /// `(log|·|, arg)` so that the error is relative.
    pub fn theta_distribution_2(&self, z: Complex64) -> Result<VerificationReport> {
        let start = Instant::now();
        let l = self.lattice();
        if l.is_lattice_point(2.0 * z) {
            return Err(Error::Pole(format!("theta distribution needs 2z off the lattice, z = {z}")));
        }
        let ctx = &self.ctx;
        let lhs = wrap_principal(log_sum(&[(8.0, weierstrass::theta(2.0 * z, ctx))]));
        let mut terms = vec![(2.0, ctx.delta), (8.0, weierstrass::theta(z, ctx))];
        for tp in l.torsion_points(2, false)? {
            terms.push((8.0, weierstrass::theta_translate(z, tp.value, ctx)));
        }
        let rhs = wrap_near(log_sum(&terms), lhs);
        Ok(VerificationReport::new(
            "theta-dist-2",
            Some(l),
            self.params([("z", complex_json(z))]),
            lhs,
            rhs,
            PRODUCT_TOLERANCE,
        )
        .timed(start))
    }

    /// `Π_{z_2≠0} θ_{z_2}(0)⁸` against `Δ'^{-2}`, as `(log|·|, arg)`.
    pub fn theta_distribution_constant(&self) -> Result<VerificationReport> {
        let start = Instant::now();
        let ctx = &self.ctx;
        let terms: Vec<(f64, Complex64)> = self
            .lattice()
            .torsion_points(2, false)?
            .iter()
            .map(|tp| (8.0, weierstrass::theta_translate(Complex64::new(0.0, 0.0), tp.value, ctx)))
            .collect();
        let lhs = wrap_principal(log_sum(&terms));
        let rhs = wrap_near(log_sum(&[(-2.0, ctx.delta_prime)]), lhs);
        Ok(VerificationReport::new(
            "theta-dist-2-constant",
            Some(self.lattice()),
            self.params([]),
            lhs,
            rhs,
            SINGLE_TOLERANCE,
        )
        .timed(start))
    }

    /// The constant `C` of the theta/`K*` comparison obtained from the
    /// `n`-torsion, compared with `-(1/12) log|Δ|²`.
    pub fn constant_c(&self, n: i64) -> Result<VerificationReport> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("constant_c needs n >= 2, got {n}")));
        }
        let start = Instant::now();
        let mut sum = 0.0;
        for tp in self.lattice().torsion_points(n, false)? {
            sum += 2.0 * weierstrass::log_abs_theta(tp.value, &self.ctx)? - tp.value.norm_sqr() / self.area();
        }
        let lhs = (sum - 2.0 * (n as f64).ln()) / (n * n - 1) as f64;
        let rhs = -self.log_abs_delta() / 6.0;
        Ok(VerificationReport::new(
            "constant-c",
            Some(self.lattice()),
            self.params([("n", json!(n))]),
            Complex64::new(lhs, 0.0),
            Complex64::new(rhs, 0.0),
            SUM_TOLERANCE,
        )
        .timed(start))
    }

    /// `count` points uniform in the fundamental parallelogram, at distance
    /// at least `0.05√A` from every point of `(1/n)Γ` for `n` in `avoid`
    /// (the lattice itself is always avoided).
    pub fn random_points(&self, count: usize, avoid: &[i64], stream: u64) -> Vec<Complex64> {
        random_points(self.lattice(), count, avoid, self.seed, stream)
    }

    /// Pairs `(z, w)` with `z, w, z + w` away from the lattice.
    pub fn random_pairs(&self, count: usize, stream: u64) -> Vec<(Complex64, Complex64)> {
        let l = self.lattice();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let z = sample(l, &mut rng);
            let w = sample(l, &mut rng);
            if [z, w, z + w].iter().all(|&v| lattice_distance(l, v) >= REJECTION_RADIUS) {
                out.push((z, w));
            }
        }
        out
    }

    /// The standard suite in fixed order: first limit, second limit at
    /// `count` random points, distribution for `n = 2, 3, 5`, the `Δ'`
    /// formula and `Δ = 16Δ'`, the constant `C` for `n = 2, 3`, Kronecker's
    /// theorem at `count` random pairs, and the theta distribution relation
    /// with its constant term.
    pub fn standard_suite(&self, count: usize) -> Result<Vec<VerificationReport>> {
        let mut out = vec![self.first_limit()?];
        for z in self.random_points(count, &[1], 1) {
            out.push(self.second_limit(z)?);
        }
        for n in [2, 3, 5] {
            out.push(self.distribution(n)?);
        }
        out.push(self.prop_c()?);
        out.push(self.delta_relation());
        for n in [2, 3] {
            out.push(self.constant_c(n)?);
        }
        for (z, w) in self.random_pairs(count, 2) {
            out.push(self.kronecker(z, w)?);
        }
        for z in self.random_points(count, &[2], 3) {
            out.push(self.theta_distribution_2(z)?);
        }
        out.push(self.theta_distribution_constant()?);
        Ok(out)
    }
}

fn sample(l: &Lattice, rng: &mut ChaCha8Rng) -> Complex64 {
    let u: f64 = rng.gen();
    let v: f64 = rng.gen();
    l.omega1() * u + l.omega2() * v
}

/// Seeded points of the fundamental parallelogram avoiding `(1/n)Γ`, `n ∈ avoid`.
pub fn random_points(l: &Lattice, count: usize, avoid: &[i64], seed: u64, stream: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let z = sample(l, &mut rng);
        let ok = std::iter::once(1)
            .chain(avoid.iter().copied())
            .all(|n| lattice_distance(l, z * n as f64) / n as f64 >= REJECTION_RADIUS);
        if ok {
            out.push(z);
        }
    }
    out
}

pub fn verify_second_limit(z: Complex64, l: &Lattice, cfg: &PrecisionConfig) -> Result<VerificationReport> {
    Verifier::new(l, cfg)?.second_limit(z)
}

pub fn verify_first_limit(l: &Lattice, cfg: &PrecisionConfig) -> Result<VerificationReport> {
    Verifier::new(l, cfg)?.first_limit()
}

pub fn verify_distribution(n: i64, l: &Lattice, cfg: &PrecisionConfig) -> Result<VerificationReport> {
    Verifier::new(l, cfg)?.distribution(n)
}

pub fn verify_prop_c(l: &Lattice, cfg: &PrecisionConfig) -> Result<VerificationReport> {
    Verifier::new(l, cfg)?.prop_c()
}

pub fn verify_kronecker_theorem(
    z: Complex64,
    w: Complex64,
    l: &Lattice,
    cfg: &PrecisionConfig,
) -> Result<VerificationReport> {
    Verifier::new(l, cfg)?.kronecker(z, w)
}

pub fn verify_theta_distribution_2(z: Complex64, l: &Lattice, cfg: &PrecisionConfig) -> Result<VerificationReport> {
    Verifier::new(l, cfg)?.theta_distribution_2(z)
}

pub fn constant_c(n: i64, l: &Lattice, cfg: &PrecisionConfig) -> Result<VerificationReport> {
    Verifier::new(l, cfg)?.constant_c(n)
}

/// `-(1/12) log|Δ|²` for reference in callers comparing constants directly.
pub fn expected_constant(ctx: &ThetaContext) -> f64 {
    -ctx.delta.norm().ln() / 6.0
}
