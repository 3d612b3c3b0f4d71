//! Oriented lattices in ℂ, the area parameter `A`, the pairing
//! `⟨z, w⟩ = exp((z w̄ - w z̄)/A)`, and enumeration of lattice and torsion points.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance (in units of `√A`) of the lattice membership test.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-9;

/// An oriented lattice `Γ = ℤω1 + ℤω2` with `Im(ω2/ω1) > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    omega1: Complex64,
    omega2: Complex64,
    area_param: f64,
    // Lagrange-Gauss reduced basis and its integer coordinates in (ω1, ω2).
    reduced: [Complex64; 2],
    reduced_coords: [[i64; 2]; 2],
}

/// A point `(num1·ω1 + num2·ω2)/order` of `(1/n)Γ/Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionPoint {
    pub num1: i64,
    pub num2: i64,
    pub order: i64,
    pub value: Complex64,
}

impl TorsionPoint {
    pub fn is_zero(&self) -> bool {
        self.num1 == 0 && self.num2 == 0
    }
}

/// A lattice point with its integer coordinates in the user basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticePoint {
    pub m: i64,
    pub n: i64,
    pub value: Complex64,
}

impl Lattice {
    /// Builds the lattice spanned by `omega1, omega2`, swapping the
    /// generators when needed so that `Im(ω2/ω1) > 0`.
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        for w in [omega1, omega2] {
            if !(w.re.is_finite() && w.im.is_finite()) || w.norm() == 0.0 {
                return Err(Error::DegenerateLattice);
            }
        }
        let tau = omega2 / omega1;
        if tau.im.abs() <= 1e-12 * tau.norm() {
            return Err(Error::DegenerateLattice);
        }
        let (omega1, omega2) = if tau.im > 0.0 {
            (omega1, omega2)
        } else {
            (omega2, omega1)
        };
        let area = (omega1.conj() * omega2).im;
        let area_param = area / PI;
        let (reduced, reduced_coords) = gauss_reduce(omega1, omega2);
        Ok(Lattice {
            omega1,
            omega2,
            area_param,
            reduced,
            reduced_coords,
        })
    }

    /// Parses and builds a lattice from `[re1, im1, re2, im2]`.
    pub fn from_array(v: [f64; 4]) -> Result<Self> {
        Lattice::new(Complex64::new(v[0], v[1]), Complex64::new(v[2], v[3]))
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.omega1.re, self.omega1.im, self.omega2.re, self.omega2.im]
    }

    /// `ℤ[i]`.
    pub fn gaussian() -> Self {
        Lattice::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).expect("valid lattice")
    }

    /// `ℤ + ζ₃ℤ` with `ζ₃ = e^{2πi/3}`.
    pub fn eisenstein() -> Self {
        Lattice::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(-0.5, 3f64.sqrt() / 2.0),
        )
        .expect("valid lattice")
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    /// `A`: area of a fundamental domain divided by π.
    pub fn area_param(&self) -> f64 {
        self.area_param
    }

    /// A Lagrange-Gauss reduced basis of the same lattice, positively oriented.
    pub fn reduced_basis(&self) -> [Complex64; 2] {
        self.reduced
    }

    /// Real coordinates `(x, y)` with `z = x ω1 + y ω2`.
    pub fn coordinates(&self, z: Complex64) -> (f64, f64) {
        let area = self.area_param * PI;
        let x = (z.conj() * self.omega2).im / area;
        let y = (self.omega1.conj() * z).im / area;
        (x, y)
    }

    /// `m ω1 + n ω2`.
    pub fn point(&self, m: i64, n: i64) -> Complex64 {
        self.omega1 * m as f64 + self.omega2 * n as f64
    }

    fn reduced_to_user(&self, p: i64, q: i64) -> (i64, i64) {
        let [[a11, a12], [a21, a22]] = self.reduced_coords;
        (p * a11 + q * a21, p * a12 + q * a22)
    }

    /// The lattice point nearest to `z`.
    pub fn nearest_point(&self, z: Complex64) -> LatticePoint {
        let [b1, b2] = self.reduced;
        let area = self.area_param * PI;
        let x = (z.conj() * b2).im / area;
        let y = (b1.conj() * z).im / area;
        let (p0, q0) = (x.round() as i64, y.round() as i64);
        let mut best: Option<(f64, i64, i64)> = None;
        for dp in -1..=1 {
            for dq in -1..=1 {
                let (p, q) = (p0 + dp, q0 + dq);
                let d = (z - b1 * p as f64 - b2 * q as f64).norm_sqr();
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, p, q));
                }
            }
        }
        let (_, p, q) = best.expect("non-empty search");
        let (m, n) = self.reduced_to_user(p, q);
        LatticePoint {
            m,
            n,
            value: self.point(m, n),
        }
    }

    pub fn distance_to_lattice(&self, z: Complex64) -> f64 {
        (z - self.nearest_point(z).value).norm()
    }

    /// Membership test `dist(z, Γ) < 1e-9·√A`.
    pub fn is_lattice_point(&self, z: Complex64) -> bool {
        self.distance_to_lattice(z) < MEMBERSHIP_TOLERANCE * self.area_param.sqrt()
    }

    /// Integer coordinates of `z` if it is a lattice point.
    pub fn lattice_coordinates(&self, z: Complex64) -> Option<(i64, i64)> {
        let p = self.nearest_point(z);
        if (z - p.value).norm() < MEMBERSHIP_TOLERANCE * self.area_param.sqrt() {
            Some((p.m, p.n))
        } else {
            None
        }
    }

    /// `⟨z, w⟩ = exp((z w̄ - w z̄)/A)`, always of modulus one.
    pub fn pairing(&self, z: Complex64, w: Complex64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * (z * w.conj()).im / self.area_param)
    }

    /// All lattice points with `|γ| <= radius`, sorted by modulus then
    /// argument. When `exclude` is a lattice point, `-exclude` is omitted.
    pub fn points_in_disc(&self, radius: f64, exclude: Option<Complex64>) -> Vec<Complex64> {
        self.lattice_points_in_disc(radius, exclude)
            .into_iter()
            .map(|p| p.value)
            .collect()
    }

    /// Like [`Lattice::points_in_disc`] but keeps integer coordinates.
    pub fn lattice_points_in_disc(&self, radius: f64, exclude: Option<Complex64>) -> Vec<LatticePoint> {
        if !(radius > 0.0) {
            return Vec::new();
        }
        let skip = exclude
            .and_then(|z| self.lattice_coordinates(z))
            .map(|(m, n)| (-m, -n));
        let [b1, b2] = self.reduced;
        let area = self.area_param * PI;
        let p_max = (radius * b2.norm() / area).ceil() as i64 + 1;
        let q_max = (radius * b1.norm() / area).ceil() as i64 + 1;
        let r2 = radius * radius;
        let mut out = Vec::new();
        for p in -p_max..=p_max {
            for q in -q_max..=q_max {
                let (m, n) = self.reduced_to_user(p, q);
                if Some((m, n)) == skip {
                    continue;
                }
                let value = self.point(m, n);
                if value.norm_sqr() <= r2 {
                    out.push(LatticePoint { m, n, value });
                }
            }
        }
        out.sort_by(|a, b| cmp_norm_angle(a.value, b.value));
        out
    }

    /// The `n²` points of `(1/n)Γ/Γ` (or `n² - 1` without zero).
    pub fn torsion_points(&self, n: i64, include_zero: bool) -> Result<Vec<TorsionPoint>> {
        if n < 1 {
            return Err(Error::InvalidArgument(format!("torsion order must be >= 1, got {n}")));
        }
        let mut out = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n {
                if a == 0 && b == 0 && !include_zero {
                    continue;
                }
                out.push(TorsionPoint {
                    num1: a,
                    num2: b,
                    order: n,
                    value: (self.omega1 * a as f64 + self.omega2 * b as f64) / n as f64,
                });
            }
        }
        Ok(out)
    }

    /// `Σ_{z_n ∈ (1/n)Γ/Γ} ⟨γ, z_n⟩`, which is `n²` on `nΓ` and zero off it.
    pub fn pairing_character_sum(&self, gamma: Complex64, n: i64) -> Result<Complex64> {
        if self.lattice_coordinates(gamma).is_none() {
            return Err(Error::NotALatticePoint(format!("{gamma}")));
        }
        Ok(self
            .torsion_points(n, true)?
            .iter()
            .map(|t| self.pairing(gamma, t.value))
            .sum())
    }

    /// The lattice scaled by `lambda`.
    pub fn scaled(&self, lambda: Complex64) -> Result<Self> {
        Lattice::new(self.omega1 * lambda, self.omega2 * lambda)
    }
}

fn cmp_norm_angle(a: Complex64, b: Complex64) -> Ordering {
    a.norm_sqr()
        .total_cmp(&b.norm_sqr())
        .then_with(|| a.arg().total_cmp(&b.arg()))
}

fn gauss_reduce(omega1: Complex64, omega2: Complex64) -> ([Complex64; 2], [[i64; 2]; 2]) {
    let (mut u, mut v) = (omega1, omega2);
    let (mut cu, mut cv) = ([1i64, 0], [0i64, 1]);
    for _ in 0..200 {
        if v.norm_sqr() < u.norm_sqr() {
            std::mem::swap(&mut u, &mut v);
            std::mem::swap(&mut cu, &mut cv);
        }
        let mu = ((v * u.conj()).re / u.norm_sqr()).round();
        if mu == 0.0 {
            break;
        }
        let k = mu as i64;
        v -= u * mu;
        cv = [cv[0] - k * cu[0], cv[1] - k * cu[1]];
    }
    if (v / u).im < 0.0 {
        v = -v;
        cv = [-cv[0], -cv[1]];
    }
    ([u, v], [cu, cv])
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.as_array();
        write!(f, "{a},{b},{c},{d}")
    }
}

impl FromStr for Lattice {
    type Err = Error;

    /// Parses `"re1,im1,re2,im2"`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidArgument(format!("bad lattice '{s}': {e}")))?;
        let arr: [f64; 4] = parts
            .try_into()
            .map_err(|_| Error::InvalidArgument(format!("lattice needs four numbers, got '{s}'")))?;
        Lattice::from_array(arr)
    }
}
