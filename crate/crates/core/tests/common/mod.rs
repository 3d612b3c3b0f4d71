//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use ek_core::Lattice;
use num_complex::Complex64;

/// Symmetric parallelogram sum of `(z̄0+γ̄)^a ⟨γ,w0⟩ |z0+γ|^{-2s}` over
/// `γ = m ω1 + n ω2`, `|m|, |n| <= n_max`, skipping `γ = -z0`.
pub fn direct_kstar(
    lattice: &Lattice,
    a: u32,
    z0: Complex64,
    w0: Complex64,
    s: Complex64,
    n_max: i64,
) -> Complex64 {
    let (w1, w2) = (lattice.omega1(), lattice.omega2());
    let area = lattice.area_param();
    let mut total = Complex64::new(0.0, 0.0);
    for m in -n_max..=n_max {
        let mut row = Complex64::new(0.0, 0.0);
        for n in -n_max..=n_max {
            let g = w1 * m as f64 + w2 * n as f64;
            let u = z0 + g;
            let r2 = u.norm_sqr();
            if r2 < 1e-20 {
                continue;
            }
            let phase = 2.0 * (g * w0.conj()).im / area;
            let pairing = Complex64::from_polar(1.0, phase);
            let weight = (-s * r2.ln()).exp();
            row += u.conj().powu(a) * pairing * weight;
        }
        total += row;
    }
    total
}

/// Composite Gauss–Legendre quadrature (16 nodes per panel) on `[lo, hi]`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, panels: usize) -> f64 {
    const X: [f64; 8] = [
        0.0950125098376374,
        0.2816035507792589,
        0.4580167776572274,
        0.6178762444026438,
        0.7554044083550030,
        0.8656312023878318,
        0.9445750230732326,
        0.9894009349916499,
    ];
    const W: [f64; 8] = [
        0.1894506104550685,
        0.1826034150449236,
        0.1691565193950025,
        0.1495959888165767,
        0.1246289712555339,
        0.0951585116824928,
        0.0622535239386479,
        0.0271524594117541,
    ];
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let mid = lo + (k as f64 + 0.5) * h;
        let half = 0.5 * h;
        for (x, w) in X.iter().zip(W.iter()) {
            total += w * half * (f(mid + half * x) + f(mid - half * x));
        }
    }
    total
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn oblique() -> Lattice {
    Lattice::new(c(1.0, 0.0), c(0.3, 1.2)).unwrap()
}

pub fn standard_lattices() -> Vec<(&'static str, Lattice)> {
    vec![
        ("gaussian", Lattice::gaussian()),
        ("oblique", oblique()),
        ("eisenstein", Lattice::eisenstein()),
    ]
}
