mod common;

use common::{c, direct_kstar, gauss_legendre, standard_lattices};
use ek_core::eklerch::{
    i_integral, kstar, kstar_a0_at_1, kstar_regularized_at_1, theta_star, EKQuery,
};
use ek_core::{Lattice, PrecisionConfig};

fn cfg() -> PrecisionConfig {
    PrecisionConfig::default()
}

#[test]
fn convergent_range_matches_direct_sums() {
    let cases = [(0u32, 3.0), (1, 3.0), (2, 4.0)];
    let points = [(c(0.0, 0.0), c(0.0, 0.0)), (c(0.3, 0.1), c(0.2, -0.45))];
    for (name, l) in standard_lattices() {
        for &(a, s) in &cases {
            for &(z0, w0) in &points {
                let s = c(s, 0.0);
                let got = kstar(&EKQuery::new(a, z0, w0, s, &l), &cfg()).unwrap().value;
                let want = direct_kstar(&l, a, z0, w0, s, 1500);
                assert!(
                    (got - want).norm() <= 1e-9,
                    "{name} a={a} s={s} z0={z0}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn gaussian_weight_six_sum() {
    // Σ'|γ|^{-6} over ℤ[i] = 4 ζ(3) β(3), β(3) = π³/32
    let want = 4.0 * 1.202_056_903_159_594_2 * std::f64::consts::PI.powi(3) / 32.0;
    let got = kstar(&EKQuery::new(0, c(0.0, 0.0), c(0.0, 0.0), c(3.0, 0.0), &Lattice::gaussian()), &cfg())
        .unwrap()
        .value;
    assert!((got.re - want).abs() < 1e-12 && got.im.abs() < 1e-14, "{got} vs {want}");
}

#[test]
fn i_integral_matches_quadrature() {
    let l = Lattice::gaussian();
    let got = i_integral(0, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), &l, &cfg()).unwrap();
    // ∫_1^∞ θ*_0(t) dt; substitute t = 1 + u/(1-u) is unnecessary, θ* decays like e^{-πt}
    let f = |t: f64| theta_star(0, t, c(0.0, 0.0), c(0.0, 0.0), &l, &cfg()).unwrap().re;
    let want = gauss_legendre(f, 1.0, 13.0, 48);
    assert!((got.re - want).abs() < 1e-8, "{got} vs {want}");
}

#[test]
fn i_integral_conjugate_symmetry() {
    let l = Lattice::gaussian();
    let s = c(0.4, 0.9);
    let v = i_integral(1, c(0.3, 0.0), c(0.2, 0.0), s, &l, &cfg()).unwrap();
    let w = i_integral(1, c(0.3, 0.0), c(0.2, 0.0), s.conj(), &l, &cfg()).unwrap();
    assert!((v - w.conj()).norm() < 1e-12);
}

#[test]
fn i_integral_lattice_shift_of_w0() {
    let l = Lattice::gaussian();
    let s = c(0.7, 0.2);
    let base = i_integral(0, c(0.0, 0.0), c(0.15, 0.35), s, &l, &cfg()).unwrap();
    let shifted = i_integral(0, c(0.0, 0.0), c(2.15, -0.65), s, &l, &cfg()).unwrap();
    assert!((base - shifted).norm() < 1e-10);
}

#[test]
fn residue_near_one() {
    for (_, l) in standard_lattices() {
        let eps = 1e-5;
        let v = kstar(&EKQuery::new(0, c(0.0, 0.0), c(0.0, 0.0), c(1.0 + eps, 0.0), &l), &cfg())
            .unwrap()
            .value;
        assert!((v * eps - 1.0 / l.area_param()).norm() < 1e-4);
    }
}

#[test]
fn regularized_value_matches_extrapolation() {
    for (_, l) in standard_lattices() {
        let area = l.area_param();
        let reg = kstar_regularized_at_1(&l, &cfg()).unwrap();
        assert!(reg.im.abs() <= 1e-10);
        let h = 1e-4;
        let f = |s: f64| {
            let v = kstar(&EKQuery::new(0, c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0), &l), &cfg())
                .unwrap()
                .value;
            area * v - 1.0 / (s - 1.0)
        };
        let extrapolated = (f(1.0 + h) + f(1.0 - h)) / 2.0;
        assert!((extrapolated - reg).norm() < 1e-6, "{extrapolated} vs {reg}");
    }
}

#[test]
fn closed_form_at_one_matches_generic_path() {
    let l = Lattice::gaussian();
    let z = c(0.5, 0.5);
    let closed = kstar_a0_at_1(z, &l, &cfg()).unwrap();
    let generic = kstar(&EKQuery::new(0, c(0.0, 0.0), z, c(1.0, 0.0), &l), &cfg()).unwrap();
    assert!(!generic.is_pole);
    assert!((closed - generic.value * l.area_param()).norm() < 1e-10);
}

#[test]
fn closed_form_conjugation() {
    let l = Lattice::gaussian();
    let z = c(0.21, 0.33);
    let v = kstar_a0_at_1(z, &l, &cfg()).unwrap();
    let w = kstar_a0_at_1(z.conj(), &l, &cfg()).unwrap();
    assert!((v - w.conj()).norm() < 1e-12);
}

#[test]
fn two_torsion_sum() {
    for (_, l) in standard_lattices() {
        let mut total = c(0.0, 0.0);
        for tp in l.torsion_points(2, false).unwrap() {
            total += kstar_a0_at_1(tp.value, &l, &cfg()).unwrap();
        }
        // Σ K*_0(0, z_2, 1) = -2 log 2 / A, and the closed form returns A·K*
        assert!((total + 2.0 * 2f64.ln()).norm() < 1e-8, "{total}");
    }
}

#[test]
fn distribution_at_general_s() {
    for (_, l) in standard_lattices().into_iter().take(2) {
        for s in [c(3.0, 0.0), c(0.5, 0.0), c(2.0, 1.0)] {
            for n in [2i64, 3] {
                let mut total = c(0.0, 0.0);
                for tp in l.torsion_points(n, true).unwrap() {
                    total += kstar(&EKQuery::new(0, c(0.0, 0.0), tp.value, s, &l), &cfg())
                        .unwrap()
                        .value;
                }
                let lhs = total / (n * n) as f64;
                let rhs = kstar(&EKQuery::new(0, c(0.0, 0.0), c(0.0, 0.0), s, &l), &cfg()).unwrap().value
                    * (-2.0 * s * (n as f64).ln()).exp();
                assert!((lhs - rhs).norm() < 1e-8, "n={n} s={s}: {lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn functional_equation_grid() {
    use ek_core::eklerch::functional_equation_defect;
    let (z0, w0) = (c(0.3, 0.1), c(-0.15, 0.2));
    for (name, l) in standard_lattices() {
        for a in 0..3u32 {
            for s in [c(0.3, 0.2), c(0.7, -0.5), c(1.6, 0.3)] {
                let d = functional_equation_defect(&EKQuery::new(a, z0, w0, s, &l), &cfg()).unwrap();
                assert!(d <= 1e-9, "{name} a={a} s={s}: {d:e}");
            }
        }
    }
    let q = EKQuery::new(1, c(0.3, 0.0), c(0.0, 0.2), c(0.7, 0.4), &Lattice::gaussian());
    assert!(functional_equation_defect(&q, &cfg()).unwrap() <= 1e-9);
    // shifting z0 by a lattice vector only changes the phase of both sides
    let shifted = EKQuery::new(1, c(1.3, -1.0), c(0.0, 0.2), c(0.7, 0.4), &Lattice::gaussian());
    assert!(functional_equation_defect(&shifted, &cfg()).unwrap() <= 1e-9);
}

/// Wirtinger derivatives by central differences.
fn wirtinger<F: Fn(num_complex::Complex64) -> num_complex::Complex64>(
    f: F,
    z: num_complex::Complex64,
    h: f64,
) -> (num_complex::Complex64, num_complex::Complex64) {
    let dx = (f(z + h) - f(z - h)) / (2.0 * h);
    let dy = (f(z + c(0.0, h)) - f(z - c(0.0, h))) / (2.0 * h);
    ((dx - c(0.0, 1.0) * dy) / 2.0, (dx + c(0.0, 1.0) * dy) / 2.0)
}

#[test]
fn z0_derivatives() {
    // ∂K*_a/∂z0 = -s K*_{a+1}(s+1), ∂K*_a/∂z̄0 = (a - s) K*_{a-1}(s)
    let l = common::oblique();
    let w0 = c(0.1, -0.3);
    let z0 = c(0.27, 0.41);
    for (a, s) in [(1u32, c(0.6, 0.2)), (2, c(1.4, -0.3))] {
        let k = |a: u32, s, z| kstar(&EKQuery::new(a, z, w0, s, &l), &cfg()).unwrap().value;
        let (dz, dzbar) = wirtinger(|z| k(a, s, z), z0, 1e-5);
        let want_dz = -s * k(a + 1, s + 1.0, z0);
        let want_dzbar = (a as f64 - s) * k(a - 1, s, z0);
        assert!((dz - want_dz).norm() < 1e-6 * want_dz.norm().max(1.0), "{dz} vs {want_dz}");
        assert!((dzbar - want_dzbar).norm() < 1e-6 * want_dzbar.norm().max(1.0), "{dzbar} vs {want_dzbar}");
    }
}
