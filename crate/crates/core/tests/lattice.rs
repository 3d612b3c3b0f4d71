use ek_core::Lattice;
use num_complex::Complex64;
use proptest::prelude::*;

fn lattices() -> Vec<Lattice> {
    vec![
        Lattice::gaussian(),
        Lattice::new(Complex64::new(1.0, 0.0), Complex64::new(0.3, 1.2)).unwrap(),
        Lattice::eisenstein(),
    ]
}

fn unimodular() -> impl Strategy<Value = [i64; 4]> {
    (-4i64..5, -4i64..5, -4i64..5, -4i64..5).prop_filter_map("det ±1", |(a, b, c, d)| {
        (a * d - b * c == 1 || a * d - b * c == -1).then_some([a, b, c, d])
    })
}

fn transformed(l: &Lattice, m: [i64; 4]) -> Lattice {
    let [a, b, c, d] = m;
    Lattice::new(l.point(a, b), l.point(c, d)).unwrap()
}

fn sorted_keys(points: &[Complex64]) -> Vec<(i64, i64)> {
    let mut k: Vec<(i64, i64)> = points.iter().map(|z| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64)).collect();
    k.sort();
    k
}

#[test]
fn disc_counts_follow_area() {
    // N(R) ≈ R²/A for large R
    for l in lattices() {
        let r = 40.0;
        let n = l.points_in_disc(r, None).len() as f64;
        let expected = r * r / l.area_param();
        assert!((n - expected).abs() / expected < 0.01, "{n} vs {expected}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pairing_is_unimodular_and_reciprocal(zr in -5.0f64..5.0, zi in -5.0f64..5.0, wr in -5.0f64..5.0, wi in -5.0f64..5.0, which in 0usize..3) {
        let l = &lattices()[which];
        let (z, w) = (Complex64::new(zr, zi), Complex64::new(wr, wi));
        prop_assert!((l.pairing(z, w).norm() - 1.0).abs() < 1e-12);
        prop_assert!((l.pairing(z, w) * l.pairing(w, z) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn pairing_trivial_on_lattice(m1 in -6i64..7, n1 in -6i64..7, m2 in -6i64..7, n2 in -6i64..7, which in 0usize..3) {
        let l = &lattices()[which];
        prop_assert!((l.pairing(l.point(m1, n1), l.point(m2, n2)) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn generator_change_preserves_area_and_discs(m in unimodular(), which in 0usize..3, r in 0.5f64..4.0) {
        let l = &lattices()[which];
        let t = transformed(l, m);
        prop_assert!((t.area_param() - l.area_param()).abs() < 1e-12 * l.area_param().max(1.0));
        let a = sorted_keys(&l.points_in_disc(r, None));
        let b = sorted_keys(&t.points_in_disc(r, None));
        prop_assert_eq!(a, b);
    }
}
