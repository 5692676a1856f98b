use coherent_resolution::fock::{coherent_coefficients, inner, ComplexAmplitude, FockVector};
use coherent_resolution::gamma::{gamma_oracle, gamma_table};
use coherent_resolution::quadrature::DiskGrid;
use coherent_resolution::resolution::{apply, diagonal_element_radial, strong_error, weak_defect, TruncatedResolution};
use num_complex::Complex64;
use proptest::prelude::*;

fn vector(max_dim: usize) -> impl Strategy<Value = FockVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..=max_dim)
        .prop_filter("nonzero", |c| c.iter().any(|&(a, b)| a != 0.0 || b != 0.0))
        .prop_map(|c| FockVector::new(c.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap())
}

fn close(a: Complex64, b: Complex64, scale: f64) -> bool {
    (a - b).norm() <= 1e-12 * scale.max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_is_conjugate_symmetric(u in vector(24), v in vector(24)) {
        prop_assert!(close(inner(&u, &v), inner(&v, &u).conj(), u.norm() * v.norm()));
    }

    #[test]
    fn inner_is_linear_in_second_slot(u in vector(16), v in vector(16), w in vector(16), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let c = Complex64::new(a, b);
        let dim = v.dim().max(w.dim());
        let combo: Vec<Complex64> = (0..dim).map(|n| c * v.get(n) + w.get(n)).collect();
        let combo = FockVector::new(combo).unwrap();
        let lhs = inner(&u, &combo);
        let rhs = c * inner(&u, &v) + inner(&u, &w);
        prop_assert!(close(lhs, rhs, 4.0 * u.norm() * (v.norm() + w.norm())));
    }

    #[test]
    fn cauchy_schwarz(u in vector(32), v in vector(32)) {
        prop_assert!(inner(&u, &v).norm() <= u.norm() * v.norm() * (1.0 + 1e-14));
    }

    #[test]
    fn coherent_norm_matches_poisson_cdf(re in -3.0..3.0f64, im in -3.0..3.0f64, dim in 1usize..60) {
        let alpha = ComplexAmplitude::new(re, im).unwrap();
        let v = coherent_coefficients(alpha, dim).unwrap();
        let q = gamma_table(alpha.modulus_sq(), dim - 1).unwrap().upper(dim - 1);
        prop_assert!(v.norm() <= 1.0 + 1e-14);
        prop_assert!((v.norm_sq() - q).abs() <= 1e-10);
    }

    #[test]
    fn gamma_table_invariants(r in 0.0..300.0f64, max_n in 0usize..200) {
        let t = gamma_table(r, max_n).unwrap();
        for n in 0..=max_n {
            let (i, q) = (t.lower(n), t.upper(n));
            prop_assert!((0.0..=1.0).contains(&i) && (0.0..=1.0).contains(&q));
            prop_assert!((i + q - 1.0).abs() <= 1e-14);
            if n > 0 {
                prop_assert!(i <= t.lower(n - 1));
            }
        }
    }

    #[test]
    fn gamma_table_matches_oracle(r in 0.0..60.0f64, n in 0usize..80) {
        let table = gamma_table(r, n).unwrap().lower(n);
        prop_assert!((table - gamma_oracle(r, n, 1e-12).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn lower_gamma_nondecreasing_in_argument(a in 0.0..100.0f64, d in 0.0..20.0f64, n in 0usize..100) {
        prop_assert!(gamma_table(a, n).unwrap().lower(n) <= gamma_table(a + d, n).unwrap().lower(n) + 1e-15);
    }

    #[test]
    fn strong_error_monotone_in_radius(v in vector(40), r in 0.0..6.0f64, d in 0.0..3.0f64) {
        let e1 = strong_error(&TruncatedResolution::new(r, v.dim()).unwrap(), &v).unwrap();
        let e2 = strong_error(&TruncatedResolution::new(r + d, v.dim()).unwrap(), &v).unwrap();
        prop_assert!(e2 <= e1 * (1.0 + 1e-14) + 1e-300);
    }

    #[test]
    fn weak_defect_bounded_by_strong_error(u in vector(30), v in vector(30), r in 0.0..5.0f64) {
        let dim = u.dim().max(v.dim());
        let res = TruncatedResolution::new(r, dim).unwrap();
        let d = weak_defect(&res, &u, &v).unwrap();
        prop_assert!(d.norm() <= u.norm() * strong_error(&res, &v).unwrap() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn resolution_is_self_adjoint(u in vector(30), v in vector(30), r in 0.0..5.0f64) {
        let dim = u.dim().max(v.dim());
        let res = TruncatedResolution::new(r, dim).unwrap();
        let lhs = inner(&u, &apply(&res, &v).unwrap());
        let rhs = inner(&apply(&res, &u).unwrap(), &v);
        prop_assert!(close(lhs, rhs, u.norm() * v.norm()));
    }

    #[test]
    fn grid_weights_sum_to_area(r in 0.1..10.0f64, k in 2usize..64, l in 4usize..64) {
        let g = DiskGrid::new(r, k, l).unwrap();
        prop_assert!((g.total_weight() - g.area()).abs() <= 1e-12 * g.area());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn diagonal_element_matches_table(m in 0usize..30, r in 0.1..6.0f64) {
        let quad = diagonal_element_radial(m, r, 1e-13).unwrap();
        let table = gamma_table(r * r, m).unwrap().lower(m);
        prop_assert!((quad - table).abs() <= 1e-10);
    }
}
