//! Worked examples with reference values frozen from independent computations.

use coherent_resolution::fock::{coherent_coefficients, ComplexAmplitude, FockVector};
use coherent_resolution::gamma::gamma_oracle;
use coherent_resolution::quadrature::{
    bra_exchange_check, quad_resolution, termwise_exchange_check, triangle_check, DiskGrid,
};
use coherent_resolution::resolution::{apply, select_radius, strong_error, weak_defect, TruncatedResolution};
use coherent_resolution::study::{RadiiSpec, VectorSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coherent(re: f64, dim: usize) -> FockVector {
    coherent_coefficients(ComplexAmplitude::new(re, 0.0).unwrap(), dim).unwrap()
}

#[test]
fn vacuum_strong_error_is_gaussian() {
    let e0 = FockVector::basis(0, 64).unwrap();
    for r in [1.0f64, 2.0, 3.0] {
        let err = strong_error(&TruncatedResolution::new(r, 64).unwrap(), &e0).unwrap();
        let expect = (-r * r).exp();
        assert!((err - expect).abs() <= 1e-13 * expect, "r={r}: {err} vs {expect}");
    }
}

#[test]
fn coherent_norm_is_poisson_cdf() {
    // 1 - I_10(4) and 1 - I_40(1) by quadrature of the incomplete gamma integral
    let v = coherent(2.0, 11);
    assert!((v.norm_sq() - (1.0 - gamma_oracle(4.0, 10, 1e-15).unwrap())).abs() < 1e-12);
    assert!((v.norm_sq() - 0.9971602338794863).abs() < 1e-13);
    let w = coherent(1.0, 41);
    assert!((w.norm() - (1.0 - gamma_oracle(1.0, 40, 1e-15).unwrap()).sqrt()).abs() < 1e-14);
}

#[test]
fn vacuum_radius_for_two_percent() {
    let e0 = FockVector::basis(0, 8).unwrap();
    let sel = select_radius(&e0, 0.02).unwrap();
    assert!(sel.strong_error < 0.02);
    // exact threshold is sqrt(ln 50); the selection may overshoot it slightly
    assert!(sel.radius >= 50f64.ln().sqrt() - 1e-9);
    assert!(sel.radius <= 2.1);
}

#[test]
fn radius_selection_for_loose_and_spread_targets() {
    let e0 = FockVector::basis(0, 8).unwrap();
    let loose = select_radius(&e0, 1.5).unwrap();
    assert!(loose.radius <= 1.0 && loose.strong_error < 1.5);

    let v = coherent(2.0, 64);
    let sel = select_radius(&v, 1e-3).unwrap();
    let at = |r: f64| strong_error(&TruncatedResolution::new(r, 64).unwrap(), &v).unwrap();
    assert!(at(sel.radius) < 1e-3);
    assert!(at(sel.radius / 2.0) >= at(sel.radius));
}

#[test]
fn geometric_sweep_strictly_decreases() {
    let v = "geometric 0.5".parse::<VectorSpec>().unwrap().build(64).unwrap();
    let radii = "geom:0.5,2,5".parse::<RadiiSpec>().unwrap().values().unwrap();
    let errs: Vec<f64> =
        radii.iter().map(|&r| strong_error(&TruncatedResolution::new(r, 64).unwrap(), &v).unwrap()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn weak_defect_matches_reordered_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..5 {
        let mk = |rng: &mut ChaCha8Rng| {
            FockVector::new(
                (0..32).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            )
            .unwrap()
        };
        let (u, v) = (mk(&mut rng), mk(&mut rng));
        let got = weak_defect(&TruncatedResolution::new(1.5, 32).unwrap(), &u, &v).unwrap();
        let mut brute = Complex64::new(0.0, 0.0);
        for n in (0..32).rev() {
            let q = 1.0 - gamma_oracle(2.25, n, 1e-15).unwrap();
            brute += u.get(n).conj() * v.get(n) * q;
        }
        assert!((got - brute).norm() <= 1e-12, "{got} vs {brute}");
    }
}

#[test]
fn coherent_quadrature_on_fine_grid() {
    let v = coherent(1.0, 40);
    let grid = DiskGrid::new(4.0, 256, 256).unwrap();
    let exact = apply(&TruncatedResolution::new(4.0, 40).unwrap(), &v).unwrap();
    assert!(quad_resolution(&v, &grid).sub(&exact).norm() < 1e-3);
}

#[test]
fn strong_error_agrees_with_quadrature() {
    let v = coherent(1.0, 64);
    let closed = strong_error(&TruncatedResolution::new(3.0, 64).unwrap(), &v).unwrap();
    let quad = v.sub(&quad_resolution(&v, &DiskGrid::new(3.0, 512, 160).unwrap())).norm();
    assert!((closed - quad).abs() < 1e-4, "{closed} vs {quad}");
}

#[test]
fn triangle_inequality_strict_for_spread_vector() {
    let v = coherent(2.0, 64);
    let tri = triangle_check(&v, &DiskGrid::new(3.0, 256, 256).unwrap());
    assert!(tri.holds());
    assert!(tri.lhs < tri.rhs * (1.0 - 1e-3), "{tri:?}");
}

#[test]
fn exchange_checks_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let f = FockVector::from_real(&(0..16).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()).unwrap();
    let v = FockVector::from_real(&(0..16).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()).unwrap();
    let grid = DiskGrid::new(2.0, 128, 128).unwrap();
    assert!(bra_exchange_check(&f, &v, &grid) < 1e-10);
    assert!(termwise_exchange_check(&coherent(1.0, 40), &grid) < 1e-10);
}
