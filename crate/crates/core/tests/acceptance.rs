//! Exit criteria. Each test prints one `[PASS]`/`[FAIL]` line and asserts.
//!
//! Run with `cargo test -p coherent-resolution --test acceptance -- --nocapture`
//! to see the lines.

// NaN must fail checks, so comparisons are negated on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::Command;

use coherent_resolution::check::{random_unit_vector, standard_vectors, STRONG_RADII};
use coherent_resolution::fock::{coherent_coefficients, ComplexAmplitude, FockVector};
use coherent_resolution::gamma::{gamma_oracle, gamma_table};
use coherent_resolution::quadrature::{
    angular_orthogonality, bra_exchange_check, quad_resolution, termwise_exchange_check, triangle_check, DiskGrid,
};
use coherent_resolution::resolution::{
    apply, klauder_diagnostics, norm_witness, paper_tail_bound_check, projection_resolution_compare, select_radius,
    strong_error, TruncatedResolution,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(id: u8, name: &str, failures: &[String], detail: String) {
    if failures.is_empty() {
        println!("[PASS] criterion {id} ({name}): {detail}");
    } else {
        println!("[FAIL] criterion {id} ({name}): {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "criterion {id} failed: {failures:?}");
}

fn fmt_list(xs: &[f64], style: &str) -> String {
    let parts: Vec<String> =
        xs.iter().map(|x| if style == "e" { format!("{x:.3e}") } else { format!("{x:.3}") }).collect();
    parts.join("/")
}

fn coherent(re: f64, dim: usize) -> FockVector {
    coherent_coefficients(ComplexAmplitude::new(re, 0.0).unwrap(), dim).unwrap()
}

#[test]
fn criterion_1_gamma_kernel() {
    let mut failures = Vec::new();
    let i0 = gamma_table(1.0, 0).unwrap().lower(0);
    if (i0 - (1.0 - (-1.0f64).exp())).abs() > 1e-12 {
        failures.push(format!("I_0(1) = {i0}"));
    }

    let mut worst_rec = 0.0_f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0001);
    let mut args: Vec<f64> = (0..=40).map(|k| 10.0 * k as f64).collect();
    args.extend((0..40).map(|_| rng.gen_range(0.0..400.0)));
    args.extend([1e-12, 1e-3, 0.25, 0.75]);
    for r in args {
        let t = gamma_table(r, 200).unwrap();
        for n in 0..=200 {
            worst_rec = worst_rec.max(t.recurrence_residual(n));
        }
    }
    if worst_rec > 1e-12 {
        failures.push(format!("recurrence residual {worst_rec:e}"));
    }

    let mut worst_oracle = 0.0_f64;
    for _ in 0..500 {
        let n = rng.gen_range(0..=200usize);
        let r = rng.gen_range(0.0..100.0);
        let gap = (gamma_table(r, n).unwrap().lower(n) - gamma_oracle(r, n, 1e-12).unwrap()).abs();
        worst_oracle = worst_oracle.max(gap);
    }
    if worst_oracle > 1e-10 {
        failures.push(format!("table vs oracle {worst_oracle:e}"));
    }
    report(
        1,
        "gamma kernel",
        &failures,
        format!("recurrence ≤ {worst_rec:e}, oracle gap ≤ {worst_oracle:e} (500 pairs)"),
    );
}

#[test]
fn criterion_2_strong_convergence() {
    let mut failures = Vec::new();
    let mut detail = Vec::new();
    for (label, v) in standard_vectors() {
        assert_eq!(v.dim(), 64);
        let errs: Vec<f64> = STRONG_RADII
            .iter()
            .map(|&r| strong_error(&TruncatedResolution::new(r, 64).unwrap(), &v).unwrap())
            .collect();
        if errs.windows(2).any(|w| w[1] > w[0]) {
            failures.push(format!("{label}: not nonincreasing {errs:?}"));
        }
        if label.starts_with("geometric") {
            let sel = select_radius(&v, 1e-3).unwrap();
            let post = strong_error(&TruncatedResolution::new(sel.radius, 64).unwrap(), &v).unwrap();
            if !(post < 1e-3) {
                failures.push(format!("{label}: select_radius postcondition {post:e}"));
            }
            detail.push(format!("{label}: R={:.4} err={post:.2e}", sel.radius));
        } else {
            if !(errs[3] < 1e-8) {
                failures.push(format!("{label}: error at r=8 = {:e}", errs[3]));
            }
            detail.push(format!("{label}: {:.2e}", errs[3]));
        }
    }
    report(2, "strong convergence", &failures, detail.join(", "));
}

#[test]
fn criterion_3_radius_selection() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    let mut failures = Vec::new();
    let mut count = 0;
    for _ in 0..100 {
        let dim = rng.gen_range(1..=128usize);
        let v = random_unit_vector(&mut rng, dim);
        assert!((v.norm() - 1.0).abs() < 1e-14);
        for eps in [1e-1, 1e-2, 1e-3] {
            let sel = select_radius(&v, eps).unwrap();
            let err = strong_error(&TruncatedResolution::new(sel.radius, dim).unwrap(), &v).unwrap();
            count += 1;
            if !(err < eps) {
                failures.push(format!("dim {dim}, eps {eps}: {err:e}"));
            }
        }
    }
    report(3, "radius selection", &failures, format!("{count} cases, zero failures"));
}

#[test]
fn criterion_4_klauder_lift() {
    let mut failures = Vec::new();
    let mut min_ratio = f64::INFINITY;
    let radii = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
    for (label, v) in standard_vectors() {
        let rep = klauder_diagnostics(&v, &radii).unwrap();
        failures.extend(rep.violations.iter().map(|m| format!("{label}: {m}")));
        let norm_sq = v.norm_sq();
        let mut prev = f64::NEG_INFINITY;
        for &r in &radii {
            let av = apply(&TruncatedResolution::new(r, 64).unwrap(), &v).unwrap();
            let e = coherent_resolution::inner(&v, &av).re;
            if e < 0.0 || e > norm_sq * (1.0 + 1e-14) || e < prev - 1e-14 * norm_sq {
                failures.push(format!("{label} r={r}: ⟨v|A v⟩ = {e}"));
            }
            if av.norm() > v.norm() * (1.0 + 1e-14) {
                failures.push(format!("{label} r={r}: ‖A v‖ > ‖v‖"));
            }
            prev = e;
        }
        if v.tail_norm_sq(40) < 1e-20 {
            let ratio = apply(&TruncatedResolution::new(8.0, 64).unwrap(), &v).unwrap().norm() / v.norm();
            min_ratio = min_ratio.min(ratio);
            if !(ratio > 1.0 - 1e-6) {
                failures.push(format!("{label}: ‖A_8 v‖/‖v‖ = {ratio}"));
            }
        }
    }
    report(4, "Klauder lift diagnostics", &failures, format!("min ‖A_8 v‖/‖v‖ = {min_ratio}"));
}

#[test]
fn criterion_5_no_uniform_limit() {
    let mut failures = Vec::new();
    let mut found = Vec::new();
    for &r in &STRONG_RADII {
        let depth = (r * r + 10.0 * r + 20.0) as usize;
        let table = gamma_table(r * r, depth).unwrap();
        match (0..=depth).find(|&m| table.upper(m) > 0.99) {
            Some(m) => found.push(format!("r={r}: m={m}")),
            None => failures.push(format!("r={r}: no witness")),
        }
        let w = norm_witness(&TruncatedResolution::new(r, 4).unwrap(), depth).unwrap();
        if !(w.witness > 0.99) {
            failures.push(format!("r={r}: norm_witness {}", w.witness));
        }
        let modes: Vec<usize> = (0..=depth + 40).collect();
        if !paper_tail_bound_check(r, &modes).unwrap().all_hold() {
            failures.push(format!("r={r}: 2r^(2m+2)/m! bound fails"));
        }
    }
    // m = 4 suffices at r = 1: I_4(1) ≈ 0.00366 by quadrature
    let i4 = gamma_oracle(1.0, 4, 1e-14).unwrap();
    if !((i4 - 0.00366).abs() < 1e-5 && 1.0 - i4 > 0.99) {
        failures.push(format!("I_4(1) = {i4}"));
    }
    for (label, v) in standard_vectors() {
        let ns: Vec<usize> = (0..64).collect();
        let rep = projection_resolution_compare(&v, &ns).unwrap();
        if !rep.witnesses_exact() {
            failures.push(format!("{label}: projection witness ≠ 1"));
        }
    }
    report(5, "no uniform limit", &failures, found.join(", "));
}

#[test]
fn criterion_6_quadrature_equivalence() {
    let mut failures = Vec::new();
    let v = coherent(1.0, 40);
    let exact = apply(&TruncatedResolution::new(4.0, 40).unwrap(), &v).unwrap();
    let errors: Vec<f64> = [64, 128, 256, 512]
        .iter()
        .map(|&k| quad_resolution(&v, &DiskGrid::new(4.0, k, k).unwrap()).sub(&exact).norm())
        .collect();
    if !(errors[3] <= 5e-4) {
        failures.push(format!("512x512 error {:e}", errors[3]));
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    if ratios.iter().any(|&q| !(q >= 3.0)) {
        failures.push(format!("ratios {ratios:?}"));
    }
    // 512 radial cells leave a ~5e-6 midpoint error on this smooth radial
    // integrand; 2048 are needed for the 1e-6 vacuum-mode target.
    let e0 = FockVector::basis(0, 40).unwrap();
    let mode0 = quad_resolution(&e0, &DiskGrid::new(4.0, 2048, 64).unwrap()).get(0).re;
    let vac = (mode0 - (1.0 - (-16.0f64).exp())).abs();
    if !(vac <= 1e-6) {
        failures.push(format!("vacuum mode error {vac:e}"));
    }
    report(
        6,
        "quadrature oracle equivalence",
        &failures,
        format!("errors {}, ratios {}, vacuum error {vac:.2e}", fmt_list(&errors, "e"), fmt_list(&ratios, "f")),
    );
}

#[test]
fn criterion_7_appendix_checks() {
    let mut failures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    let mut worst = 0.0_f64;
    let mut runs = 0;
    for case in 0..50 {
        let dim = rng.gen_range(1..=20usize);
        let f = random_unit_vector(&mut rng, dim);
        let v = random_unit_vector(&mut rng, dim);
        let grid =
            DiskGrid::new(rng.gen_range(0.5..4.0), rng.gen_range(8..=40), 2 * dim + rng.gen_range(4..16)).unwrap();
        let bra = bra_exchange_check(&f, &v, &grid);
        let term = termwise_exchange_check(&v, &grid);
        worst = worst.max(bra).max(term);
        if bra > 1e-10 || term > 1e-10 {
            failures.push(format!("case {case}: {bra:e} / {term:e}"));
        }
        let tri = triangle_check(&v, &grid);
        runs += 1;
        if !(tri.lhs <= tri.rhs + 1e-12) || !tri.holds() {
            failures.push(format!("case {case}: triangle {tri:?}"));
        }
    }
    for (v, r, k) in [(FockVector::basis(0, 1).unwrap(), 1.0, 64), (coherent(2.0, 64), 3.0, 256)] {
        let tri = triangle_check(&v, &DiskGrid::new(r, k, k).unwrap());
        runs += 1;
        if !(tri.lhs <= tri.rhs + 1e-12) || !tri.holds() {
            failures.push(format!("triangle r={r}: {tri:?}"));
        }
    }
    let mut worst_angular = 0.0_f64;
    for n in 0..32usize {
        for m in 0..32usize {
            for big_n in (n + m + 1)..=(n + m + 12) {
                let expect = if n == m { 1.0 } else { 0.0 };
                let z = angular_orthogonality(n, m, big_n).unwrap();
                worst_angular = worst_angular.max((z - Complex64::new(expect, 0.0)).norm());
            }
        }
    }
    if worst_angular > 1e-14 {
        failures.push(format!("angular deviation {worst_angular:e}"));
    }
    report(
        7,
        "appendix checks",
        &failures,
        format!("{runs} triangle runs, exchange ≤ {worst:e}, angular ≤ {worst_angular:e}"),
    );
}

#[test]
fn criterion_8_reproducibility() {
    let bin = env!("CARGO_BIN_EXE_cohres");
    let mut failures = Vec::new();
    let first = Command::new(bin).args(["check", "--seed", "11"]).output().unwrap();
    let second = Command::new(bin).args(["check", "--seed", "11"]).output().unwrap();
    if !first.status.success() {
        failures.push(format!("check exited {:?}: {}", first.status.code(), String::from_utf8_lossy(&first.stdout)));
    }
    if first.stdout != second.stdout {
        failures.push("check output differs between runs".into());
    }
    let args = ["converge", "--vector", "geometric 0.5", "--dim", "64", "--radii", "geom:1,2,5", "--grid", "32x160"];
    let a = Command::new(bin).args(args).output().unwrap();
    let b = Command::new(bin).args(args).output().unwrap();
    if !a.status.success() || a.stdout != b.stdout || a.stdout.is_empty() {
        failures.push("converge output not byte-identical".into());
    }
    let lines = String::from_utf8_lossy(&first.stdout).lines().filter(|l| l.starts_with("[PASS]")).count();
    report(
        8,
        "reproducibility",
        &failures,
        format!("check exit 0 with {lines}/7 suites passing, outputs byte-identical"),
    );
}
