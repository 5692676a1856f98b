//! The truncated resolution operator `A_r` in closed diagonal form and the
//! convergence diagnostics built on it.
//!
//! `A_r` acts on Fock coefficients as `(A_r φ)_n = I_n(r²) φ_n`, so every
//! quantity here reduces to sums over a [`GammaTable`]. Defects `I - A_r`
//! are always formed from the stored complements `Q_n(r²)`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{inner, FockVector};
use crate::gamma::{gamma_table, GammaTable};
use crate::numeric::{adaptive_simpson, ln_factorial, neumaier_sum, scaled_l2, ComplexSum, SIMPSON_BUDGET};

/// Number of bisection steps after the doubling phase of [`select_radius`].
pub const BISECTION_STEPS: usize = 40;
const MAX_DOUBLINGS: usize = 64;

/// Relative slack for order comparisons between separately rounded sums.
const ROUNDING_SLACK: f64 = 1e-14;

/// `A_r` restricted to the first `dim` Fock modes.
#[derive(Clone, Debug)]
pub struct TruncatedResolution {
    radius: f64,
    table: GammaTable,
}

impl TruncatedResolution {
    pub fn new(radius: f64, dim: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("radius must be finite and > 0, got {radius}")));
        }
        if dim == 0 {
            return Err(Error::invalid("dimension must be >= 1"));
        }
        let table = gamma_table(radius * radius, dim - 1)?;
        Ok(Self { radius, table })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    pub fn table(&self) -> &GammaTable {
        &self.table
    }

    /// Diagonal entry `⟨n|A_r|n⟩ = I_n(r²)`.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        self.table.lower(n)
    }

    /// Diagonal entry of the defect `⟨n|I - A_r|n⟩ = Q_n(r²)`.
    pub fn defect(&self, n: usize) -> f64 {
        self.table.upper(n)
    }

    fn check_dim(&self, v: &FockVector) -> Result<()> {
        if v.dim() > self.dim() {
            return Err(Error::invalid(format!(
                "vector dimension {} exceeds operator dimension {}",
                v.dim(),
                self.dim()
            )));
        }
        Ok(())
    }
}

/// `A_r v`, componentwise `I_n(r²) v_n`.
pub fn apply(res: &TruncatedResolution, v: &FockVector) -> Result<FockVector> {
    res.check_dim(v)?;
    let coeffs = v.coeffs().iter().enumerate().map(|(n, &c)| c * res.eigenvalue(n)).collect();
    FockVector::new(coeffs)
}

/// `‖(I - A_r) v‖ = √(Σ Q_n(r²)² |v_n|²)`.
pub fn strong_error(res: &TruncatedResolution, v: &FockVector) -> Result<f64> {
    res.check_dim(v)?;
    Ok(scaled_l2(v.coeffs().iter().enumerate().map(|(n, c)| res.defect(n) * c.norm())))
}

/// `⟨u|v⟩ - ⟨u|A_r v⟩ = Σ Q_n(r²) conj(u_n) v_n`.
pub fn weak_defect(res: &TruncatedResolution, u: &FockVector, v: &FockVector) -> Result<Complex64> {
    res.check_dim(u)?;
    res.check_dim(v)?;
    let mut acc = ComplexSum::new();
    for (n, (a, b)) in u.coeffs().iter().zip(v.coeffs()).enumerate() {
        acc.add(a.conj() * b * res.defect(n));
    }
    Ok(acc.value())
}

/// Outcome of [`select_radius`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadiusSelection {
    /// Smallest `K` whose tail `Σ_{n>K} |v_n|²` is below `ε²/2`.
    pub head_modes: usize,
    pub radius: f64,
    /// `‖(I - A_R) v‖` at the selected radius; strictly below `ε`.
    pub strong_error: f64,
}

/// Finds a radius `R` with `‖(I - A_R) v‖ < eps`.
///
/// First the smallest `K` with `Σ_{n>K} |v_n|² < ε²/2`, then the smallest
/// `R` (doubling from 1, then [`BISECTION_STEPS`] bisections) with
/// `Q_K(R²)² ‖v‖² < ε²/2`. Since `Q_n ≤ Q_K` for `n ≤ K` and `Q_n ≤ 1`,
/// the two halves bound the squared strong error below `ε²`.
pub fn select_radius(v: &FockVector, eps: f64) -> Result<RadiusSelection> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::invalid(format!("eps must be finite and > 0, got {eps}")));
    }
    let norm = v.norm();
    if norm == 0.0 {
        return Err(Error::invalid("select_radius needs a nonzero vector"));
    }
    let budget = 0.5 * eps * eps;
    let head_modes = (0..v.dim()).find(|&k| v.tail_norm_sq(k) < budget).unwrap_or(v.dim() - 1);

    let head_ok = |r: f64| -> Result<bool> {
        let q = gamma_table(r * r, head_modes)?.upper(head_modes);
        let scaled = q * norm;
        Ok(scaled * scaled < budget)
    };

    let mut hi = 1.0_f64;
    let mut lo = 0.0_f64;
    let mut doublings = 0;
    while !head_ok(hi)? {
        lo = hi;
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::invalid(format!("no radius found for eps = {eps:e}")));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if head_ok(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let res = TruncatedResolution::new(hi, v.dim())?;
    Ok(RadiusSelection { head_modes, radius: hi, strong_error: strong_error(&res, v)? })
}

/// One radius of a monotone-boundedness sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KlauderRow {
    pub radius: f64,
    /// `⟨v|A_r v⟩`.
    pub expectation: f64,
    /// `‖A_r v‖`.
    pub applied_norm: f64,
    /// `‖A_r v‖ / ‖v‖`, tending to 1 as `r` grows.
    pub norm_ratio: f64,
    /// `|⟨v|A_r v⟩| ≤ ‖v‖ ‖A_r v‖`.
    pub schwarz_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KlauderReport {
    pub norm_sq: f64,
    pub rows: Vec<KlauderRow>,
    pub violations: Vec<String>,
}

impl KlauderReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Positivity, boundedness and monotonicity of `A_r` along `radii`.
///
/// Checks per radius: `0 ≤ ⟨v|A_r v⟩ ≤ ‖v‖²`, `‖A_r v‖ ≤ I_0(r²) ‖v‖ ≤ ‖v‖`,
/// `I_n ≥ I_n²` on every diagonal entry, the Schwarz bound, and that
/// `⟨v|A_r v⟩` does not decrease between consecutive radii.
pub fn klauder_diagnostics(v: &FockVector, radii: &[f64]) -> Result<KlauderReport> {
    check_increasing(radii)?;
    let norm = v.norm();
    let norm_sq = norm * norm;
    let slack = ROUNDING_SLACK * norm_sq;
    let mut rows = Vec::with_capacity(radii.len());
    let mut violations = Vec::new();

    for &r in radii {
        let res = TruncatedResolution::new(r, v.dim())?;
        let av = apply(&res, v)?;
        let expectation = inner(v, &av).re;
        let applied_norm = av.norm();
        let norm_ratio = if norm > 0.0 { applied_norm / norm } else { 1.0 };

        if expectation < -slack || expectation > norm_sq + slack {
            violations.push(format!("r={r}: ⟨v|A v⟩ = {expectation} outside [0, {norm_sq}]"));
        }
        if applied_norm > norm * (1.0 + ROUNDING_SLACK) {
            violations.push(format!("r={r}: ‖A v‖ = {applied_norm} exceeds ‖v‖ = {norm}"));
        }
        if applied_norm > res.eigenvalue(0) * norm * (1.0 + ROUNDING_SLACK) {
            violations.push(format!("r={r}: ‖A v‖ = {applied_norm} exceeds I_0(r²)‖v‖"));
        }
        if let Some(n) = res.table().lower_values().iter().position(|&i| !(i >= i * i && (0.0..=1.0).contains(&i))) {
            violations.push(format!("r={r}: diagonal entry {n} violates 0 ≤ I² ≤ I ≤ 1"));
        }
        let schwarz_holds = expectation.abs() <= norm * applied_norm * (1.0 + ROUNDING_SLACK);
        if !schwarz_holds {
            violations.push(format!("r={r}: Schwarz bound fails"));
        }
        if let Some(prev) = rows.last().map(|p: &KlauderRow| p.expectation) {
            if expectation < prev - slack {
                violations.push(format!("r={r}: ⟨v|A v⟩ decreased from {prev} to {expectation}"));
            }
        }
        rows.push(KlauderRow { radius: r, expectation, applied_norm, norm_ratio, schwarz_holds });
    }
    Ok(KlauderReport { norm_sq, rows, violations })
}

/// Basis-vector lower bound on `‖A_r - I‖`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormWitness {
    /// Smallest mode attaining the maximal defect.
    pub mode: usize,
    /// `max_{m ≤ max_m} Q_m(r²) = ‖(A_r - I) e_mode‖`.
    pub witness: f64,
    /// `max_m (1 - 2 I_m(r²))` clamped at 0: the cruder lower bound on
    /// `‖A_r - I‖²` obtained by dropping `‖A_r e_m‖²`.
    pub paper_bound: f64,
}

/// Scans `e_0..e_{max_m}` for the largest defect `‖(A_r - I) e_m‖ = Q_m(r²)`.
///
/// Modes beyond the operator's stored dimension are tabulated on demand.
pub fn norm_witness(res: &TruncatedResolution, max_m: usize) -> Result<NormWitness> {
    let wide;
    let table = if max_m < res.dim() {
        res.table()
    } else {
        wide = gamma_table(res.radius * res.radius, max_m)?;
        &wide
    };
    let mut best = NormWitness { mode: 0, witness: table.upper(0), paper_bound: 0.0 };
    for m in 0..=max_m {
        let q = table.upper(m);
        if q > best.witness {
            best.mode = m;
            best.witness = q;
        }
        best.paper_bound = best.paper_bound.max(1.0 - 2.0 * table.lower(m));
    }
    Ok(best)
}

/// Default witness depth for radius `r`: far enough past the Poisson mode
/// `r²` that `Q_m(r²) > 0.99` is reachable.
pub fn witness_depth(radius: f64) -> usize {
    let r2 = radius * radius;
    (r2 + 10.0 * radius + 20.0).ceil() as usize
}

/// `(2/m!) ∫₀^r s^{2m+1} e^{-s²} ds`, the diagonal element `⟨m|A_r|m⟩` in
/// its radial form, by adaptive Simpson in `s`.
pub fn diagonal_element_radial(m: usize, radius: f64, tol: f64) -> Result<f64> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::invalid(format!("radius must be finite and >= 0, got {radius}")));
    }
    let ln_norm = std::f64::consts::LN_2 - ln_factorial(m);
    let p = (2 * m + 1) as f64;
    let f = move |s: f64| {
        if s <= 0.0 {
            return 0.0;
        }
        (ln_norm + p * s.ln() - s * s).exp()
    };
    adaptive_simpson(f, 0.0, radius, tol, SIMPSON_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailBoundRow {
    pub mode: usize,
    /// `I_m(r²)`.
    pub diagonal: f64,
    /// `ln(2 r^{2m+2} / m!)`.
    pub ln_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailBoundReport {
    pub radius: f64,
    pub rows: Vec<TailBoundRow>,
}

impl TailBoundReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// Checks `⟨m|A_r|m⟩ = I_m(r²) ≤ 2 r^{2m+2} / m!` in log space for each mode.
pub fn paper_tail_bound_check(radius: f64, modes: &[usize]) -> Result<TailBoundReport> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::invalid(format!("radius must be finite and > 0, got {radius}")));
    }
    let max_m = modes.iter().copied().max().unwrap_or(0);
    let table = gamma_table(radius * radius, max_m)?;
    let rows = modes
        .iter()
        .map(|&m| {
            let diagonal = table.lower(m);
            let ln_bound = std::f64::consts::LN_2 + (2 * m + 2) as f64 * radius.ln() - ln_factorial(m);
            let holds = diagonal == 0.0 || diagonal.ln() <= ln_bound;
            TailBoundRow { mode: m, diagonal, ln_bound, holds }
        })
        .collect();
    Ok(TailBoundReport { radius, rows })
}

/// Zeroes every mode above `n`: the head projection `B_n = Σ_{k≤n} |k⟩⟨k|`.
pub fn head_projection(v: &FockVector, n: usize) -> FockVector {
    let coeffs =
        v.coeffs().iter().enumerate().map(|(k, &c)| if k <= n { c } else { Complex64::new(0.0, 0.0) }).collect();
    FockVector::new(coeffs).expect("projection of a finite vector is finite")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProjectionRow {
    pub n: usize,
    /// `‖(I - B_n) v‖`.
    pub strong_error: f64,
    /// `‖(B_n - I) e_{n+1}‖`.
    pub basis_witness: f64,
    /// Smallest `‖(B_n - B_m) e_{max(n,m)}‖` over the other `m` in range; 1 when alone.
    pub pair_witness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub rows: Vec<ProjectionRow>,
}

impl ProjectionReport {
    /// Every basis and pair witness equals 1 exactly.
    pub fn witnesses_exact(&self) -> bool {
        self.rows.iter().all(|r| r.basis_witness == 1.0 && r.pair_witness == 1.0)
    }
}

/// Compares the orthogonal head projections `B_n` with `A_r`: `B_n → I`
/// strongly on `v`, yet `‖B_n - I‖ = ‖B_n - B_m‖ = 1` on basis witnesses.
pub fn projection_resolution_compare(v: &FockVector, ns: &[usize]) -> Result<ProjectionReport> {
    let max_n = ns.iter().copied().max().unwrap_or(0);
    let dim = (max_n + 2).max(v.dim());
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let strong = v.sub(&head_projection(v, n)).norm();
        let e = FockVector::basis(n + 1, dim)?;
        let basis_witness = head_projection(&e, n).sub(&e).norm();
        let mut pair_witness = 1.0_f64;
        for &m in ns.iter().filter(|&&m| m != n) {
            let e = FockVector::basis(n.max(m), dim)?;
            let d = head_projection(&e, n).sub(&head_projection(&e, m)).norm();
            pair_witness = pair_witness.min(d);
        }
        rows.push(ProjectionRow { n, strong_error: strong, basis_witness, pair_witness });
    }
    Ok(ProjectionReport { rows })
}

/// One radius of a convergence sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub radius: f64,
    pub strong_error: f64,
    /// `⟨v|v⟩ - ⟨v|A_r v⟩`.
    pub weak_defect_self: f64,
    pub norm_witness: f64,
    pub paper_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub test_vector_label: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn strong_error_nonincreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].strong_error <= w[0].strong_error)
    }
}

/// Radius sweep for one vector. Radii are evaluated in parallel; rows come
/// back in input order. `witness_modes` overrides [`witness_depth`].
pub fn converge(
    v: &FockVector,
    radii: &[f64],
    witness_modes: Option<usize>,
    label: impl Into<String>,
) -> Result<ConvergenceReport> {
    check_increasing(radii)?;
    let rows = radii
        .par_iter()
        .map(|&r| {
            let res = TruncatedResolution::new(r, v.dim())?;
            let w = norm_witness(&res, witness_modes.unwrap_or_else(|| witness_depth(r)))?;
            Ok(ConvergenceRow {
                radius: r,
                strong_error: strong_error(&res, v)?,
                weak_defect_self: weak_defect(&res, v, v)?.re,
                norm_witness: w.witness,
                paper_bound: w.paper_bound,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport { test_vector_label: label.into(), rows })
}

fn check_increasing(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::invalid("at least one radius is required"));
    }
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(Error::invalid("radii must be finite and > 0"));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("radii must be strictly increasing"));
    }
    Ok(())
}

/// Direct `Σ_{k>n} |v_k|²` by plain summation, for cross-checking tails.
pub fn direct_tail_sum(v: &FockVector, n: usize) -> f64 {
    neumaier_sum(v.coeffs().iter().skip(n + 1).map(|c| c.norm_sqr()))
}
