//! Brute-force vector-valued quadrature of `π⁻¹ ∫_{|α|≤r} |α⟩⟨α|v⟩ d²α`.
//!
//! The disk is cut into a polar tensor grid and each cell contributes its
//! integrand at the cell center times the cell area `s Δs Δθ`. Nothing here
//! uses the incomplete gamma function: the result is compared against the
//! closed diagonal form in [`crate::resolution`].
//!
//! Rings are integrated in parallel, each with its own compensated
//! accumulators, and then merged sequentially in radial order, so results
//! are bit-identical regardless of thread count.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{coherent_coefficient, coherent_coefficients, inner, ComplexAmplitude, FockVector};
use crate::numeric::{neumaier_sum, ComplexSum, NeumaierSum};
use crate::resolution::{apply, TruncatedResolution};

pub const MIN_RADIAL: usize = 2;
pub const MIN_ANGULAR: usize = 4;
pub const DEFAULT_CELLS: usize = 256;

/// Polar midpoint grid over the disk `|α| ≤ radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskGrid {
    radius: f64,
    n_radial: usize,
    n_angular: usize,
}

/// One quadrature node with its cell measure.
#[derive(Clone, Copy, Debug)]
pub struct Cell {
    pub alpha: ComplexAmplitude,
    pub weight: f64,
}

impl DiskGrid {
    pub fn new(radius: f64, n_radial: usize, n_angular: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid(format!("grid radius must be finite and > 0, got {radius}")));
        }
        if n_radial < MIN_RADIAL || n_angular < MIN_ANGULAR {
            return Err(Error::invalid(format!(
                "grid needs n_radial >= {MIN_RADIAL} and n_angular >= {MIN_ANGULAR}, got {n_radial}x{n_angular}"
            )));
        }
        Ok(Self { radius, n_radial, n_angular })
    }

    pub fn with_default_cells(radius: f64) -> Result<Self> {
        Self::new(radius, DEFAULT_CELLS, DEFAULT_CELLS)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn n_radial(&self) -> usize {
        self.n_radial
    }

    pub fn n_angular(&self) -> usize {
        self.n_angular
    }

    /// Same disk with both step sizes halved.
    pub fn refined(&self) -> Self {
        Self { n_radial: 2 * self.n_radial, n_angular: 2 * self.n_angular, ..*self }
    }

    fn ds(&self) -> f64 {
        self.radius / self.n_radial as f64
    }

    fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_angular as f64
    }

    /// Cells of ring `i` in angular order.
    pub fn ring(&self, i: usize) -> impl Iterator<Item = Cell> + '_ {
        let ds = self.ds();
        let dt = self.dtheta();
        let s = (i as f64 + 0.5) * ds;
        let weight = s * ds * dt;
        (0..self.n_angular).map(move |j| {
            let theta = (j as f64 + 0.5) * dt;
            let alpha = ComplexAmplitude::from_polar(s, theta).expect("finite grid node");
            Cell { alpha, weight }
        })
    }

    /// All cells, radial-major.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.n_radial).flat_map(move |i| self.ring(i))
    }

    /// `Σ μ(cell)`; equals `π r²` for the midpoint rule.
    pub fn total_weight(&self) -> f64 {
        neumaier_sum(self.cells().map(|c| c.weight))
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }
}

/// `KxL` grid dimensions as written on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridShape {
    pub n_radial: usize,
    pub n_angular: usize,
}

impl GridShape {
    pub fn on(&self, radius: f64) -> Result<DiskGrid> {
        DiskGrid::new(radius, self.n_radial, self.n_angular)
    }
}

impl Default for GridShape {
    fn default() -> Self {
        Self { n_radial: DEFAULT_CELLS, n_angular: DEFAULT_CELLS }
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_radial, self.n_angular)
    }
}

impl FromStr for GridShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("grid must look like KxL, got `{s}`"));
        let (k, l) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let n_radial = k.trim().parse().map_err(|_| bad())?;
        let n_angular = l.trim().parse().map_err(|_| bad())?;
        if n_radial < MIN_RADIAL || n_angular < MIN_ANGULAR {
            return Err(bad());
        }
        Ok(Self { n_radial, n_angular })
    }
}

/// `⟨α|v⟩` at every cell, radial-major, alongside the truncated `|α⟩`.
fn ring_integrand(grid: &DiskGrid, v: &FockVector, i: usize) -> Vec<(Cell, FockVector, Complex64)> {
    grid.ring(i)
        .map(|cell| {
            let coh = coherent_coefficients(cell.alpha, v.dim()).expect("grid nodes are finite");
            let amp = inner(&coh, v);
            (cell, coh, amp)
        })
        .collect()
}

fn merge_rings(dim: usize, rings: Vec<Vec<Complex64>>) -> Vec<Complex64> {
    let mut acc = vec![ComplexSum::new(); dim];
    for ring in rings {
        for (a, z) in acc.iter_mut().zip(ring) {
            a.add(z);
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

/// `π⁻¹ Σ_cells |α⟩⟨α|v⟩ μ(cell)`, accumulated mode by mode.
pub fn quad_resolution(v: &FockVector, grid: &DiskGrid) -> FockVector {
    let dim = v.dim();
    let rings: Vec<Vec<Complex64>> = (0..grid.n_radial)
        .into_par_iter()
        .map(|i| {
            let mut acc = vec![ComplexSum::new(); dim];
            for (cell, coh, amp) in ring_integrand(grid, v, i) {
                let scale = amp * cell.weight;
                for (a, c) in acc.iter_mut().zip(coh.coeffs()) {
                    a.add(c * scale);
                }
            }
            acc.iter().map(|a| a.value()).collect()
        })
        .collect();
    let coeffs = merge_rings(dim, rings).into_iter().map(|z| z / PI).collect();
    FockVector::new(coeffs).expect("quadrature of finite data is finite")
}

/// `(2π)⁻¹ Σ_j e^{i(n-m)θ_j} Δθ` over the roots-of-unity nodes `θ_j = 2πj/N`.
///
/// Zero whenever `N ∤ (n - m)` and one when it divides. Phases are reduced
/// modulo `N` in integers before evaluation.
pub fn angular_orthogonality(n: usize, m: usize, n_angular: usize) -> Result<Complex64> {
    if n_angular == 0 {
        return Err(Error::invalid("n_angular must be >= 1"));
    }
    let big_n = n_angular as i128;
    let k = (n as i128 - m as i128).rem_euclid(big_n);
    let mut acc = ComplexSum::new();
    for j in 0..big_n {
        let idx = (k * j).rem_euclid(big_n);
        acc.add(Complex64::from_polar(1.0, 2.0 * PI * idx as f64 / n_angular as f64));
    }
    Ok(acc.value() / n_angular as f64)
}

/// Norm-integral checks on the integrand `f_α = |α⟩⟨α|v⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleCheck {
    /// `‖Σ f_α μ‖`, the norm of the (un-normalized) vector integral.
    pub lhs: f64,
    /// `Σ ‖f_α‖ μ`.
    pub rhs: f64,
    /// `π r² ‖v‖`, from the uniform bound `‖f_α‖ ≤ ‖v‖`.
    pub uniform_bound: f64,
    /// `Σ ‖f_α‖² μ`.
    pub sq_norm_integral: f64,
    /// `√(π r²) · √(Σ ‖f_α‖² μ)`, the Cauchy–Schwarz bound on `rhs`.
    pub cauchy_schwarz_bound: f64,
}

impl TriangleCheck {
    pub fn holds(&self) -> bool {
        let tol = 1e-12 * self.uniform_bound.max(1.0);
        self.lhs <= self.rhs + 1e-12
            && self.rhs <= self.uniform_bound + tol
            && self.sq_norm_integral.is_finite()
            && self.rhs <= self.cauchy_schwarz_bound + tol
    }
}

pub fn triangle_check(v: &FockVector, grid: &DiskGrid) -> TriangleCheck {
    let lhs = PI * quad_resolution(v, grid).norm();
    let per_ring: Vec<(f64, f64)> = (0..grid.n_radial)
        .into_par_iter()
        .map(|i| {
            let mut norm_int = NeumaierSum::new();
            let mut sq_int = NeumaierSum::new();
            for (cell, coh, amp) in ring_integrand(grid, v, i) {
                let f = coh.norm() * amp.norm();
                norm_int.add(f * cell.weight);
                sq_int.add(f * f * cell.weight);
            }
            (norm_int.value(), sq_int.value())
        })
        .collect();
    let rhs = neumaier_sum(per_ring.iter().map(|p| p.0));
    let sq_norm_integral = neumaier_sum(per_ring.iter().map(|p| p.1));
    TriangleCheck {
        lhs,
        rhs,
        uniform_bound: grid.area() * v.norm(),
        sq_norm_integral,
        cauchy_schwarz_bound: grid.area().sqrt() * sq_norm_integral.sqrt(),
    }
}

/// `|⟨f, quad(v)⟩ - π⁻¹ Σ ⟨f|f_α⟩ μ|`: the bra taken outside versus inside the sum.
pub fn bra_exchange_check(f: &FockVector, v: &FockVector, grid: &DiskGrid) -> f64 {
    let outside = inner(f, &quad_resolution(v, grid));
    let rings: Vec<Complex64> = (0..grid.n_radial)
        .into_par_iter()
        .map(|i| {
            let mut acc = ComplexSum::new();
            for (cell, coh, amp) in ring_integrand(grid, v, i) {
                acc.add(inner(f, &coh) * amp * cell.weight);
            }
            acc.value()
        })
        .collect();
    let mut acc = ComplexSum::new();
    rings.into_iter().for_each(|z| acc.add(z));
    (outside - acc.value() / PI).norm()
}

/// `‖quad(v) - w‖` where `w_n` integrates the `n`-th coefficient of the
/// integrand separately (term-wise integration, then vector assembly).
pub fn termwise_exchange_check(v: &FockVector, grid: &DiskGrid) -> f64 {
    let assembled = quad_resolution(v, grid);
    let cells: Vec<(Cell, Complex64)> = grid
        .cells()
        .map(|cell| {
            let coh = coherent_coefficients(cell.alpha, v.dim()).expect("grid nodes are finite");
            (cell, inner(&coh, v))
        })
        .collect();
    let termwise: Vec<Complex64> = (0..v.dim())
        .into_par_iter()
        .map(|n| {
            let mut acc = ComplexSum::new();
            for (cell, amp) in &cells {
                acc.add(coherent_coefficient(cell.alpha, n) * amp * cell.weight);
            }
            acc.value() / PI
        })
        .collect();
    let w = FockVector::new(termwise).expect("finite");
    assembled.sub(&w).norm()
}

/// One row of a quadrature-versus-closed-form comparison.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureRow {
    pub grid: String,
    /// `‖quad(v) - A_r v‖`.
    pub error_vs_analytic: f64,
    pub triangle_lhs: f64,
    pub triangle_rhs: f64,
    /// Bra-exchange residual with `f = v`.
    pub bra_exchange_residual: f64,
    pub termwise_exchange_residual: f64,
}

/// Compares quadrature with the closed form on `levels` dyadic refinements
/// starting from `shape`.
pub fn quadrature_compare(v: &FockVector, radius: f64, shape: GridShape, levels: usize) -> Result<Vec<QuadratureRow>> {
    let res = TruncatedResolution::new(radius, v.dim())?;
    let exact = apply(&res, v)?;
    let mut grid = shape.on(radius)?;
    let mut rows = Vec::with_capacity(levels.max(1));
    for level in 0..levels.max(1) {
        if level > 0 {
            grid = grid.refined();
        }
        let quad = quad_resolution(v, &grid);
        let tri = triangle_check(v, &grid);
        rows.push(QuadratureRow {
            grid: format!("{}x{}", grid.n_radial, grid.n_angular),
            error_vs_analytic: quad.sub(&exact).norm(),
            triangle_lhs: tri.lhs,
            triangle_rhs: tri.rhs,
            bra_exchange_residual: bra_exchange_check(v, v, &grid),
            termwise_exchange_residual: termwise_exchange_check(v, &grid),
        });
    }
    Ok(rows)
}
