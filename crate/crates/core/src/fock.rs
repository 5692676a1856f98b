//! Truncated Fock-space vectors and canonical coherent states.
//!
//! A [`FockVector`] holds the amplitudes `c_0..c_N` of `Σ c_n |n⟩`. All
//! reductions (inner products, norms) use compensated summation so that
//! vectors with thousands of modes keep ~1e-15 relative accuracy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{ln_factorial, scaled_l2, ComplexSum};

/// Complex coherent amplitude `α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    pub re: f64,
    pub im: f64,
}

impl ComplexAmplitude {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::invalid(format!("non-finite coherent amplitude ({re}, {im})")));
        }
        Ok(Self { re, im })
    }

    pub fn from_polar(modulus: f64, phase: f64) -> Result<Self> {
        let z = Complex64::from_polar(modulus, phase);
        Self::new(z.re, z.im)
    }

    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn modulus_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn phase(&self) -> f64 {
        self.im.atan2(self.re)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Finite coefficient sequence on the first `dim` Fock modes.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    coeffs: Vec<Complex64>,
}

impl FockVector {
    /// Rejects empty input and non-finite coefficients.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::invalid("Fock vector needs at least one mode"));
        }
        if let Some(n) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid(format!("non-finite coefficient at mode {n}")));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// The basis vector `|m⟩` in dimension `dim`.
    pub fn basis(m: usize, dim: usize) -> Result<Self> {
        if m >= dim {
            return Err(Error::invalid(format!("mode {m} outside dimension {dim}")));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        coeffs[m] = Complex64::new(1.0, 0.0);
        Ok(Self { coeffs })
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of mode `n`; zero beyond the stored dimension.
    pub fn get(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Copy padded with zeros (or truncated) to `dim` modes.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(dim, Complex64::new(0.0, 0.0));
        Self::new(coeffs)
    }

    pub fn norm_sq(&self) -> f64 {
        let n = self.norm();
        n * n
    }

    /// `‖v‖ = √⟨v|v⟩`, scaled against underflow: zero iff every coefficient is zero.
    pub fn norm(&self) -> f64 {
        scaled_l2(self.coeffs.iter().map(|c| c.norm()))
    }

    /// `Σ_{n > k} |c_n|²`, the squared tail beyond mode `k`.
    pub fn tail_norm_sq(&self, k: usize) -> f64 {
        let t = scaled_l2(self.coeffs.iter().skip(k + 1).map(|c| c.norm()));
        t * t
    }

    /// `v - w`, zero-padding the shorter operand.
    pub fn sub(&self, other: &FockVector) -> FockVector {
        let dim = self.dim().max(other.dim());
        let coeffs = (0..dim).map(|n| self.get(n) - other.get(n)).collect();
        FockVector { coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Result<FockVector> {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }
}

/// `⟨lhs|rhs⟩ = Σ conj(c_n) d_n`; the shorter vector is zero-padded.
pub fn inner(lhs: &FockVector, rhs: &FockVector) -> Complex64 {
    let mut acc = ComplexSum::new();
    for (c, d) in lhs.coeffs.iter().zip(&rhs.coeffs) {
        acc.add(c.conj() * d);
    }
    acc.value()
}

pub fn norm(v: &FockVector) -> f64 {
    v.norm()
}

/// Single coefficient `e^{-|α|²/2} αⁿ / √n!`, evaluated as log-modulus plus phase.
pub fn coherent_coefficient(alpha: ComplexAmplitude, n: usize) -> Complex64 {
    let r2 = alpha.modulus_sq();
    if r2 == 0.0 {
        return if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    let ln_mod = -0.5 * r2 + n as f64 * alpha.modulus().ln() - 0.5 * ln_factorial(n);
    Complex64::from_polar(ln_mod.exp(), n as f64 * alpha.phase())
}

/// Coefficients of the coherent state `|α⟩` on modes `0..dim`.
///
/// The norm of the result is `Q_{dim-1}(|α|²)`: the truncated state lacks
/// the Poisson tail beyond the last mode.
pub fn coherent_coefficients(alpha: ComplexAmplitude, dim: usize) -> Result<FockVector> {
    if dim == 0 {
        return Err(Error::invalid("coherent state needs dim >= 1"));
    }
    let alpha = ComplexAmplitude::new(alpha.re, alpha.im)?;
    let r2 = alpha.modulus_sq();
    if r2 == 0.0 {
        return FockVector::basis(0, dim);
    }
    let ln_r = alpha.modulus().ln();
    let theta = alpha.phase();
    let coeffs = (0..dim)
        .map(|n| {
            let ln_mod = -0.5 * r2 + n as f64 * ln_r - 0.5 * ln_factorial(n);
            Complex64::from_polar(ln_mod.exp(), n as f64 * theta)
        })
        .collect();
    FockVector::new(coeffs)
}
