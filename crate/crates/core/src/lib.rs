//! Truncated coherent-state resolution of the identity on Fock space.
//!
//! The operator `A_r = π⁻¹ ∫_{|α|≤r} |α⟩⟨α| d²α` is diagonal in the Fock
//! basis with eigenvalues `I_n(r²)`, the regularized lower incomplete gamma
//! function at integer order. This crate evaluates that closed form
//! ([`gamma`], [`resolution`]), rebuilds it independently by polar disk
//! quadrature ([`quadrature`]), and runs convergence diagnostics: strong
//! convergence to the identity, monotone boundedness, and the basis-vector
//! witnesses showing there is no norm limit.

// NaN must fail checks, so comparisons are negated on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod check;
pub mod error;
pub mod fock;
pub mod gamma;
pub mod numeric;
pub mod quadrature;
pub mod resolution;
pub mod study;

pub use error::{Error, Result};
pub use fock::{coherent_coefficients, inner, norm, ComplexAmplitude, FockVector};
pub use gamma::{gamma_limit_check, gamma_oracle, gamma_table, GammaTable};
pub use quadrature::DiskGrid;
pub use resolution::{ConvergenceReport, TruncatedResolution};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
