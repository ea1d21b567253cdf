//! # qfig-core
//!
//! Monotone quantum Fisher information metrics, quantum χ² divergences and
//! Petz-type recovery maps on finite-dimensional systems.
//!
//! The crate is `no_std` (it needs `alloc`) and purely numerical: every
//! value is an immutable dense complex matrix or a scalar derived from one.
//! IO, file formats and the command-line front end live in the `qfig` crate.
//!
//! ## Modules
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`operators`] | validated Hermitian / density operators, spectral calculus, norms, tensor and partial trace |
//! | [`quadrature`] | Gauss–Legendre panels, the β probability measure, half-line tanh-sinh rule, adaptive Simpson |
//! | [`channels`] | Kraus channels, adjoints, Petz / rotated / universal / averaged recovery, contraction operators |
//! | [`metrics`] | Morozova–Chentsov kernels, `𝕁_ρ^g`, integral representation, WYD Hessian reference |
//! | [`divergences`] | χ²_g, relative entropy, D_max, sandwiched D₂ |
//! | [`families`] | differentiable state families, QFI, SLD, RLD–SLD gap, the full-rank qubit counter-example |
//! | [`recovery`] | executable recovery bounds and sufficiency tests |
//! | [`asymmetry`] | coherence QFI, WYD skew information, covariant recovery harness |
//!
//! ## Conventions
//!
//! - Superoperators use column-stacking vectorization: `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
//!   nalgebra matrices are column-major, so `vec(X)` is `X.as_slice()`.
//! - The Hilbert–Schmidt inner product is `⟨A, B⟩ = tr(A* B)`.
//! - Logarithms are natural.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod asymmetry;
pub mod channels;
pub mod divergences;
pub mod error;
pub mod families;
pub mod metrics;
pub mod operators;
pub mod quadrature;
pub mod random;
pub mod recovery;

pub use channels::QuantumChannel;
pub use error::{Error, Result};
pub use metrics::MonotoneMetric;
pub use operators::{CMat, DensityOperator, Eigensystem, HermitianOperator};
pub use recovery::BoundReport;

pub use num_complex::Complex64;
