//! Coefficient-level numerics for de Branges–Rovnyak spaces `H(b)`.
//!
//! Every object is a truncated Taylor series ([`TaylorSeries`]) or a set of
//! samples on a circle grid ([`GridFunction`]). On top of that sit:
//!
//! - [`hardy`]: outer functions from boundary modulus, Pythagorean mates,
//!   Smirnov-quotient pairs, Blaschke products and reproducing kernels;
//! - [`toeplitz`]: coanalytic Toeplitz operators, the finite-section
//!   membership solver for `T_{b̄} f = T_{ā} g`, and a kernel search probe;
//! - [`norms`]: the coefficient norm formula, partial-sum traces with
//!   dyadic-block verdicts, Sobolev checks, the `a_ε` limit sweep and Abel
//!   traces;
//! - [`rational`]: Fejér–Riesz factorization, exact rational pairs,
//!   circle poles, the membership decomposition and the gap-series example;
//! - [`counterexamples`]: Blaschke-product counterexamples and their
//!   divergence certificates.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![cfg_attr(test, allow(unused_imports))]

extern crate alloc;

mod error;
pub mod fft;
mod linalg;
pub mod series;

pub mod counterexamples;
pub mod hardy;
pub mod norms;
pub mod rational;
pub mod toeplitz;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use series::{GridFunction, TaylorSeries};

/// Default truncation degree for boundary work.
pub const DEFAULT_DEGREE: usize = 16384;
/// Default grid size, twice the default degree.
pub const DEFAULT_GRID: usize = 2 * DEFAULT_DEGREE;
