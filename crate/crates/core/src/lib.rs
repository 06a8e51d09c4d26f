//! Mahler-measure density bounds for orbits of integer linear recurrences on
//! the torus, the canonical p-adic basis of the lattice of integral
//! recurrences, and banded Toeplitz / Gram determinant tools.
//!
//! Polynomials are [`poly_core::IntPolynomial`] values; exact arithmetic
//! uses `num-bigint` and `num-rational`, and the few numeric paths carry
//! explicit error bounds.

// `!(x >= y)` comparisons are meant to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod density;
pub mod error;
pub mod exact_linalg;
pub mod lattice_structure;
mod lp;
pub mod mp;
pub mod poly_core;
pub mod recurrence_matrices;
pub mod toeplitz;

pub use error::{Error, Result};
