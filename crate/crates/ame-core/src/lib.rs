//! Construction, factorization, and verification of perfect tensors and
//! absolutely maximally entangled states built from linear maps over finite
//! fields.
//!
//! The toolkit covers:
//! - exact GF(p^n) arithmetic with integer-coded elements ([`field`]);
//! - dense finite-field linear algebra, superregularity tests, and Cauchy
//!   matrices ([`matrix`]);
//! - orthogonal arrays from classical bijective maps, strength verification,
//!   and the combinatorial unitarity checks ([`oa`]);
//! - closed-form three-gate decompositions of 3x3 superregular matrices and
//!   the Yang-Baxter family ([`factor6`]);
//! - six-gate decompositions of 4x4 matrices ([`factor8`]);
//! - controlled-Z graph states, the block incidence construction, circuit
//!   plans, and numeric uniformity checks ([`graphstate`]);
//! - exhaustive and seeded-random censuses of superregular and factorizable
//!   matrices ([`census`]).

pub mod census;
pub mod factor6;
pub mod factor8;
pub mod field;
pub mod graphstate;
pub mod matrix;
pub mod oa;
pub mod records;
pub mod rng;

pub use field::{Field, FieldElement, FieldError};
pub use matrix::{FFMatrix, MatrixError, Minor, Slot};
