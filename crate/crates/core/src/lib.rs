//! Numerical laboratory for operator moduli of continuity on finite matrices.
//!
//! The crate computes Schur multiplier norms of divided-difference matrices
//! with two-sided certificates, checks double-operator-integral identities,
//! builds explicit commutator witnesses, evaluates Fourier-side norm bounds
//! and sampling identities, and writes the results as comparison records.

pub mod error;
pub mod fourier;
pub mod func;
pub mod linalg;
pub mod modulus;
pub mod numeric;
pub mod par;
pub mod report;
pub mod sampling;
pub mod schur;

pub use error::{Error, Result};
pub use func::{DiagonalRule, Grid, ScalarFn};
pub use linalg::{CMat, HermitianMatrix, C64};
