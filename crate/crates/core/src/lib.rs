//! Explicit Boolean matrices with many zeros, no 2x2 all-zero block, and a
//! polylogarithmic cover by all-one rectangles.
//!
//! The matrix is the non-incidence matrix between the points and lines of
//! `{1..m} x {1..2m^2}` ([`construction`]). Its one-entries are covered by
//! rectangles indexed by a prime and three residues ([`cover`]). The
//! [`optimize`] module computes covering numbers of arbitrary small matrices
//! to compare against.

pub mod boolmat;
pub mod cli;
pub mod construction;
pub mod cover;
pub mod error;
pub mod formats;
pub mod optimize;
pub mod primes;

pub use boolmat::{BoolMatrix, Rectangle, ZeroBlock};
pub use construction::{build, exact_zero_count, IncidenceInstance};
pub use cover::{CoverPlan, Mode, PrimePlan};
pub use error::{Error, Result};
pub use optimize::{CoverStats, SolverLimits};
