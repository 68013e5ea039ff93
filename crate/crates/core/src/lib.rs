//! Finite-scale laboratory for Read-type operator constructions.
//!
//! The operator is never stored as a matrix. It is described by an
//! [`schedule::IntervalSchedule`] (lay-off intervals and fan working
//! intervals), and the orbit vectors `e_j = T^j e_0` are expanded lazily in
//! the canonical basis `(f_j)` by an [`operator::ExpansionTable`]. On top of
//! that engine sit the doubling search, the witness construction for the
//! Hypercyclicity Criterion and generic numerical criterion checkers.

pub mod criterion;
pub mod error;
pub mod numeric;
pub mod operator;
pub mod poly;
pub mod report;
pub mod schedule;
pub mod vector;

pub use error::{LabError, Result};
pub use poly::Polynomial;
pub use vector::{SpaceNorm, SparseVector};
