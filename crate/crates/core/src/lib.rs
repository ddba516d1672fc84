//! Numerical toolkit for the Heisenberg group: group calculus, quasiregular
//! map audits, word growth and nets, and discrete nonlinear potential theory.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod growth;
pub mod heis;
pub mod maps;
pub mod scalar;
pub mod subelliptic;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use growth::{MarkedGroup, Net};
pub use heis::{HeisPoint, HorizontalVector, TangentVector};
