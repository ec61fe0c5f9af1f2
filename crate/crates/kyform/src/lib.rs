//! Exact solver and verification toolkit for left-invariant Killing-Yano
//! 2-forms on metric Lie algebras, specializing in 2-step nilpotent algebras
//! and the algebras arising from simple graphs.
//!
//! The library computes the full solution space of the Killing-Yano equation
//! in exact rational arithmetic (an approximate `f64` mode exists for
//! irrational metrics), decomposes algebras along a Killing-Yano tensor, and
//! extracts the bi-invariant complex structure an invertible one induces.
//!
//! Entry points:
//! - [`algebra::MetricLieAlgebra`]: structure constants plus an inner product.
//! - [`connection::levi_civita`]: the Levi-Civita connection table.
//! - [`ky`]: the solvers (generic, 2-step fast path, Codazzi, commuting-skew)
//!   and membership certificates.
//! - [`structure`]: kernel/image splitting, eigen-blocks, complex-structure
//!   extraction and canonical block forms.
//! - [`graphs`]: 2-step nilpotent algebras built from simple graphs, their
//!   complexifications and canonical Killing-Yano tensors.

pub mod algebra;
pub mod algnum;
pub mod connection;
pub mod eigen;
pub mod exec;
pub mod ky;
pub mod linalg;
pub mod scalar;

pub use algebra::{AlgebraError, Endo, MetricLieAlgebra, Subspace, ZavSplit};
pub use connection::{levi_civita, ConnectionTable};
pub use exec::Execution;
pub use linalg::Mat;
pub use scalar::{Rat, Ring, Scalar};
