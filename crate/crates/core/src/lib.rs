//! Riemann-sum integration built from tagged partitions, a log/exp tower
//! constructed from the integral of `1/t`, direct Riemann-sum evaluators for
//! the classical integrals, and numerical checks of the substitution rules,
//! both directions of the fundamental theorem, and the derivative table.
//!
//! Platform `ln`/`exp`/`powf` are not used outside tests; square roots and
//! the platform trigonometric functions are treated as primitives.

mod dd;
pub mod direct_eval;
pub mod elementary;
pub mod error;
pub mod expr;
pub mod format;
pub mod integrator;
pub mod partitions;
pub mod roots;
pub mod sum;
pub mod theorems;

pub use error::{Error, Result};
pub use partitions::{
    geometric_partition, mesh, riemann_sum, uniform_partition, uniform_riemann_sum, Integrand,
    Interval, TagRule, TaggedPartition,
};
