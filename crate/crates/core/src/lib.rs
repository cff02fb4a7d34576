//! Synthesis and verification of hidden-variable models for finite sets of
//! quantum measurements.
//!
//! The crate is `no_std` with `alloc`. Everything here is a pure function of
//! its inputs; file formats and the command line live in the `hvforge` crate.
//!
//! Module map:
//! - [`bloch`]: generalized Gell-Mann algebra, Born probabilities and
//!   measurement sets.
//! - [`polytope`]: constraint polytopes, vertex enumeration, facet counting
//!   and the combinatorial bounds.
//! - [`hv`]: hidden-variable states, the staircase decomposition and model
//!   construction.
//! - [`symmetry`]: rotation groups, their action on deterministic states and
//!   orbit-union search.
//! - [`verify`]: exact and Monte Carlo verification, Kochen-Specker search and
//!   the convergence study.
//! - [`presets`]: the named measurement geometries.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bloch;
mod error;
pub mod hv;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod presets;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};

/// Numerical tolerances shared by every geometric check.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    /// Feasibility / invariant tolerance.
    pub eps: f64,
    /// Euclidean distance below which two points are the same vertex.
    pub dedup: f64,
}

impl Tolerance {
    pub const DEFAULT_EPS: f64 = 1e-9;
    pub const DEFAULT_DEDUP: f64 = 1e-7;

    pub fn with_eps(eps: f64) -> Self {
        Self { eps, ..Self::default() }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps: Self::DEFAULT_EPS,
            dedup: Self::DEFAULT_DEDUP,
        }
    }
}
