//! Exact and numerical laboratory for discrete singular Radon transforms on
//! step-2 nilpotent lattice groups.
//!
//! - [`group`]: arithmetic in G₀(d) and general step-2 groups.
//! - [`poly`], [`seq`]: polynomial sequences, differencing, the transference morphism.
//! - [`kernels`]: Calderón–Zygmund kernels and their dyadic pieces K_j.
//! - [`transform`]: exact sparse application of H_j, H^R, block sums; norm estimates.
//! - [`expsums`]: the polynomials D, D̃, complete sums S(a/q), Weyl sums, oscillatory integrals.
//! - [`ortho`]: pattern-supremum quantities of the almost-orthogonality lemma.

pub mod dyadic;
pub mod error;
pub mod expsums;
pub mod group;
pub mod kernels;
pub mod ortho;
pub mod poly;
pub mod quad;
pub mod rng;
pub mod seq;
pub mod transform;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
