//! Tree codes and block codes built from base-3/2 exponential sums.
//!
//! A path `x ∈ {0,1}^n` in the infinite binary tree is mapped to a point
//! `β(x)` on the unit circle by repeatedly taking a square root of the cube of
//! the parent point, then rounded to one of `κ` sectors. Whether this labelling
//! has the tree-code distance property comes down to a bound on the exponential
//! sums
//!
//! ```text
//! 1 - δ_ℓ = max over odd z of Re (1/ℓ) Σ_{m<ℓ} e((2/3)^m z / 2^ℓ)
//! ```
//!
//! which the [`verifier`] computes exactly by branch and bound.
//!
//! Modules:
//! - [`numeric`]: exact dyadic angles, `Z/2^ℓ` arithmetic.
//! - [`treecode`]: the labelling `α = γ ∘ β`, the tree and Hamming metrics,
//!   the inner-product distance bound, and exhaustive distance audits.
//! - [`blockcode`]: the block-code analogue over `Z/2^n`.
//! - [`verifier`]: `1 - δ_ℓ` by brute force and by branch and bound, greedy
//!   baselines, and the alphabet size the values certify.
//! - [`base32`]: signed residues, the five-branch map and base-3/2
//!   representations of one.
//! - [`cli`]: the `treecodes` command-line tool and its CSV/SVG formats.

pub mod base32;
pub mod blockcode;
pub mod cli;
pub mod numeric;
pub mod reference;
pub mod treecode;
pub mod verifier;

pub use numeric::{DyadicAngle, OddResidue, UnitPoint};

/// Errors returned by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} = {value} exceeds the limit of {limit}")]
    ResourceLimit {
        what: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
