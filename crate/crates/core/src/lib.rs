//! Quantumness of pure-state ensembles measured as the generalized
//! α-z-relative Rényi entropy of coherence of the ensemble's Gram matrix.
//!
//! The crate is organized bottom-up:
//!
//! - [`matfun`]: Hermitian eigendecomposition, support powers, entropies and
//!   the trace functional `f_{α,z}`.
//! - [`ensemble`]: pure-state ensembles, Gram and cross-Gram matrices,
//!   ensemble algebra, the six named ensembles and the JSON file format.
//! - [`coherence`]: the divergence, the coherence minimization over
//!   incoherent states (closed form at `z = 1`, multi-start optimizer
//!   otherwise), the `α → 1` limit and a brute-force grid oracle.
//! - [`quantifiers`]: ensemble quantumness and the comparison quantifiers
//!   (l1, commutator based, Holevo minus accessible information).
//! - [`verify`]: randomized property suites with replayable failure reports.

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherence;
pub mod ensemble;
pub mod error;
pub mod matfun;
pub mod optim;
pub mod quantifiers;
pub mod random;
pub mod verify;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
