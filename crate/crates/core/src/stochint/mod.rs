//! First- and second-order stochastic integrals evaluated on fixed CRM
//! samples, the tensor-pairing relation, and closed-form moment oracles.
//!
//! Convention: I² is the ordered off-diagonal double integral of the
//! symmetrized kernel ("ordered-offdiag-sym") over X = M − a·dx. Atoms
//! contribute Σ_{i≠j}; the Gaussian part is the order-2 Wiener chaos.

pub mod integrals;
pub mod kernel;
pub mod oracle;

pub use integrals::{i1, i2, pairing_tensor, IntegralDecomposition};
pub use kernel::{CoeffMatrix, GaussianBlock, Kernel2};
pub use oracle::{moment_mc, moment_oracle, MomentInput, MomentTarget};

/// Convention tag recorded in experiment manifests for audit.
pub const CONVENTION: &str = "ordered-offdiag-sym";

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum StochIntError {
    #[error("kernel fails the symmetry check")]
    NonSymmetricKernel,
    #[error("finite-rank kernel rank exceeds the sample's Gaussian truncation")]
    RankTooHigh,
    #[error("function or kernel domain differs from the sample's")]
    DomainMismatch,
    #[error("Gaussian projection unsupported: {0}")]
    UnsupportedGaussianProjection(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
}
