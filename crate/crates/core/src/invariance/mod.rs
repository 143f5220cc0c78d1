//! Cylinder observables F(M) = f(I¹(φ₁),…,I¹(φ_n)), the Liouville-type
//! generator 𝒜F = Σ ∂_k f·I²(H_{φ_k}), and the Monte Carlo suites testing
//! infinitesimal invariance (E[𝒜F] = 0), skew-symmetry, flow invariance in
//! law, and the per-sample algebraic cancellations behind those statements.

pub mod cancel;
pub mod generator;
pub mod mc;
pub mod observable;

pub use cancel::{a_reduction_defect, gaussian_cancellation, mixed_cancellation, TriadTensor};
pub use generator::{eval_observable, generator_apply, PreparedObservable};
pub use mc::{
    flow_invariance_test, mc_generator_mean, mc_generator_mean_detailed, skew_symmetry_test,
    skew_symmetry_test_detailed, FlowInvarianceReport, FLOW_CF_GRID, M_W_GENERATOR,
};
pub use observable::{CylinderObservable, ObservableSpec, OuterFn};

use crate::crm::CRMError;
use crate::stochint::StochIntError;
use crate::vortex::VortexError;

#[derive(Debug, thiserror::Error, Clone)]
pub enum InvarianceError {
    #[error("observable needs at least one test function")]
    EmptyObservable,
    #[error("frequency vector length differs from the number of test functions")]
    LengthMismatch,
    #[error("test functions live on a different domain than the sample")]
    DomainMismatch,
    #[error(transparent)]
    StochInt(#[from] StochIntError),
    #[error(transparent)]
    Vortex(#[from] VortexError),
    #[error(transparent)]
    Crm(#[from] CRMError),
    #[error(transparent)]
    TestFunction(#[from] crate::geometry::TestFunctionError),
    #[error("flow invariance requires a pure-atom triple (a = 0, q = 0, finite ν)")]
    NotPureAtomicTriple,
}
