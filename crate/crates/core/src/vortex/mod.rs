//! Point-vortex dynamics: the direct N-body right-hand side, adaptive RK5(4)
//! integration with dense output, conserved-quantity diagnostics, collapse
//! detection, the flow pushforward of atomic samples, and the weak-form
//! residual connecting the particle system to the measure-valued equation.

pub mod dopri5;
pub mod dynamics;
pub mod fastk;
pub mod state;

pub use dynamics::{
    flow_pushforward, flow_pushforward_opts, hamiltonian, hamiltonian_opts, integrate,
    integrate_opts, rhs, rhs_opts, weak_pair_kernel, weak_residual, VortexOptions,
    COLLAPSE_THRESHOLD,
};
pub use fastk::FastBiotSavart;
pub use state::{Trajectory, VortexState};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum VortexError {
    #[error("minimum separation {min_sep} below the collapse threshold")]
    NearCollapse { min_sep: f64 },
    #[error("vortices {pair:?} collapsed at t = {time}")]
    CollapseDetected { time: f64, pair: (usize, usize) },
    #[error("step budget exhausted at t = {time} (minimum separation {min_sep})")]
    StepBudgetExceeded { time: f64, min_sep: f64 },
    #[error("coincident vortex positions")]
    CoincidentPoints,
    #[error("sample has a Gaussian part or drift; the flow transports atoms only")]
    NotPureAtomic,
    #[error("time outside the trajectory range")]
    OutOfRange,
    #[error("invalid vortex state: {0}")]
    InvalidState(String),
}
