//! Completely random measures M ~ [a, q, ν]: characteristic triples,
//! sampling as concrete coefficient+atom realizations, Lévy–Khintchine
//! characteristic functions, and independence/stationarity tests.

pub mod cf;
pub mod hypothesis;
pub mod jumplaw;
pub mod sample;
pub mod sets;
pub mod triple;

pub use cf::{cf_levy_khintchine, empirical_cf};
pub use hypothesis::{hypothesis_tests, sample_measure_values, HypothesisReport};
pub use jumplaw::{JumpLaw, JumpLawError, JumpLawSpec};
pub use sample::{sample_crm, w_modes, CRMSample};
pub use sets::{measure_of_set, PreparedSet, SetSpec};
pub use triple::CRMTriple;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CRMError {
    #[error("gaussian variance multiplier q must be nonnegative")]
    NegativeVariance,
    #[error(transparent)]
    JumpLaw(#[from] JumpLawError),
    #[error("empty input")]
    EmptyInput,
    #[error("sets overlap on a region of positive measure")]
    OverlappingSets,
    #[error("set-based Gaussian evaluation requires the torus")]
    UnsupportedDomain,
    #[error("invalid set specification: {0}")]
    InvalidSet(String),
}
