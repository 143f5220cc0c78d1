//! Eigenbasis of −Δ on the torus, spectral projections, and the triad
//! coefficients C_{h,k,ℓ} with their structural identities.

pub mod basis;
pub mod triads;

pub use basis::{basis, project, EigenMode, ModeIndex, Projection};
pub use triads::{lemma41_check, triad_closed_form, triad_quadrature, TriadMethod, TriadTable};
