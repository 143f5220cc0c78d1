//! Numerical laboratory for completely random measures (CRMs) driving 2D
//! Euler point-vortex dynamics: Green functions and Biot–Savart kernels on
//! the torus and disk, CRM sampling and Lévy–Khintchine characteristic
//! functions, first- and second-order stochastic integrals, spectral triad
//! coefficients, point-vortex integration, and Monte Carlo invariance tests.

pub mod crm;
pub mod geometry;
pub mod invariance;
pub mod spectral;
pub mod stats;
pub mod stochint;
pub mod vortex;
