//! Domains, Green functions, Biot–Savart kernels, test functions, the
//! symmetrized interaction kernel H_φ, and quadrature rules.

pub mod domain;
pub mod ewald;
pub mod hphi;
pub mod quad;
pub mod testfn;
pub mod vec2;

pub use domain::{disk_grad_green, disk_green, Domain, DomainKind, GeometryError};
pub use hphi::{h_kernel, h_kernel_bound, row_integral, singular_integral, DIAGONAL_EPS};
pub use quad::{gauss_legendre, integrate, integrate_to_tol, quadrature};
pub use testfn::{Phase, TestFunction, TestFunctionError, TestFunctionSpec};
pub use vec2::Vec2;
