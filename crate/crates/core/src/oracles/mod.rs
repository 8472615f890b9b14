//! Independent ground-truth computations for tests and acceptance runs.

pub mod convolution;
pub mod gaussian;
pub mod implicit;
pub mod quadrature;

pub use convolution::{brute_convolution, SingularityRule, MAX_BRUTE_N};
pub use gaussian::{gaussian_free_closed_form, gaussian_free_sup};
pub use implicit::{implicit_richardson, implicit_stepper};
pub use quadrature::{QuadResult, RadialQuadrature};
