//! Hand-rolled numerical kernels: an embedded Runge-Kutta 5(4) pair with
//! dense output, adaptive Gauss-Kronrod quadrature, bracketed bisection, and
//! continued-fraction rational approximation.
//!
//! These are deliberately small, deterministic implementations: the rest of
//! the crate depends on byte-stable results, and every kernel here is frozen
//! by unit tests against closed-form references.

pub mod quad;
pub mod rational;
pub mod rk;
pub mod roots;
