//! Numerical laboratory for four explicit families of rotational surfaces
//! whose geodesic flows are superintegrable and all of whose geodesics close:
//! a Zoll family on the sphere, Tannery's pear, a one-parameter generalization
//! of the pear, and a Zoll family on an orbifold with one conical point.
//!
//! Every metric has the form g = A²(θ) dθ² + sin²θ dφ² on the open strip
//! θ ∈ (0, π), with a family-specific profile function A. The crate provides:
//!
//! - [`surfaces`]: the families, their parameter domains, the profile A and
//!   its analytic derivative, the original algebraic charts (v, w, x) the
//!   metrics were constructed in, and chart/metric consistency checks.
//! - [`flow`]: the geodesic Hamiltonian on the 2E = 1 shell (arclength
//!   parametrization), adaptive Runge-Kutta integration with dense output,
//!   and turning-point location.
//! - [`invariants`]: the cubic-in-momenta first integrals S₁, S₂, their
//!   coefficient functions (α, β, γ), the algebraic constraint tying
//!   S₁² + S₂² to a cubic polynomial in (2H, p_φ²), and drift reports.
//! - [`closure`]: the rotation function R(g, i), rational (p, q)
//!   classification, closed-form parametric geodesics, and numeric closure
//!   verification against the flow.
//! - [`geometry`]: Gaussian curvature, surface measure, isometric embedding
//!   profiles in ℝ³, and mesh/polyline export.
//!
//! All operations are pure functions over immutable value types and are safe
//! to call concurrently.

pub mod closure;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod invariants;
pub mod numeric;
pub mod surfaces;

pub use error::{Error, Result};
pub use surfaces::SurfaceSpec;
