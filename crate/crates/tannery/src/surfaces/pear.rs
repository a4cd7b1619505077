//! Closed forms for Tannery's pear: profile A = 2 + cos θ, the rational
//! w-chart w = (1+cos θ)/(1−cos θ), cubic-integral coefficients, curvature,
//! and the explicit embedding in three-space.

/// Height of the embedded surface from the regular pole (θ = π) to the
/// conical vertex (θ = 0).
pub(crate) const TOTAL_HEIGHT: f64 = 5.656854249492381; // 4 sqrt(2)

pub(crate) fn profile_value(c: f64) -> f64 {
    2.0 + c
}

pub(crate) fn profile_slope(s: f64) -> f64 {
    -s
}

/// w = (1+c)/(1−c) = cot²(θ/2), decreasing from ∞ at θ = 0 to 0 at θ = π.
/// The half-angle form keeps full relative precision at both poles, where
/// 1 ± c would cancel.
pub(crate) fn w_of_theta(theta: f64) -> f64 {
    let t = (0.5 * theta).tan();
    1.0 / (t * t)
}

/// Closed-form inverse of the w-chart; stable for both tiny and huge w.
pub(crate) fn theta_of_w(w: f64) -> f64 {
    2.0 * (1.0 / w.sqrt()).atan()
}

/// dw/dθ = −2 sin θ/(1−cos θ)² = −cos(θ/2)/sin³(θ/2).
pub(crate) fn dw_dtheta(theta: f64) -> f64 {
    let (hs, hc) = (0.5 * theta).sin_cos();
    -hc / (hs * hs * hs)
}

/// Diagonal metric components (g_ww, g_φφ) in the native w-chart.
pub(crate) fn metric_components(w: f64) -> (f64, f64) {
    let one_w = 1.0 + w;
    let three_w = 1.0 + 3.0 * w;
    (
        three_w * three_w / (w * one_w.powi(4)),
        4.0 * w / (one_w * one_w),
    )
}

/// Cubic-integral coefficients (α, β, γ) at the point (s, c).
pub(crate) fn coeffs(s: f64, c: f64) -> (f64, f64, f64) {
    let s2 = s * s;
    let opc = 1.0 + c;
    (-opc * opc / s2, -(1.0 + 2.0 * c) / s, opc * opc / (s2 * s))
}

/// θ-derivatives (α′, β′, γ′); β′ collapses to A/s² exactly.
pub(crate) fn coeff_slopes(s: f64, c: f64) -> (f64, f64, f64) {
    let s2 = s * s;
    let opc = 1.0 + c;
    (
        2.0 * opc / s + 2.0 * c * opc * opc / (s2 * s),
        (2.0 + c) / s2,
        -2.0 * opc / s2 - 3.0 * c * opc * opc / (s2 * s2),
    )
}

pub(crate) fn sigma() -> (f64, f64, f64) {
    (-2.0, 1.0, 0.0)
}

/// Gaussian curvature K = 2/(2+c)³, ranging over [2/27, 2].
pub(crate) fn curvature(c: f64) -> f64 {
    2.0 / (2.0 + c).powi(3)
}

/// The explicit global embedding: a surface of revolution with radius sin θ
/// and height 4√2 sin(θ/2) above the conical vertex at the origin.
pub(crate) fn embed(theta: f64, phi: f64) -> (f64, f64, f64) {
    let s = theta.sin();
    (
        s * phi.cos(),
        s * phi.sin(),
        TOTAL_HEIGHT * (0.5 * theta).sin(),
    )
}

/// Embedded radius as a function of the chart value, 2√w/(1+w) = sin θ.
pub(crate) fn radius_w(w: f64) -> f64 {
    2.0 * w.sqrt() / (1.0 + w)
}

pub(crate) fn radius_slope_w(w: f64) -> f64 {
    (1.0 - w) / (w.sqrt() * (1.0 + w) * (1.0 + w))
}

/// Squared height slope (dB/dw)² = 8/(1+w)³.
pub(crate) fn bprime_sq(w: f64) -> f64 {
    8.0 / (1.0 + w).powi(3)
}

/// Axial height coordinate measured from the regular pole (w = 0), in
/// closed form; rises to the full height 4√2 at the conical vertex.
pub(crate) fn height_w(w: f64) -> f64 {
    TOTAL_HEIGHT * (1.0 - 1.0 / (1.0 + w).sqrt())
}
