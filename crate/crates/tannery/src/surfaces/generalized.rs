//! Closed forms for the one-parameter family deforming Tannery's pear:
//! profile A = 2 + cos θ / R with R = √(1 + ϱ sin²θ), ϱ = (1−a)/(1+a).
//! The w-chart and its inverse are algebraic; the forward map is evaluated
//! piecewise to avoid the 1 + cR cancellation on the lower hemisphere.

pub(crate) fn rho(a: f64) -> f64 {
    (1.0 - a) / (1.0 + a)
}

pub(crate) fn radical(a: f64, s: f64) -> f64 {
    (1.0 + rho(a) * s * s).sqrt()
}

pub(crate) fn profile_value(a: f64, s: f64, c: f64) -> f64 {
    2.0 + c / radical(a, s)
}

pub(crate) fn profile_slope(a: f64, s: f64, c: f64) -> f64 {
    let rh = rho(a);
    let r = radical(a, s);
    -s / r - rh * s * c * c / (r * r * r)
}

/// Forward chart map w(θ) = −a + (1+a)(1 + cR)/s². For c ≤ 0 the factor
/// 1 + cR loses all digits near θ = π, so the algebraically equal form
/// (1+a)(1 − ϱc²)/(1 − cR) is used there.
pub(crate) fn w_of_theta(a: f64, s: f64, c: f64) -> f64 {
    let rh = rho(a);
    let r = radical(a, s);
    if c > 0.0 {
        -a + (1.0 + a) * (1.0 + c * r) / (s * s)
    } else {
        // Factored lower-hemisphere form: the naive -a + (1+a)(...) loses
        // all relative precision as w -> 0 at the regular pole. Here the
        // bracket stays O(1) without cancellation for every a in (-1, 1).
        let den = 1.0 - c * r;
        s * s * (a * (1.0 - rh * c * c) / den + (1.0 - a)) / den
    }
}

pub(crate) fn dw_dtheta(a: f64, s: f64, c: f64) -> f64 {
    let rh = rho(a);
    let r = radical(a, s);
    if c > 0.0 {
        let num = (-s * r + rh * s * c * c / r) * s - 2.0 * c * (1.0 + c * r);
        (1.0 + a) * num / (s * s * s)
    } else {
        let den = 1.0 - c * r;
        let num = 2.0 * rh * c * s * den - (1.0 - rh * c * c) * s * (r * r - rh * c * c) / r;
        (1.0 + a) * num / (den * den)
    }
}

/// Closed-form inverse: sin²θ = 2w(1+a)/(w² + 2aw + 1), with θ on the
/// upper hemisphere exactly when w > 1.
pub(crate) fn theta_of_w(a: f64, w: f64) -> f64 {
    let p = w * w + 2.0 * a * w + 1.0;
    let s2 = 2.0 * w * (1.0 + a) / p;
    let s = s2.min(1.0).sqrt();
    if w > 1.0 {
        s.asin()
    } else {
        std::f64::consts::PI - s.asin()
    }
}

/// Diagonal metric components (g_ww, g_φφ) in the native w-chart.
pub(crate) fn metric_components(a: f64, w: f64) -> (f64, f64) {
    let p = w * w + 2.0 * a * w + 1.0;
    let three_w = 1.0 + 3.0 * w;
    (three_w * three_w / (p * p * w), 4.0 * w / p)
}

/// 1 + c² + 2cR: cancels to O(s²) at the lower pole, so the conjugate
/// quotient is used for c < 0.
fn alpha_combo(rh: f64, s: f64, c: f64, r: f64) -> f64 {
    if c >= 0.0 {
        1.0 + c * c + 2.0 * c * r
    } else {
        let s2 = s * s;
        s2 * (s2 - 4.0 * rh * c * c) / (1.0 + c * c - 2.0 * c * r)
    }
}

/// 2c + (1 + c²)R, conjugated against the same lower-pole cancellation.
fn gamma_combo(rh: f64, s: f64, c: f64, r: f64) -> f64 {
    if c >= 0.0 {
        2.0 * c + (1.0 + c * c) * r
    } else {
        let s2 = s * s;
        let e = 1.0 + c * c;
        -s2 * (s2 + rh * e * e) / (2.0 * c - e * r)
    }
}

/// c + R and 1 + cR, conjugated likewise.
fn c_plus_radical(rh: f64, s: f64, c: f64, r: f64) -> f64 {
    if c >= 0.0 {
        c + r
    } else {
        s * s * (1.0 + rh) / (r - c)
    }
}

fn one_plus_cr(rh: f64, s: f64, c: f64, r: f64) -> f64 {
    if c >= 0.0 {
        1.0 + c * r
    } else {
        s * s * (1.0 - rh * c * c) / (1.0 - c * r)
    }
}

pub(crate) fn coeffs(a: f64, s: f64, c: f64) -> (f64, f64, f64) {
    let rh = rho(a);
    let r = radical(a, s);
    let s2 = s * s;
    (
        -alpha_combo(rh, s, c, r) / s2,
        -(2.0 * c + r) / s,
        gamma_combo(rh, s, c, r) / (s2 * s),
    )
}

/// θ-derivatives of the coefficients; β′ collapses to A/s² exactly.
pub(crate) fn coeff_slopes(a: f64, s: f64, c: f64) -> (f64, f64, f64) {
    let rh = rho(a);
    let r = radical(a, s);
    let s2 = s * s;
    let alpha_num = s * (-2.0 * c_plus_radical(rh, s, c, r) + 2.0 * rh * c * c / r);
    let alpha = -(alpha_num * s - 2.0 * c * alpha_combo(rh, s, c, r)) / (s2 * s);
    let beta = (2.0 + c / r) / s2;
    let gamma_num = -2.0 * s * one_plus_cr(rh, s, c, r) + (1.0 + c * c) * rh * s * c / r;
    let gamma = (gamma_num * s - 3.0 * c * gamma_combo(rh, s, c, r)) / (s2 * s2);
    (alpha, beta, gamma)
}

pub(crate) fn sigma(a: f64) -> (f64, f64, f64) {
    let rh = rho(a);
    (-(2.0 - rh), 1.0 - 2.0 * rh, rh)
}

/// Embedded radius 2√(w/p) of the native-chart metric (g_φφ = radius²).
pub(crate) fn radius_w(a: f64, w: f64) -> f64 {
    let p = w * w + 2.0 * a * w + 1.0;
    2.0 * (w / p).sqrt()
}

pub(crate) fn radius_slope_w(a: f64, w: f64) -> f64 {
    let p = w * w + 2.0 * a * w + 1.0;
    (1.0 - w * w) / (w.sqrt() * p.powf(1.5))
}

/// Squared height slope of the embedding profile,
/// (dB/dw)² = g_ww − (dA/dw)² = 2(4w³ + 3(3a+1)w² + 6(a+1)w + (3+a))/p³.
/// Strictly positive for every a ∈ (−1, 1) and w > 0; reduces to the pear's
/// 8/(1+w)³ at a = 1.
pub(crate) fn bprime_sq(a: f64, w: f64) -> f64 {
    let p = w * w + 2.0 * a * w + 1.0;
    let num = 4.0 * w * w * w + 3.0 * (3.0 * a + 1.0) * w * w + 6.0 * (a + 1.0) * w + (3.0 + a);
    2.0 * num / (p * p * p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_round_trip_is_closed_form_exact() {
        for k in 1..=30 {
            let theta = std::f64::consts::PI * k as f64 / 31.0;
            let (s, c) = (theta.sin(), theta.cos());
            for &a in &[-0.9, -0.3, 0.0, 0.5, 0.95] {
                let w = w_of_theta(a, s, c);
                let back = theta_of_w(a, w);
                assert!(
                    (back - theta).abs() < 1e-13,
                    "round trip failed at a = {}, theta = {}",
                    a,
                    theta
                );
            }
        }
    }

    #[test]
    fn pear_limit_recovers_pear_formulas() {
        let a = 1.0 - 1e-12;
        for k in 1..=20 {
            let theta = std::f64::consts::PI * k as f64 / 21.0;
            let (s, c) = (theta.sin(), theta.cos());
            let (al, be, ga) = coeffs(a, s, c);
            let (pl, pb, pg) = super::super::pear::coeffs(s, c);
            assert!((al - pl).abs() < 1e-9, "alpha limit at theta = {}", theta);
            assert!((be - pb).abs() < 1e-9, "beta limit at theta = {}", theta);
            assert!((ga - pg).abs() < 1e-9, "gamma limit at theta = {}", theta);
        }
    }

    #[test]
    fn height_radicand_stays_positive_across_the_parameter_range() {
        for &a in &[-0.999, -0.95, -0.5, 0.0, 0.7, 0.999] {
            for k in -60..=60 {
                let w = 10f64.powf(k as f64 / 10.0);
                assert!(
                    bprime_sq(a, w) > 0.0,
                    "radicand not positive at a = {}, w = {}",
                    a,
                    w
                );
            }
        }
    }

    #[test]
    fn radicand_equals_chart_metric_minus_radius_slope() {
        for &a in &[-0.8, 0.0, 0.6] {
            for k in 1..=40 {
                let w = 0.2 * k as f64;
                let (g_ww, _) = metric_components(a, w);
                let ds = radius_slope_w(a, w);
                let expect = g_ww - ds * ds;
                assert!(
                    (bprime_sq(a, w) - expect).abs() < 1e-12 * expect.abs().max(1.0),
                    "induced metric identity failed at a = {}, w = {}",
                    a,
                    w
                );
            }
        }
    }
}
