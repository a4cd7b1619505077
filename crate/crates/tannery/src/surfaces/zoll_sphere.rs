//! Closed forms for the two-parameter Zoll family on the sphere. All
//! quantities are built from the pair H± = √(1 − k± sin²θ) with
//! k± = (l±1)/(l+m). The difference H₊ − H₋ is O(sin²θ) while each term is
//! O(1), so it is always evaluated through its conjugate form
//! −2s²/((l+m)(H₊+H₋)); the naive subtraction loses half the digits at the
//! poles and would poison every downstream formula.

pub(crate) fn k_pair(l: f64, m: f64) -> (f64, f64) {
    ((l + 1.0) / (l + m), (l - 1.0) / (l + m))
}

pub(crate) fn h_pair(l: f64, m: f64, s: f64) -> (f64, f64) {
    let (kp, km) = k_pair(l, m);
    let s2 = s * s;
    ((1.0 - kp * s2).sqrt(), (1.0 - km * s2).sqrt())
}

/// (H₊ − H₋, H₊ + H₋), the difference in cancellation-free form.
pub(crate) fn delta_sum(l: f64, m: f64, s: f64) -> (f64, f64) {
    let (hp, hm) = h_pair(l, m, s);
    let sum = hp + hm;
    (-2.0 * s * s / ((l + m) * sum), sum)
}

pub(crate) fn profile_value(l: f64, m: f64, s: f64, c: f64) -> f64 {
    let (hp, hm) = h_pair(l, m, s);
    let (delta, _) = delta_sum(l, m, s);
    1.0 - c * delta / (hp * hm)
}

pub(crate) fn profile_slope(l: f64, m: f64, s: f64, c: f64) -> f64 {
    let (kp, km) = k_pair(l, m);
    let (hp, hm) = h_pair(l, m, s);
    let (delta, _) = delta_sum(l, m, s);
    s * delta / (hp * hm) + s * c * c * (kp / (hp * hp * hp) - km / (hm * hm * hm))
}

/// The algebraic chart x(θ) = (H₊ − H₋ + 2c)/(H₊ + H₋), decreasing from 1
/// at θ = 0 to −1 at θ = π.
pub(crate) fn x_of_theta(l: f64, m: f64, s: f64, c: f64) -> f64 {
    let (delta, sum) = delta_sum(l, m, s);
    (delta + 2.0 * c) / sum
}

pub(crate) fn dx_dtheta(l: f64, m: f64, s: f64, c: f64) -> f64 {
    let (kp, km) = k_pair(l, m);
    let (hp, hm) = h_pair(l, m, s);
    let (delta, sum) = delta_sum(l, m, s);
    let ddelta = -s * c * (kp * hm - km * hp) / (hp * hm);
    let dsum = -s * c * (kp / hp + km / hm);
    ((ddelta - 2.0 * s) * sum - (delta + 2.0 * c) * dsum) / (sum * sum)
}

/// Diagonal metric components (g_xx, g_φφ) in the native x-chart. The
/// quartic P is kept in expanded form, which stays real and positive for the
/// whole parameter range l ≥ −1 even where its two conjugate quadratic
/// factors acquire complex coefficients.
pub(crate) fn metric_components(l: f64, m: f64, x: f64) -> (f64, f64) {
    metric_from_x_parts(l, m, x, 1.0 - x * x)
}

/// (g_xx, g_φφ) evaluated directly from θ. Recomputing 1 − x² from a rounded
/// chart value loses its quadratic contact at the poles, so the factors
/// H∓ ∓ cos θ are conjugated against their sign and 1 − x² assembled from
/// them with full relative precision.
pub(crate) fn metric_from_theta(l: f64, m: f64, s: f64, c: f64) -> (f64, f64) {
    let (kp, km) = k_pair(l, m);
    let (hp, hm) = h_pair(l, m, s);
    let sum = hp + hm;
    let s2 = s * s;
    let hm_minus_c = if c > 0.0 {
        s2 * (1.0 - km) / (hm + c)
    } else {
        hm - c
    };
    let hp_plus_c = if c < 0.0 {
        s2 * (1.0 - kp) / (hp - c)
    } else {
        hp + c
    };
    let omx2 = 4.0 * hm_minus_c * hp_plus_c / (sum * sum);
    metric_from_x_parts(l, m, x_of_theta(l, m, s, c), omx2)
}

fn metric_from_x_parts(l: f64, m: f64, x: f64, omx2: f64) -> (f64, f64) {
    let mpx = m + x;
    let d = mpx * omx2;
    let p = omx2 * omx2 + 4.0 * l * mpx * omx2 + 4.0 * mpx * mpx;
    let q = 3.0 * x.powi(4) + 4.0 * m * x.powi(3) - 6.0 * x * x - 12.0 * m * x - 4.0 * m * m - 1.0;
    let rho = q / p;
    (rho * rho / d, 4.0 * d / p)
}

pub(crate) fn coeffs(l: f64, m: f64, s: f64, c: f64) -> (f64, f64, f64) {
    let (kp, km) = k_pair(l, m);
    let (hp, hm) = h_pair(l, m, s);
    let (delta, sum) = delta_sum(l, m, s);
    let x = (delta + 2.0 * c) / sum;
    let alpha = (x - l) / (l + m);
    let beta = -(delta + c) / s;
    // γ s³ = Δ + c(1 − H₊H₋); both terms are O(s²), each written in its
    // cancellation-free form.
    let gamma = (c * ((kp + km) - kp * km * s * s) / (1.0 + hp * hm) - 2.0 / ((l + m) * sum)) / s;
    (alpha, beta, gamma)
}

pub(crate) fn coeff_slopes(l: f64, m: f64, s: f64, c: f64) -> (f64, f64, f64) {
    let (kp, km) = k_pair(l, m);
    let (hp, hm) = h_pair(l, m, s);
    let (delta, _) = delta_sum(l, m, s);
    let dhp = -kp * s * c / hp;
    let dhm = -km * s * c / hm;
    let ddelta = dhp - dhm;
    let s2 = s * s;

    let alpha = dx_dtheta(l, m, s, c) / (l + m);
    let beta = -((ddelta - s) * s - (delta + c) * c) / s2;
    // 1 - H₊H₋ is O(s²); the direct subtraction would leave an eps-sized
    // absolute error that the 1/s⁴ below blows up to eps/s².
    let one_minus_prod = s2 * ((kp + km) - kp * km * s2) / (1.0 + hp * hm);
    let n = delta + c * one_minus_prod;
    let dn = ddelta - s * one_minus_prod - c * (dhp * hm + hp * dhm);
    let gamma = (dn * s - 3.0 * n * c) / (s2 * s2);
    (alpha, beta, gamma)
}

pub(crate) fn sigma(l: f64, m: f64) -> (f64, f64, f64) {
    let lm = l + m;
    (
        -(3.0 * l + m) / lm,
        (3.0 * l * l + 2.0 * l * m - 1.0) / (lm * lm),
        -(l * l - 1.0) / (lm * lm),
    )
}

/// The affine map sending x ∈ (−1, 1) to the v-chart of the l = −1 member,
/// v ∈ (a, 1) with a = (m−3)/(m+1).
pub(crate) fn v_of_x(a: f64, x: f64) -> f64 {
    0.5 * ((1.0 - a) * x + (1.0 + a))
}

pub(crate) fn x_of_v(a: f64, v: f64) -> f64 {
    (2.0 * v - (1.0 + a)) / (1.0 - a)
}

/// Diagonal metric components (g_vv, g_φφ) of the rational v-chart form
/// carried by the l = −1 member.
pub(crate) fn v_metric_components(a: f64, v: f64) -> (f64, f64) {
    let d0 = (v - a) * (1.0 - v * v);
    let p0_root = v * v - 2.0 * a * v + 1.0;
    let p0 = p0_root * p0_root;
    let q0 = -p0 + 4.0 * (a - v) * d0;
    let rho0 = q0 / p0;
    (rho0 * rho0 / d0, 4.0 * d0 / p0)
}

/// Embedded radius 2√D₀/p₀ of the v-chart metric (g_φφ = radius²).
pub(crate) fn radius_v(a: f64, v: f64) -> f64 {
    let d0 = (v - a) * (1.0 - v * v);
    let p0 = v * v - 2.0 * a * v + 1.0;
    2.0 * d0.sqrt() / p0
}

pub(crate) fn radius_slope_v(a: f64, v: f64) -> f64 {
    let d0 = (v - a) * (1.0 - v * v);
    let p0 = v * v - 2.0 * a * v + 1.0;
    let dd0 = (1.0 - v * v) - 2.0 * v * (v - a);
    let dp0 = 2.0 * v - 2.0 * a;
    (dd0 * p0 - 2.0 * d0 * dp0) / (d0.sqrt() * p0 * p0)
}

/// Squared height slope (dB/dv)² = −8(v³ − 3v + 2a)/p₀³ of the l = −1
/// embedding profile; nonnegative on (a, 1) exactly when a ∈ [0, 1).
pub(crate) fn bprime_sq_v(a: f64, v: f64) -> f64 {
    let p0 = v * v - 2.0 * a * v + 1.0;
    -8.0 * (v * v * v - 3.0 * v + 2.0 * a) / (p0 * p0 * p0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_pair_matches_hand_values_at_the_equator() {
        let (hp, hm) = h_pair(1.0, 2.0, 1.0);
        assert!((hp - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((hm - 1.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_difference_agrees_with_naive_subtraction_away_from_poles() {
        let (l, m) = (0.5, 4.0);
        for k in 1..=9 {
            let s = 0.1 * k as f64;
            let (hp, hm) = h_pair(l, m, s);
            let (delta, _) = delta_sum(l, m, s);
            assert!(
                (delta - (hp - hm)).abs() < 1e-15,
                "conjugate form deviates at s = {}",
                s
            );
        }
    }

    #[test]
    fn profile_is_even_around_the_equator_up_to_the_constant_part() {
        for &(l, m) in &[(-1.0, 3.0), (0.0, 1.5), (1.0, 2.0), (5.0, 10.0)] {
            for k in 1..=20 {
                let theta = std::f64::consts::PI * k as f64 / 21.0;
                let sum = profile_value(l, m, theta.sin(), theta.cos())
                    + profile_value(l, m, theta.sin(), -theta.cos());
                assert!(
                    (sum - 2.0).abs() < 1e-13,
                    "A(theta) + A(pi - theta) != 2 at l={}, m={}, theta={}",
                    l,
                    m,
                    theta
                );
            }
        }
    }

    #[test]
    fn equator_coefficient_matches_published_value() {
        let (alpha, _, _) = coeffs(1.0, 2.0, 1.0, 0.0);
        assert!(
            (alpha + 0.4226497).abs() < 1e-7,
            "alpha at the equator was {}",
            alpha
        );
    }

    #[test]
    fn chart_endpoint_values_are_exact() {
        // x -> 1 as theta -> 0 and x -> -1 as theta -> pi.
        let x0 = x_of_theta(2.0, 3.0, 1e-9, 1.0);
        let x1 = x_of_theta(2.0, 3.0, 1e-9, -1.0);
        assert!((x0 - 1.0).abs() < 1e-12);
        assert!((x1 + 1.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_radicand_has_the_closed_endpoint_values() {
        for &a in &[0.0, 0.3, 0.8] {
            let at_one = bprime_sq_v(a, 1.0);
            let at_a = bprime_sq_v(a, a);
            assert!((at_one - 2.0 / ((1.0 - a) * (1.0 - a))).abs() < 1e-12);
            assert!((at_a - 8.0 * a / ((1.0 - a * a) * (1.0 - a * a))).abs() < 1e-12);
        }
    }
}
