//! Closed forms for the two-parameter Zoll family on the orbifold with one
//! conical point. Everything is built from the radical pair
//! u = m cos²θ − a sin²θ, 𝓑 = √(u² + q) with q = (1−a²) sin⁴θ, and
//! B = u + 𝓑. Two quantities need care on the lower hemisphere:
//!
//! - B itself: for u < 0 the sum u + 𝓑 cancels, so B = q/(𝓑 − u) is used.
//! - the chart value w = a + (B + c√(2mB))/sin²θ: near θ = π the numerator
//!   cancels against a + ... to O(s⁴); the algebraically equal quotient
//!   w = a + B·M/(S₁S₂) below is exact there (it gives w → 0 at the pole).
//!
//! The profile A = 1 + cR runs from 3 at θ = 0 to −1 at θ = π for every
//! admissible (a, m), so A has a zero θ* in (π/2, π): the θ-form of the
//! metric degenerates on that circle, and flow-based operations must keep
//! the oscillation band [i, π−i] inside (0, θ*). `degeneracy_theta` locates
//! θ* for that purpose.

use crate::numeric::roots::bisect;

pub(crate) fn r_param(a: f64, m: f64) -> f64 {
    (m * m + 2.0 * a * m + 1.0).sqrt()
}

/// Radical bundle at one latitude: values and θ-derivatives of u, q, 𝓑, B.
pub(crate) struct Radicals {
    pub u: f64,
    pub q: f64,
    pub bb: f64,
    pub b: f64,
    pub dq: f64,
    pub dbb: f64,
    pub db: f64,
}

pub(crate) fn radicals(a: f64, m: f64, s: f64, c: f64) -> Radicals {
    let s2 = s * s;
    let u = m * c * c - a * s2;
    let q = (1.0 - a * a) * s2 * s2;
    let bb = (u * u + q).sqrt();
    let du = -2.0 * (m + a) * s * c;
    let dq = 4.0 * (1.0 - a * a) * s2 * s * c;
    let dbb = (u * du + 0.5 * dq) / bb;
    let (b, db) = if u >= 0.0 {
        (u + bb, du + dbb)
    } else {
        // u + bb cancels; bb - u = bb + |u| does not.
        let b = q / (bb - u);
        let db = (du * q / (bb - u) + 0.5 * dq) / bb;
        (b, db)
    };
    Radicals {
        u,
        q,
        bb,
        b,
        dq,
        dbb,
        db,
    }
}

fn shape_factor(m: f64, rad: &Radicals) -> (f64, f64) {
    let two_b = 2.0 * rad.b;
    let den = rad.b * rad.b + rad.q;
    let r = m.sqrt() * two_b.powf(1.5) / den;
    let dr = m.sqrt()
        * (3.0 * two_b.sqrt() * rad.db * den - two_b.powf(1.5) * (2.0 * rad.b * rad.db + rad.dq))
        / (den * den);
    (r, dr)
}

pub(crate) fn profile_value(a: f64, m: f64, s: f64, c: f64) -> f64 {
    let rad = radicals(a, m, s, c);
    let (r, _) = shape_factor(m, &rad);
    1.0 + c * r
}

/// Profile together with its auxiliaries (R, B, 𝓑) for ProfileEval.
pub(crate) fn profile_parts(a: f64, m: f64, s: f64, c: f64) -> (f64, f64, f64, f64, f64) {
    let rad = radicals(a, m, s, c);
    let (r, dr) = shape_factor(m, &rad);
    (1.0 + c * r, -s * r + c * dr, r, rad.b, rad.bb)
}

/// Forward chart map, decreasing from ∞ at θ = 0 to 0 at θ = π.
pub(crate) fn w_of_theta(a: f64, m: f64, s: f64, c: f64) -> f64 {
    let rad = radicals(a, m, s, c);
    let s2 = s * s;
    if c >= 0.0 {
        let g = (2.0 * m * rad.b).sqrt();
        a + (rad.b + c * g) / s2
    } else {
        // Fully factored lower-hemisphere form, w = s² · O(1)/O(1). Each
        // bracket below is the s²-quotient of a difference that would
        // otherwise cancel near the regular pole:
        //   e_b  = (B - 2m)/s²       via u - m = -(m+a) s² and the
        //                            conjugate of 𝓑 - m,
        //   e_u  = (B + |c|G - 4m)/s² via |c| - 1 = -s²/(1+|c|),
        //   e_t  = (S₁ S₂ - 4mB)/s²  with S₁ = B + 2as²,
        // after which w = s² (a e_t + (1 - a² + 4ma) B)/(S₁ S₂) carries
        // full relative precision down to the pole itself.
        let g = (2.0 * m * rad.b).sqrt();
        let e_b = -(m + a) + ((1.0 - a * a) * s2 - (m + a) * (rad.u + m)) / (rad.bb + m);
        let e_u = e_b - g / (1.0 + c.abs()) + 2.0 * m * e_b / (g + 2.0 * m);
        let s2f = rad.b + c.abs() * g;
        let e_t = rad.b * e_u + 2.0 * a * s2f;
        let s1 = rad.b + 2.0 * a * s2;
        s2 * (a * e_t + (1.0 - a * a + 4.0 * m * a) * rad.b) / (s1 * s2f)
    }
}

pub(crate) fn dw_dtheta(a: f64, m: f64, s: f64, c: f64) -> f64 {
    let rad = radicals(a, m, s, c);
    let s2 = s * s;
    let g = (2.0 * m * rad.b).sqrt();
    let dg = m * rad.db / g;
    if c >= 0.0 {
        ((rad.db - s * g + c * dg) * s - 2.0 * c * (rad.b + c * g)) / (s2 * s)
    } else {
        let big_m = (1.0 - a * a) * s2 - 4.0 * m * a * c * c;
        let dbig_m = 2.0 * s * c * (1.0 - a * a + 4.0 * m * a);
        let s1 = rad.bb + m * c * c + a * s2;
        let ds1 = rad.dbb + 2.0 * s * c * (a - m);
        let s2f = rad.b + c.abs() * g;
        let ds2f = rad.db * (1.0 + c.abs() * m / g) + s * g;
        let num = rad.b * big_m;
        let dnum = rad.db * big_m + rad.b * dbig_m;
        let den = s1 * s2f;
        let dden = ds1 * s2f + s1 * ds2f;
        (dnum * den - num * dden) / (den * den)
    }
}

/// Numeric inverse of the chart on the monotone map θ ↦ w.
pub(crate) fn theta_of_w(a: f64, m: f64, w: f64) -> crate::Result<f64> {
    const GUARD: f64 = 1e-12;
    bisect(
        |theta| w_of_theta(a, m, theta.sin(), theta.cos()) - w,
        GUARD,
        std::f64::consts::PI - GUARD,
        1e-14,
        200,
    )
}

/// Diagonal metric components (g_ww, g_φφ) in the native w-chart. The
/// quartic P is the expanded product of its two conjugate quadratic factors
/// w² + 2(m±r)w + 1.
pub(crate) fn metric_components(a: f64, m: f64, w: f64) -> (f64, f64) {
    let d = w * (w * w - 2.0 * a * w + 1.0);
    let base = w * w + 2.0 * m * w + 1.0;
    let r2 = m * m + 2.0 * a * m + 1.0;
    let p = base * base - 4.0 * r2 * w * w;
    let rho = -1.0 + 4.0 * (w + m) * d / p;
    (rho * rho / d, 4.0 * d / p)
}

/// Conjugate split of the γ-combination W + c(1 + 𝓑/m), which cancels to
/// O(s²) at the lower pole: it equals s²N/D with
/// N = m²c²(1+c²) + 2m𝓑 − s²(2am(1+c²) + c²) and D = m²W − cm(m + 𝓑),
/// both cancellation-free for c < 0.
fn gamma_combo_parts(a: f64, m: f64, s: f64, c: f64, bb: f64, big_w: f64) -> (f64, f64) {
    let s2 = s * s;
    let e = 1.0 + c * c;
    let n = m * m * c * c * e + 2.0 * m * bb - s2 * (2.0 * a * m * e + c * c);
    let d = m * m * big_w - c * m * (m + bb);
    (n, d)
}

pub(crate) fn coeffs(a: f64, m: f64, s: f64, c: f64) -> (f64, f64, f64) {
    let rad = radicals(a, m, s, c);
    let w = w_of_theta(a, m, s, c);
    let big_w = (2.0 * rad.b / m).sqrt();
    let alpha = -(w + m) / m;
    let beta = -(big_w + c) / s;
    let gamma = if c >= 0.0 {
        (big_w + c * (1.0 + rad.bb / m)) / (s * s * s)
    } else {
        let (n, d) = gamma_combo_parts(a, m, s, c, rad.bb, big_w);
        n / (d * s)
    };
    (alpha, beta, gamma)
}

pub(crate) fn coeff_slopes(a: f64, m: f64, s: f64, c: f64) -> (f64, f64, f64) {
    let rad = radicals(a, m, s, c);
    let s2 = s * s;
    let big_w = (2.0 * rad.b / m).sqrt();
    let dbig_w = rad.db / (m * big_w);
    let alpha = -dw_dtheta(a, m, s, c) / m;
    let beta = -((dbig_w - s) * s - (big_w + c) * c) / s2;
    let gamma = if c >= 0.0 {
        let n = big_w + c * (1.0 + rad.bb / m);
        let dn = dbig_w - s * (1.0 + rad.bb / m) + c * rad.dbb / m;
        (dn * s - 3.0 * n * c) / (s2 * s2)
    } else {
        // Differentiating γ = N/(Ds) keeps every term cancellation-free on
        // the lower hemisphere.
        let (n, d) = gamma_combo_parts(a, m, s, c, rad.bb, big_w);
        let e = 1.0 + c * c;
        let dn = -2.0 * m * m * s * c * (1.0 + 2.0 * c * c) + 2.0 * m * rad.dbb
            - 2.0 * s * c * (2.0 * a * m * e + c * c)
            + 2.0 * s2 * s * c * (2.0 * a * m + 1.0);
        let dd = m * m * dbig_w + m * (s * (m + rad.bb) - c * rad.dbb);
        (s * dn - c * n) / (s2 * d) - n * dd / (s * d * d)
    };
    (alpha, beta, gamma)
}

pub(crate) fn sigma(a: f64, m: f64) -> (f64, f64, f64) {
    let r2 = m * m + 2.0 * a * m + 1.0;
    (
        -(3.0 * m + 2.0 * a) / m,
        (3.0 * m * m + 4.0 * a * m + 1.0) / (m * m),
        -r2 / (m * m),
    )
}

/// Zero of the profile A in (π/2, π): the circle where the θ-form metric
/// degenerates. A(π/2) = 1 and A(π⁻) = −1 bracket it for every admissible
/// parameter pair.
pub(crate) fn degeneracy_theta(a: f64, m: f64) -> crate::Result<f64> {
    bisect(
        |theta| profile_value(a, m, theta.sin(), theta.cos()),
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::PI - 1e-9,
        1e-13,
        200,
    )
}
