//! The superintegrable structure: each family carries a pair of integrals
//! cubic in the momenta, built from coefficient functions (α, β, γ) of the
//! latitude. The pair satisfies an algebraic constraint polynomial in the
//! energy and the azimuthal momentum, valid identically in phase space, and
//! the coefficients solve one and the same first-order differential system
//! in every family. Both facts are checkable pointwise, independent of any
//! integration, and this module also reports conservation drift along
//! numerically integrated geodesics.

use crate::error::Result;
use crate::flow::{hamiltonian, PhasePoint, Trajectory};
use crate::surfaces::{generalized, orbifold, pear, zoll_sphere};
use crate::surfaces::{profile, SurfaceSpec};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The cubic-integral coefficient functions at one latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Constraint-polynomial coefficients: S₁² + S₂² equals
/// (2H)³ + σ₁(2H)²p_φ² + σ₂(2H)p_φ⁴ + σ₃p_φ⁶ identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaTriple {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
}

/// Conservation summary along one integrated geodesic.
#[derive(Debug, Clone, Copy)]
pub struct InvariantReport {
    pub spec: SurfaceSpec,
    pub duration: f64,
    pub drift_h: f64,
    pub drift_p_phi: f64,
    pub drift_s1: f64,
    pub drift_s2: f64,
    pub constraint_max_residual: f64,
    /// Cubic-integral values at t = 0, recorded as the reference the drifts
    /// are measured against.
    pub initial_s1: f64,
    pub initial_s2: f64,
}

fn json_params(spec: SurfaceSpec) -> String {
    match spec {
        SurfaceSpec::ZollSphere { l, m } => {
            format!("{{\"l\":{l:.16e},\"m\":{m:.16e}}}")
        }
        SurfaceSpec::TanneryPear => "{}".to_string(),
        SurfaceSpec::TanneryGeneralized { a } => format!("{{\"a\":{a:.16e}}}"),
        SurfaceSpec::ZollOrbifold { a, m } => {
            format!("{{\"a\":{a:.16e},\"m\":{m:.16e}}}")
        }
    }
}

impl InvariantReport {
    /// Compact JSON with a fixed key order and 17-significant-digit floats,
    /// written by hand so the byte layout is stable across serializer
    /// versions.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"family\":\"{}\",\"params\":{},\"T\":{:.16e},\"drift_H\":{:.16e},\
             \"drift_pphi\":{:.16e},\"drift_S1\":{:.16e},\"drift_S2\":{:.16e},\
             \"constraint_max_residual\":{:.16e}}}",
            self.spec.family_name(),
            json_params(self.spec),
            self.duration,
            self.drift_h,
            self.drift_p_phi,
            self.drift_s1,
            self.drift_s2,
            self.constraint_max_residual,
        )
    }
}

/// Coefficient functions of the cubic integrals at latitude θ.
pub fn cubic_coeffs(spec: SurfaceSpec, theta: f64) -> Result<CubicCoeffs> {
    let ev = profile(spec, theta)?;
    let (alpha, beta, gamma) = match spec {
        SurfaceSpec::ZollSphere { l, m } => zoll_sphere::coeffs(l, m, ev.s, ev.c),
        SurfaceSpec::TanneryPear => pear::coeffs(ev.s, ev.c),
        SurfaceSpec::TanneryGeneralized { a } => generalized::coeffs(a, ev.s, ev.c),
        SurfaceSpec::ZollOrbifold { a, m } => orbifold::coeffs(a, m, ev.s, ev.c),
    };
    Ok(CubicCoeffs {
        theta,
        alpha,
        beta,
        gamma,
    })
}

/// Analytic θ-derivatives (α′, β′, γ′); the differential system below needs
/// them exact, a finite-difference path exists only as a test oracle.
pub fn cubic_coeff_slopes(spec: SurfaceSpec, theta: f64) -> Result<(f64, f64, f64)> {
    let ev = profile(spec, theta)?;
    Ok(match spec {
        SurfaceSpec::ZollSphere { l, m } => zoll_sphere::coeff_slopes(l, m, ev.s, ev.c),
        SurfaceSpec::TanneryPear => pear::coeff_slopes(ev.s, ev.c),
        SurfaceSpec::TanneryGeneralized { a } => generalized::coeff_slopes(a, ev.s, ev.c),
        SurfaceSpec::ZollOrbifold { a, m } => orbifold::coeff_slopes(a, m, ev.s, ev.c),
    })
}

/// Constraint-polynomial coefficients; pure arithmetic in the parameters.
pub fn sigma_triple(spec: SurfaceSpec) -> SigmaTriple {
    let (sigma1, sigma2, sigma3) = match spec {
        SurfaceSpec::ZollSphere { l, m } => zoll_sphere::sigma(l, m),
        SurfaceSpec::TanneryPear => pear::sigma(),
        SurfaceSpec::TanneryGeneralized { a } => generalized::sigma(a),
        SurfaceSpec::ZollOrbifold { a, m } => orbifold::sigma(a, m),
    };
    SigmaTriple {
        sigma1,
        sigma2,
        sigma3,
    }
}

/// The pair of cubic integrals at a phase point (no shell assumption):
/// S₁ = cos φ · Π(2H + αp_φ²) + sin φ · p_φ(2βH + γp_φ²) and S₂ its
/// quarter-turn partner, with Π = p_θ/A.
pub fn cubic_integrals(spec: SurfaceSpec, p: PhasePoint) -> Result<(f64, f64)> {
    let ev = profile(spec, p.theta)?;
    let co = cubic_coeffs(spec, p.theta)?;
    let h2 = 2.0 * hamiltonian(spec, p)?;
    let l2 = p.p_phi * p.p_phi;
    let pi_momentum = p.p_theta / ev.a;
    let meridian_block = pi_momentum * (h2 + co.alpha * l2);
    let azimuth_block = p.p_phi * (co.beta * h2 + co.gamma * l2);
    let (sin_phi, cos_phi) = p.phi.sin_cos();
    Ok((
        cos_phi * meridian_block + sin_phi * azimuth_block,
        -sin_phi * meridian_block + cos_phi * azimuth_block,
    ))
}

/// Raw value of S₁² + S₂² − [(2H)³ + σ₁(2H)²p_φ² + σ₂(2H)p_φ⁴ + σ₃p_φ⁶],
/// which vanishes identically in phase space.
pub fn constraint_residual(spec: SurfaceSpec, p: PhasePoint) -> Result<f64> {
    let (s1, s2) = cubic_integrals(spec, p)?;
    let sg = sigma_triple(spec);
    let h2 = 2.0 * hamiltonian(spec, p)?;
    let l2 = p.p_phi * p.p_phi;
    let rhs = ((h2 + sg.sigma1 * l2) * h2 + sg.sigma2 * l2 * l2) * h2 + sg.sigma3 * l2 * l2 * l2;
    Ok(s1 * s1 + s2 * s2 - rhs)
}

/// Max of |constraint_residual| / max(1, (2H)³) over `n` seeded random
/// phase points, drawn off-shell across the coordinate strip.
pub fn sample_constraint_residual(spec: SurfaceSpec, n: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let p = PhasePoint {
            theta: rng.random_range(0.1..std::f64::consts::PI - 0.1),
            phi: rng.random_range(0.0..std::f64::consts::TAU),
            p_theta: rng.random_range(-2.0..2.0),
            p_phi: rng.random_range(-1.5..1.5),
        };
        let h2 = 2.0 * hamiltonian(spec, p)?;
        let scale = (h2 * h2 * h2).max(1.0);
        worst = worst.max(constraint_residual(spec, p)?.abs() / scale);
    }
    Ok(worst)
}

/// Residuals of the four relations the coefficient functions satisfy:
/// (a) s²β′ − A, (b) s³α′ + sβA + c, (c) s²γ′ − αA,
/// (d) A(sγ + β/s) + c(α + 1/s²). All vanish identically on (0, π).
pub fn coefficient_system_residual(spec: SurfaceSpec, theta: f64) -> Result<[f64; 4]> {
    let ev = profile(spec, theta)?;
    let co = cubic_coeffs(spec, theta)?;
    let (da, db, dg) = cubic_coeff_slopes(spec, theta)?;
    let (s, c, a) = (ev.s, ev.c, ev.a);
    Ok([
        s * s * db - a,
        s * s * s * da + s * co.beta * a + c,
        s * s * dg - co.alpha * a,
        a * (s * co.gamma + co.beta / s) + c * (co.alpha + 1.0 / (s * s)),
    ])
}

/// Conservation drifts along an integrated trajectory, measured against the
/// t = 0 values. Quantities that start at zero (S₁ on canonical starts) are
/// measured absolutely against the scale max(1, |S₂(0)|), since relative
/// drift is undefined at zero.
pub fn drift_report(spec: SurfaceSpec, traj: &Trajectory) -> Result<InvariantReport> {
    let (_, p0) = traj.samples[0];
    let h0 = hamiltonian(spec, p0)?;
    let (s1_0, s2_0) = cubic_integrals(spec, p0)?;
    let cubic_scale = s2_0.abs().max(1.0);

    let mut drift_h: f64 = 0.0;
    let mut drift_p_phi: f64 = 0.0;
    let mut drift_s1: f64 = 0.0;
    let mut drift_s2: f64 = 0.0;
    let mut worst_constraint: f64 = 0.0;
    for &(_, p) in &traj.samples {
        let h = hamiltonian(spec, p)?;
        let (s1, s2) = cubic_integrals(spec, p)?;
        drift_h = drift_h.max((h - h0).abs() / h0.abs());
        drift_p_phi = drift_p_phi.max((p.p_phi - p0.p_phi).abs() / p0.p_phi.abs());
        drift_s1 = drift_s1.max((s1 - s1_0).abs() / cubic_scale);
        drift_s2 = drift_s2.max((s2 - s2_0).abs() / cubic_scale);
        let h2 = 2.0 * h;
        let scale = (h2 * h2 * h2).max(1.0);
        worst_constraint = worst_constraint.max(constraint_residual(spec, p)?.abs() / scale);
    }
    Ok(InvariantReport {
        spec,
        duration: traj.duration(),
        drift_h,
        drift_p_phi,
        drift_s1,
        drift_s2,
        constraint_max_residual: worst_constraint,
        initial_s1: s1_0,
        initial_s2: s2_0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::{initial_phase, integrate, FlowSettings};
    use crate::surfaces::all_specs;
    use std::f64::consts::PI;

    /// Identity tolerances: algebraic relations evaluated in closed form
    /// away from the poles, where no cancellation amplifies roundoff.
    const IDENTITY_TOL: f64 = 1e-12;
    const CONSTRAINT_TOL: f64 = 1e-10;
    const DRIFT_TOL: f64 = 1e-8;

    fn seeded_thetas(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(lo..hi)).collect()
    }

    #[test]
    fn sigma_triples_match_hand_computed_values() {
        let cases = [
            (SurfaceSpec::pear(), (-2.0, 1.0, 0.0)),
            (
                SurfaceSpec::zoll_sphere(1.0, 2.0).unwrap(),
                (-5.0 / 3.0, 2.0 / 3.0, 0.0),
            ),
            (SurfaceSpec::orbifold(0.0, 1.0).unwrap(), (-3.0, 4.0, -2.0)),
            // At a = 0 the deformation ratio is 1.
            (SurfaceSpec::generalized(0.0).unwrap(), (-1.0, -1.0, 1.0)),
        ];
        for (spec, (e1, e2, e3)) in cases {
            let sg = sigma_triple(spec);
            assert!(
                (sg.sigma1 - e1).abs() < 1e-15
                    && (sg.sigma2 - e2).abs() < 1e-15
                    && (sg.sigma3 - e3).abs() < 1e-15,
                "sigma triple for {} was ({}, {}, {})",
                spec.family_name(),
                sg.sigma1,
                sg.sigma2,
                sg.sigma3
            );
        }
        // The unit-parameter members kill the sextic coefficient.
        let sg = sigma_triple(SurfaceSpec::zoll_sphere(-1.0, 3.0).unwrap());
        assert_eq!(sg.sigma3, 0.0, "|l| = 1 removes the p_phi^6 term");
    }

    #[test]
    fn cubic_coefficients_match_anchor_evaluations() {
        let co = cubic_coeffs(SurfaceSpec::pear(), PI / 2.0).unwrap();
        assert!(
            (co.alpha + 1.0).abs() < 1e-15
                && (co.beta + 1.0).abs() < 1e-15
                && (co.gamma - 1.0).abs() < 1e-15,
            "pear equator coefficients must be (-1, -1, 1), got ({}, {}, {})",
            co.alpha,
            co.beta,
            co.gamma
        );

        // Hand value: at the equator x = (1 - sqrt(3))/(1 + sqrt(3)) and
        // alpha = (x - l)/(l + m).
        let co = cubic_coeffs(SurfaceSpec::zoll_sphere(1.0, 2.0).unwrap(), PI / 2.0).unwrap();
        let x = (1.0 - 3.0_f64.sqrt()) / (1.0 + 3.0_f64.sqrt());
        assert!(
            (co.alpha - (x - 1.0) / 3.0).abs() < 1e-14,
            "spherical-member equator alpha was {}",
            co.alpha
        );
        assert!((co.alpha + 0.4226497).abs() < 1e-6);

        // Orbifold unit member at the equator: w = 1, W = sqrt(2).
        let co = cubic_coeffs(SurfaceSpec::orbifold(0.0, 1.0).unwrap(), PI / 2.0).unwrap();
        assert!(
            (co.alpha + 2.0).abs() < 1e-14
                && (co.beta + 2.0_f64.sqrt()).abs() < 1e-14
                && (co.gamma - 2.0_f64.sqrt()).abs() < 1e-14,
            "orbifold equator coefficients were ({}, {}, {})",
            co.alpha,
            co.beta,
            co.gamma
        );
    }

    #[test]
    fn generalized_family_degenerates_to_the_pear_pointwise() {
        // Deformation ratio ~5e-10: the gap to the pear shrinks linearly.
        let spec = SurfaceSpec::generalized(1.0 - 1e-9).unwrap();
        for &theta in &seeded_thetas(200, 0.3, PI - 0.3, 11) {
            let near = cubic_coeffs(spec, theta).unwrap();
            let limit = cubic_coeffs(SurfaceSpec::pear(), theta).unwrap();
            assert!(
                (near.alpha - limit.alpha).abs() < 1e-7
                    && (near.beta - limit.beta).abs() < 1e-7
                    && (near.gamma - limit.gamma).abs() < 1e-7,
                "degeneration gap at theta = {theta}"
            );
        }
    }

    #[test]
    fn parity_combinations_collapse_to_their_even_forms() {
        // Each coefficient's (theta, pi - theta) combination reduces to a
        // closed even expression; these pin the odd/even split that the
        // rotation-number integrals rely on.
        for spec in all_specs() {
            for &theta in &seeded_thetas(200, 0.1, PI - 0.1, 23) {
                let co = cubic_coeffs(spec, theta).unwrap();
                let mirrored = cubic_coeffs(spec, PI - theta).unwrap();
                let (s, c) = theta.sin_cos();
                let asum = co.alpha + mirrored.alpha;
                let bsum = co.beta + mirrored.beta;
                let gsum = co.gamma + mirrored.gamma;
                let (ea, eb, eg) = match spec {
                    SurfaceSpec::ZollSphere { l, m } => {
                        let (delta, sum) = zoll_sphere::delta_sum(l, m, s);
                        (
                            (2.0 * delta / sum - 2.0 * l) / (l + m),
                            -2.0 * delta / s,
                            2.0 * delta / (s * s * s),
                        )
                    }
                    SurfaceSpec::TanneryPear => {
                        let e = 1.0 + c * c;
                        (-2.0 * e / (s * s), -2.0 / s, 2.0 * e / (s * s * s))
                    }
                    SurfaceSpec::TanneryGeneralized { a } => {
                        let rh = (1.0 - a) / (1.0 + a);
                        let r = (1.0 + rh * s * s).sqrt();
                        let e = 1.0 + c * c;
                        (-2.0 * e / (s * s), -2.0 * r / s, 2.0 * e * r / (s * s * s))
                    }
                    SurfaceSpec::ZollOrbifold { a, m } => {
                        // The shape radical B is even in the latitude, so
                        // the chart values at mirrored latitudes sum to
                        // 2a + 2B/s^2.
                        let rad = orbifold::radicals(a, m, s, c);
                        let big_w = (2.0 * rad.b / m).sqrt();
                        (
                            -2.0 * (a + m + rad.b / (s * s)) / m,
                            -2.0 * big_w / s,
                            2.0 * big_w / (s * s * s),
                        )
                    }
                };
                assert!(
                    (asum - ea).abs() < IDENTITY_TOL * ea.abs().max(1.0),
                    "alpha parity for {} at theta = {theta}: {} vs {}",
                    spec.family_name(),
                    asum,
                    ea
                );
                assert!(
                    (bsum - eb).abs() < IDENTITY_TOL * eb.abs().max(1.0),
                    "beta parity for {} at theta = {theta}",
                    spec.family_name()
                );
                assert!(
                    (gsum - eg).abs() < IDENTITY_TOL * eg.abs().max(1.0),
                    "gamma parity for {} at theta = {theta}",
                    spec.family_name()
                );
            }
        }
    }

    #[test]
    fn coefficient_system_residuals_vanish_with_analytic_slopes() {
        // Interior strip: relations (c) and (d) subtract O(1/sin^2 theta)
        // terms, so within ~0.15 of a pole a single ulp of either term
        // already exceeds the absolute threshold.
        for spec in all_specs() {
            for &theta in &seeded_thetas(1000, 0.15, PI - 0.15, 37) {
                let r = coefficient_system_residual(spec, theta).unwrap();
                for (k, v) in r.iter().enumerate() {
                    assert!(
                        v.abs() < IDENTITY_TOL,
                        "relation {} residual {:e} for {} at theta = {theta}",
                        ["a", "b", "c", "d"][k],
                        v,
                        spec.family_name()
                    );
                }
            }
        }
    }

    #[test]
    fn coefficient_system_holds_relative_to_term_size_near_the_poles() {
        // Closer to the poles the identities still hold to a few ulp of
        // their largest constituent term.
        for spec in all_specs() {
            for &theta in &seeded_thetas(300, 0.01, PI - 0.01, 43) {
                let ev = profile(spec, theta).unwrap();
                let co = cubic_coeffs(spec, theta).unwrap();
                let (s, c, a) = (ev.s, ev.c, ev.a);
                let r = coefficient_system_residual(spec, theta).unwrap();
                let scales = [
                    a.abs().max(1.0),
                    (s * co.beta * a).abs().max(1.0),
                    (co.alpha * a).abs().max(1.0),
                    (c * (co.alpha + 1.0 / (s * s))).abs().max(1.0),
                ];
                for k in 0..4 {
                    assert!(
                        r[k].abs() / scales[k] < 5e-13,
                        "normalized relation {} residual {:e} for {} at theta = {theta}",
                        ["a", "b", "c", "d"][k],
                        r[k] / scales[k],
                        spec.family_name()
                    );
                }
            }
        }
    }

    #[test]
    fn finite_difference_slopes_confirm_the_analytic_derivatives() {
        const STEP: f64 = 1e-6;
        for spec in all_specs() {
            for &theta in &seeded_thetas(20, 0.3, PI - 0.3, 41) {
                let (da, db, dg) = cubic_coeff_slopes(spec, theta).unwrap();
                let hi = cubic_coeffs(spec, theta + STEP).unwrap();
                let lo = cubic_coeffs(spec, theta - STEP).unwrap();
                let fd = |h: f64, l: f64| (h - l) / (2.0 * STEP);
                assert!(
                    (da - fd(hi.alpha, lo.alpha)).abs() < 1e-6
                        && (db - fd(hi.beta, lo.beta)).abs() < 1e-6
                        && (dg - fd(hi.gamma, lo.gamma)).abs() < 1e-6,
                    "finite differences disagree for {} at theta = {theta}",
                    spec.family_name()
                );
            }
        }
        // Differential system rebuilt with purely numerical slopes: the
        // residual floor is then set by the difference quotient, not by the
        // closed forms.
        let spec = SurfaceSpec::orbifold(0.3, 2.0).unwrap();
        for k in 0..50 {
            let theta = 0.3 + (PI - 0.6) * k as f64 / 49.0;
            let ev = profile(spec, theta).unwrap();
            let co = cubic_coeffs(spec, theta).unwrap();
            let hi = cubic_coeffs(spec, theta + STEP).unwrap();
            let lo = cubic_coeffs(spec, theta - STEP).unwrap();
            let (s, c, a) = (ev.s, ev.c, ev.a);
            let r_a = s * s * (hi.beta - lo.beta) / (2.0 * STEP) - a;
            let r_b = s * s * s * (hi.alpha - lo.alpha) / (2.0 * STEP) + s * co.beta * a + c;
            let r_c = s * s * (hi.gamma - lo.gamma) / (2.0 * STEP) - co.alpha * a;
            assert!(
                r_a.abs().max(r_b.abs()).max(r_c.abs()) < 1e-8,
                "finite-difference residual at theta = {theta}"
            );
        }
    }

    #[test]
    fn cubic_integrals_vanish_and_anchor_at_canonical_starts() {
        // At the canonical start the meridian block vanishes with p_theta
        // and sin(phi) = 0, so S1 = 0 exactly and S2 collapses to a closed
        // family constant in (i, cos i).
        for spec in all_specs() {
            for i in [0.3, 0.7, 1.2] {
                let p0 = initial_phase(spec, i).unwrap();
                let (s1, s2) = cubic_integrals(spec, p0).unwrap();
                assert!(
                    s1.abs() < 1e-15,
                    "S1 at the canonical start for {}",
                    spec.family_name()
                );
                let (s0, c0) = i.sin_cos();
                let anchor = match spec {
                    SurfaceSpec::ZollSphere { l, m } => {
                        let (hp, hm) = zoll_sphere::h_pair(l, m, s0);
                        -c0 * hp * hm
                    }
                    SurfaceSpec::TanneryPear => c0 * c0,
                    SurfaceSpec::TanneryGeneralized { a } => {
                        let rh = (1.0 - a) / (1.0 + a);
                        c0 * c0 * (1.0 + rh * s0 * s0).sqrt()
                    }
                    SurfaceSpec::ZollOrbifold { a, m } => {
                        c0 * orbifold::radicals(a, m, s0, c0).bb / m
                    }
                };
                assert!(
                    (s2 - anchor).abs() < 1e-12 * anchor.abs().max(1.0),
                    "S2 anchor for {} at i = {}: {} vs {}",
                    spec.family_name(),
                    i,
                    s2,
                    anchor
                );
            }
        }
    }

    #[test]
    fn constraint_identity_holds_off_shell() {
        for spec in all_specs() {
            let worst = sample_constraint_residual(spec, 1000, 7).unwrap();
            assert!(
                worst < CONSTRAINT_TOL,
                "normalized constraint residual {:e} for {}",
                worst,
                spec.family_name()
            );
        }
    }

    #[test]
    fn meridian_constraint_reduces_to_the_energy_cube() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for spec in all_specs() {
            for _ in 0..50 {
                let p = PhasePoint {
                    theta: rng.random_range(0.2..PI - 0.2),
                    phi: rng.random_range(0.0..6.0),
                    p_theta: rng.random_range(-2.0..2.0),
                    p_phi: 0.0,
                };
                let h2 = 2.0 * hamiltonian(spec, p).unwrap();
                let res = constraint_residual(spec, p).unwrap();
                assert!(
                    res.abs() < 1e-14 * (h2 * h2 * h2).max(1.0),
                    "meridian reduction for {}: residual {:e}",
                    spec.family_name(),
                    res
                );
            }
        }
    }

    #[test]
    fn drift_report_stays_flat_along_integrated_flows() {
        let flow_specs = [
            SurfaceSpec::zoll_sphere(1.0, 2.0).unwrap(),
            SurfaceSpec::pear(),
            SurfaceSpec::generalized(-0.5).unwrap(),
            SurfaceSpec::orbifold(-0.9, 0.01).unwrap(),
        ];
        for spec in flow_specs {
            let p0 = initial_phase(spec, 0.8).unwrap();
            let traj = integrate(spec, p0, 4.0 * PI, FlowSettings::default()).unwrap();
            let report = drift_report(spec, &traj).unwrap();
            assert!(
                report.drift_h < DRIFT_TOL
                    && report.drift_p_phi == 0.0
                    && report.drift_s1 < DRIFT_TOL
                    && report.drift_s2 < DRIFT_TOL,
                "drifts for {}: H {:e}, S1 {:e}, S2 {:e}",
                spec.family_name(),
                report.drift_h,
                report.drift_s1,
                report.drift_s2
            );
            assert!(report.constraint_max_residual < CONSTRAINT_TOL);
        }
    }

    #[test]
    fn single_sample_report_has_identically_zero_drift() {
        let spec = SurfaceSpec::pear();
        let p0 = initial_phase(spec, 0.3).unwrap();
        let traj = integrate(spec, p0, 0.0, FlowSettings::default()).unwrap();
        let report = drift_report(spec, &traj).unwrap();
        assert_eq!(report.drift_h, 0.0);
        assert_eq!(report.drift_p_phi, 0.0);
        assert_eq!(report.drift_s1, 0.0);
        assert_eq!(report.drift_s2, 0.0);
        assert_eq!(report.duration, 0.0);
        // The start value matches the pear anchor cos^2(i).
        let c0 = 0.3_f64.cos();
        assert!((report.initial_s2 - c0 * c0).abs() < 1e-15);
    }

    #[test]
    fn long_pear_flow_keeps_the_vanishing_integral_at_zero() {
        let spec = SurfaceSpec::pear();
        let p0 = initial_phase(spec, 0.3).unwrap();
        let traj = integrate(spec, p0, 8.0 * PI, FlowSettings::default()).unwrap();
        let report = drift_report(spec, &traj).unwrap();
        // S1 starts at zero; its drift is absolute against max(1, |S2(0)|).
        assert!(
            report.drift_s1 < DRIFT_TOL,
            "S1 drift {:e} over eight half-turns",
            report.drift_s1
        );
    }

    #[test]
    fn invariant_report_serializes_with_stable_key_order() {
        let spec = SurfaceSpec::orbifold(0.3, 2.0).unwrap();
        let p0 = initial_phase(spec, 1.3).unwrap();
        let traj = integrate(spec, p0, 1.0, FlowSettings::default()).unwrap();
        let report = drift_report(spec, &traj).unwrap();
        let json = report.to_json();
        let keys = [
            "\"family\"",
            "\"params\"",
            "\"T\"",
            "\"drift_H\"",
            "\"drift_pphi\"",
            "\"drift_S1\"",
            "\"drift_S2\"",
            "\"constraint_max_residual\"",
        ];
        let mut last = 0;
        for key in keys {
            let pos = json.find(key).unwrap_or_else(|| panic!("missing {key}"));
            assert!(pos > last || last == 0, "key {key} out of order");
            last = pos;
        }
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["family"], "zoll-orbifold");
        assert_eq!(value["params"]["m"], 2.0);
        assert!((value["T"].as_f64().unwrap() - 1.0).abs() < 1e-15);
        assert!(value["drift_H"].as_f64().unwrap() >= 0.0);
    }
}
