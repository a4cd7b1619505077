//! Closedness of the geodesic flow: the rotation function of the latitude
//! band, its rational classification, the odd-profile structure that forces
//! rationality, closed-form parametric geodesics, and numeric first-return
//! verification against the integrated flow.
//!
//! Everything lives on the arclength shell 2H = 1 with the canonical start
//! (θ, φ, p_θ, p_φ) = (i, 0, 0, sin i); by rotational symmetry every
//! non-meridian geodesic is congruent to one of this form. The latitude then
//! oscillates inside the classical band [i, π−i] and the azimuth advances by
//! the same amount R over every half oscillation.

use crate::error::{Error, Result};
use crate::flow::{self, FlowSettings};
use crate::invariants;
use crate::numeric::{quad, rational};
use crate::surfaces::{profile, SurfaceSpec};
use rayon::prelude::*;
use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

/// Denominator cap for the rational classifier. The built-in families only
/// realize q = 1, but the classifier must reject (never round) anything that
/// is not a small fraction of π, and the cap bounds that search.
const DENOMINATOR_CAP: i64 = 16;

/// A rotation value is accepted as pπ/q when it sits within this multiple of
/// the quadrature tolerance of the fraction.
const CLASSIFY_FACTOR: f64 = 100.0;

/// Quadrature tolerance used when an operation needs the (p, q) class but
/// takes no tolerance of its own.
const CLASS_QUAD_TOL: f64 = 1e-10;

/// Arclength searched for a first return before giving up. Closed geodesics
/// of the built-in families have length 2πp with p ≤ 2, so this is a wide
/// safety margin over the longest legitimate period.
const NO_RETURN_SPAN: f64 = 16.0 * PI;

/// Latitude slack accepted outside the classical band [i, π−i] before an
/// evaluation point is rejected: integrated trajectories overshoot their
/// turning circles by interpolation-level noise, which must not trip the
/// domain check.
const BAND_SLACK: f64 = 1e-9;

/// Largest admissible azimuth advance between neighbouring branch-lift
/// nodes. Unwrapping is unambiguous below π; staying well under that leaves
/// margin before the node count has to double.
const MAX_LIFT_STEP: f64 = 1.0;

/// Hard cap on lift-grid refinement. dφ/dx = sin i · A/sin²θ is bounded by
/// max A / sin i, so the built-in families are served by a tiny fraction of
/// this; reaching it means the profile is not one of theirs.
const MAX_LIFT_REFINE: usize = 1 << 14;

/// A classified rotation value: the azimuth advance over half a latitude
/// oscillation and the fraction pπ/q it realizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationResult {
    pub i: f64,
    /// The measured advance R(i).
    pub value: f64,
    pub p: u32,
    pub q: u32,
    /// |value − pπ/q|.
    pub residual: f64,
}

impl RotationResult {
    /// JSON record with every field; 17 significant digits for the reals.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"i\":{:.16e},\"value\":{:.16e},\"p\":{},\"q\":{},\"residual\":{:.16e}}}",
            self.i, self.value, self.p, self.q, self.residual
        )
    }
}

/// One sample of a branch-resolved geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub theta: f64,
    /// Accumulated azimuth (not reduced mod 2π).
    pub phi: f64,
    /// Branch sign ε: +1 while the latitude increases, −1 while it falls.
    pub branch: i8,
}

/// A closed geodesic assembled from parametric branches: q full latitude
/// oscillations with the azimuth lifted continuously across all of them.
#[derive(Debug, Clone)]
pub struct GeodesicCurve {
    pub i: f64,
    pub samples: Vec<CurveSample>,
    /// Total azimuth advance over the curve; 2πp when the curve closes.
    pub total_phi: f64,
}

impl GeodesicCurve {
    /// CSV export with header `theta,phi,branch`: 17 significant digits for
    /// the angles, ±1 for the branch.
    pub fn to_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "theta,phi,branch")?;
        for s in &self.samples {
            writeln!(out, "{:.16e},{:.16e},{}", s.theta, s.phi, s.branch)?;
        }
        Ok(())
    }
}

/// Outcome of the numeric first-return check of one geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureReport {
    /// Arclength at the first return to the start.
    pub period: f64,
    /// Largest distance-to-start component at the return event.
    pub residual: f64,
    /// Azimuth windings completed at the return.
    pub turns: u32,
    /// Latitude oscillations completed at the return.
    pub oscillations: u32,
}

impl ClosureReport {
    /// JSON record with every field; 17 significant digits for the reals.
    pub fn to_json(&self) -> String {
        format!(
            "{{\"period\":{:.16e},\"residual\":{:.16e},\"turns\":{},\"oscillations\":{}}}",
            self.period, self.residual, self.turns, self.oscillations
        )
    }
}

fn check_inclination(i: f64) -> Result<()> {
    if i.is_finite() && 0.0 < i && i < 0.5 * PI {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "inclination must lie strictly inside (0, pi/2), got {i}"
        )))
    }
}

fn check_quad_tol(quad_tol: f64) -> Result<()> {
    if quad_tol.is_finite() && quad_tol > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "quadrature tolerance must be positive, got {quad_tol}"
        )))
    }
}

/// ∫ f(θ(x)) dx over half a latitude oscillation in the substitution angle
/// x ∈ (−π/2, π/2) defined by cos θ = cos i · sin x. The substitution maps
/// the turning circles to the interval ends with dθ/dx vanishing there, so
/// integrands that blow up like 1/√(sin²θ − sin²i) in θ become smooth in x.
fn substitution_integral<F>(integrand: F, i: f64, quad_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let c0 = i.cos();
    let mut first_failure = None;
    let quadrature = quad::integrate(
        |x| match integrand((c0 * x.sin()).acos()) {
            Ok(v) => v,
            Err(e) => {
                first_failure.get_or_insert(e);
                f64::NAN
            }
        },
        -0.5 * PI,
        0.5 * PI,
        quad_tol,
    );
    match first_failure {
        Some(e) => Err(e),
        None => Ok(quadrature?.value),
    }
}

/// Azimuth advance over half a latitude oscillation, R(i), for profile
/// values supplied by `profile_at`. Along the geodesic dφ = sin i/sin²θ dt
/// and dt = A dx in the substitution angle, so the integrand is
/// sin i · A(θ)/sin²θ, smooth over the whole closed x-interval.
fn rotation_integral<F>(profile_at: F, i: f64, quad_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let s0 = i.sin();
    substitution_integral(
        |theta| {
            let s = theta.sin();
            Ok(s0 * profile_at(theta)? / (s * s))
        },
        i,
        quad_tol,
    )
}

/// Match a measured rotation value against pπ/q with q ≤ DENOMINATOR_CAP,
/// accepting only when the residual is commensurate with the quadrature
/// tolerance; anything else is rejected loudly rather than rounded.
fn classify(i: f64, value: f64, quad_tol: f64) -> Result<RotationResult> {
    let best = rational::best_rational(value / PI, DENOMINATOR_CAP);
    let residual = (value - PI * best.value()).abs();
    let threshold = CLASSIFY_FACTOR * quad_tol;
    if best.p <= 0 || residual > threshold {
        return Err(Error::Classification(format!(
            "rotation value {value:.15} is not a positive fraction of pi with denominator \
             <= {DENOMINATOR_CAP} within {threshold:e}; best candidate {}/{} leaves \
             residual {residual:e}",
            best.p, best.q
        )));
    }
    Ok(RotationResult {
        i,
        value,
        p: best.p as u32,
        q: best.q as u32,
        residual,
    })
}

/// The rotation function R(i) of the surface, classified as pπ/q.
///
/// The integral is evaluated by adaptive quadrature to `quad_tol` in the
/// substitution angle, where the turning-circle singularity of the raw
/// θ-form integrand disappears; classification accepts a fraction only
/// within 100 × quad_tol.
pub fn rotation_number(spec: SurfaceSpec, i: f64, quad_tol: f64) -> Result<RotationResult> {
    check_inclination(i)?;
    check_quad_tol(quad_tol)?;
    let value = rotation_integral(|theta| Ok(profile(spec, theta)?.a), i, quad_tol)?;
    classify(i, value, quad_tol)
}

/// Classified rotation values over a grid of inclinations, evaluated in
/// parallel; results come back in grid order.
pub fn rotation_grid(
    spec: SurfaceSpec,
    inclinations: &[f64],
    quad_tol: f64,
) -> Vec<Result<RotationResult>> {
    inclinations
        .par_iter()
        .map(|&i| rotation_number(spec, i, quad_tol))
        .collect()
}

/// Even/odd split of the profile in the variable x = cos θ.
///
/// For the built-in families the even part is a constant, the ratio p/q of
/// the closure type; the returned pair is (that constant, the largest
/// deviation of A(θ) + A(π−θ) from twice it over an x-uniform sample of
/// `n_samples` latitude pairs).
pub fn odd_profile_check(spec: SurfaceSpec, n_samples: usize) -> (f64, f64) {
    let constant = profile(spec, 0.5 * PI)
        .expect("the equator is an interior latitude")
        .a;
    let n = n_samples.max(1);
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let x = (k as f64 + 0.5) / n as f64;
        let theta = x.acos();
        let north = profile(spec, theta)
            .expect("latitude strictly inside (0, pi)")
            .a;
        let south = profile(spec, PI - theta)
            .expect("latitude strictly inside (0, pi)")
            .a;
        worst = worst.max((north + south - 2.0 * constant).abs());
    }
    (constant, worst)
}

/// Inclination-level data shared by every parametric evaluation: the
/// Clairaut constant s₀ = sin i, its complement c₀ = cos i, and the
/// conserved normalization C = s₀(β(i) + s₀²γ(i)), which is the value the
/// second cubic integral takes on this geodesic.
#[derive(Debug, Clone, Copy)]
struct Frame {
    s0: f64,
    c0: f64,
    norm: f64,
}

/// The orbifold profile vanishes at one latitude θ* ∈ (π/2, π); the branch
/// structure of the parametric equations (and the flow itself) breaks when
/// the classical band reaches it, so such inclinations are rejected here.
/// The other three families have positive profiles everywhere.
fn check_band_regular(spec: SurfaceSpec, i: f64) -> Result<()> {
    if let SurfaceSpec::ZollOrbifold { a, m } = spec {
        let star = crate::surfaces::orbifold::degeneracy_theta(a, m)?;
        if PI - i >= star {
            return Err(Error::Domain(format!(
                "the classical band [i, pi - i] over inclination i = {i} reaches the \
                 degenerate latitude {star:.6} where the profile vanishes; this family \
                 requires i > {:.6}",
                PI - star
            )));
        }
    }
    Ok(())
}

fn frame(spec: SurfaceSpec, i: f64) -> Result<Frame> {
    check_inclination(i)?;
    check_band_regular(spec, i)?;
    let cc = invariants::cubic_coeffs(spec, i)?;
    let (s0, c0) = (i.sin(), i.cos());
    Ok(Frame {
        s0,
        c0,
        norm: s0 * (cc.beta + s0 * s0 * cc.gamma),
    })
}

fn check_theta_in_band(i: f64, theta: f64) -> Result<()> {
    if theta < i - BAND_SLACK || theta > PI - i + BAND_SLACK {
        return Err(Error::Domain(format!(
            "theta = {theta} lies outside the classical band [{i}, {}]: sin theta < sin i \
             is classically forbidden",
            PI - i
        )));
    }
    Ok(())
}

/// (sin φ, cos φ) at latitude θ on branch sign ε, solved from the two
/// conserved cubic integrals: with Π = ε √(1 − s₀²/sin²θ),
///
///   sin φ = −Π (1 + s₀²α) / C,     cos φ = s₀ (β + s₀²γ) / C.
///
/// The radicand is clamped at zero so turning-circle roundoff cannot turn
/// into NaN.
fn projection_pair(spec: SurfaceSpec, fr: &Frame, theta: f64, eps: f64) -> Result<(f64, f64)> {
    let cc = invariants::cubic_coeffs(spec, theta)?;
    let ratio = fr.s0 / theta.sin();
    let meridian_momentum = eps * (1.0 - ratio * ratio).max(0.0).sqrt();
    Ok((
        -meridian_momentum * (1.0 + fr.s0 * fr.s0 * cc.alpha) / fr.norm,
        fr.s0 * (cc.beta + fr.s0 * fr.s0 * cc.gamma) / fr.norm,
    ))
}

/// Requested node count for a lift across a substitution-angle span; the
/// adaptive doubling in `lift_on_grid` owns correctness, this only seeds the
/// march near the right scale.
fn lift_nodes_for_span(span: f64) -> usize {
    ((span.abs() / PI * 64.0).ceil() as usize).max(2)
}

fn grid_descending(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..=n)
        .map(|j| from + (to - from) * (j as f64 / n as f64))
        .collect()
}

/// Unwrapped azimuth along the increasing branch at the descending
/// substitution-angle grid `xs`, whose first node must be π/2 (the start,
/// where φ = 0 by construction). Marching keeps consecutive raw angles
/// within MAX_LIFT_STEP so the 2π ambiguity of the arctangent resolves by
/// nearest-branch rounding; a step that comes out larger doubles the node
/// count and retries.
fn lift_on_grid(spec: SurfaceSpec, fr: &Frame, xs: &[f64]) -> Result<Vec<f64>> {
    let mut refine = 1usize;
    loop {
        if let Some(phis) = try_lift(spec, fr, xs, refine)? {
            return Ok(phis);
        }
        refine *= 2;
        if refine > MAX_LIFT_REFINE {
            return Err(Error::Convergence(
                "azimuth branch lift kept advancing by more than a radian per node at \
                 the finest refinement; the profile is wilder than the built-in families"
                    .into(),
            ));
        }
    }
}

fn try_lift(spec: SurfaceSpec, fr: &Frame, xs: &[f64], refine: usize) -> Result<Option<Vec<f64>>> {
    let mut out = Vec::with_capacity(xs.len());
    let mut prev = 0.0_f64;
    out.push(0.0);
    for pair in xs.windows(2) {
        for k in 1..=refine {
            let x = pair[0] + (pair[1] - pair[0]) * (k as f64 / refine as f64);
            let theta = (fr.c0 * x.sin()).acos();
            let (sin_phi, cos_phi) = projection_pair(spec, fr, theta, 1.0)?;
            let raw = sin_phi.atan2(cos_phi);
            let lifted = raw + TAU * ((prev - raw) / TAU).round();
            if (lifted - prev).abs() > MAX_LIFT_STEP {
                return Ok(None);
            }
            prev = lifted;
        }
        out.push(prev);
    }
    Ok(Some(out))
}

/// Accumulated azimuth of the geodesic of inclination `i` at latitude θ on
/// branch `eps` (+1 while the latitude increases, −1 while it decreases).
///
/// The increasing branch is anchored at φ(i) = 0 and rises to the
/// half-oscillation advance R at θ = π − i; the decreasing branch continues
/// through the upper turning circle by the reflection symmetry of the
/// geodesic about the turning meridian, φ = 2R − φ_increasing(θ), so its
/// values lie in [R, 2R]. Near the turning circles the meridian momentum is
/// a square root of a difference of nearly equal sines, so recovered values
/// carry noise of order √ulp (about 1e−8) there.
pub fn parametric_phi(spec: SurfaceSpec, i: f64, theta: f64, eps: i8) -> Result<f64> {
    if eps != 1 && eps != -1 {
        return Err(Error::Domain(format!(
            "branch sign must be +1 or -1, got {eps}"
        )));
    }
    let fr = frame(spec, i)?;
    check_theta_in_band(i, theta)?;
    // Substitution angle of the query latitude; the clamp absorbs the
    // BAND_SLACK overshoot tolerance at the turning circles.
    let x_end = (theta.cos() / fr.c0).clamp(-1.0, 1.0).asin();
    let phi_increasing = if x_end >= 0.5 * PI {
        // The query is the start itself: anchored at exactly zero rather
        // than marched, so the contract value carries no roundtrip noise.
        0.0
    } else {
        let xs = grid_descending(0.5 * PI, x_end, lift_nodes_for_span(0.5 * PI - x_end));
        *lift_on_grid(spec, &fr, &xs)?
            .last()
            .expect("the lift returns one value per node")
    };
    if eps == 1 {
        return Ok(phi_increasing);
    }
    let xs = grid_descending(0.5 * PI, -0.5 * PI, lift_nodes_for_span(PI));
    let half_advance = *lift_on_grid(spec, &fr, &xs)?
        .last()
        .expect("the lift returns one value per node");
    Ok(2.0 * half_advance - phi_increasing)
}

/// The closed geodesic of inclination `i` as a branch-resolved sample list:
/// q latitude oscillations, each an increasing branch from θ = i to π − i
/// followed by the decreasing branch back, with the azimuth lifted
/// continuously across all of them. The azimuth is strictly increasing along
/// the samples and the branch sign flips exactly at the turning latitudes.
pub fn parametric_curve(
    spec: SurfaceSpec,
    i: f64,
    samples_per_branch: usize,
) -> Result<GeodesicCurve> {
    let fr = frame(spec, i)?;
    let n = samples_per_branch.max(2);
    let class = rotation_number(spec, i, CLASS_QUAD_TOL)?;
    let xs = grid_descending(0.5 * PI, -0.5 * PI, n);
    let phis = lift_on_grid(spec, &fr, &xs)?;
    let half_advance = *phis.last().expect("the lift returns one value per node");
    let thetas: Vec<f64> = xs.iter().map(|&x| (fr.c0 * x.sin()).acos()).collect();

    let mut samples = Vec::with_capacity(class.q as usize * 2 * n + 1);
    let mut base = 0.0;
    for oscillation in 0..class.q {
        for j in 0..=n {
            if oscillation > 0 && j == 0 {
                // The previous oscillation already emitted this θ = i node.
                continue;
            }
            samples.push(CurveSample {
                theta: thetas[j],
                phi: base + phis[j],
                branch: 1,
            });
        }
        for j in (0..n).rev() {
            samples.push(CurveSample {
                theta: thetas[j],
                phi: base + 2.0 * half_advance - phis[j],
                branch: -1,
            });
        }
        base += 2.0 * half_advance;
    }
    Ok(GeodesicCurve {
        i,
        samples,
        total_phi: base,
    })
}

/// Integrate the flow from the canonical start until it first returns to
/// within `tol` of that start, and report the period together with the
/// (turns, oscillations) counts, cross-checked against the rotation
/// classification.
///
/// Return candidates are the lower turning points (the latitude minima),
/// located on the dense output; at each one the distance to the start is
/// max(|θ − i|, |p_θ|, |φ − 2π·round(φ/2π)|) — the azimuth component judged
/// modulo full turns, which is what "return" means on the surface.
pub fn closure_check(spec: SurfaceSpec, i: f64, tol: f64) -> Result<ClosureReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Domain(format!(
            "closure tolerance must be positive, got {tol}"
        )));
    }
    check_inclination(i)?;
    check_band_regular(spec, i)?;
    let start = flow::initial_phase(spec, i)?;
    let traj = flow::integrate(spec, start, NO_RETURN_SPAN, FlowSettings::default())?;
    let mut oscillations = 0u32;
    for &(t, theta_turn) in &flow::turning_points(&traj)? {
        if t == 0.0 {
            // The start itself is a lower turning point, not a return.
            continue;
        }
        if (theta_turn - i).abs() > (theta_turn - (PI - i)).abs() {
            // Upper turning points sit near π − i and do not close a
            // latitude oscillation.
            continue;
        }
        oscillations += 1;
        let at = traj.sample_at(t)?;
        let winding = (at.phi / TAU).round();
        let residual = (at.theta - start.theta)
            .abs()
            .max(at.p_theta.abs())
            .max((at.phi - TAU * winding).abs());
        if residual <= tol && winding >= 1.0 {
            let class = rotation_number(spec, i, CLASS_QUAD_TOL)?;
            let turns = winding as u32;
            if (turns, oscillations) != (class.p, class.q) {
                return Err(Error::Classification(format!(
                    "first-return counts (turns, oscillations) = ({turns}, {oscillations}) \
                     disagree with the rotation classification ({}, {})",
                    class.p, class.q
                )));
            }
            return Ok(ClosureReport {
                period: t,
                residual,
                turns,
                oscillations,
            });
        }
    }
    Err(Error::NoReturn {
        searched: NO_RETURN_SPAN,
    })
}

/// Max azimuth deviation |φ_parametric − φ_flow| over one full latitude
/// oscillation, branch-aligned via the sign of the integrated p_θ.
///
/// The comparison runs at the integrator's accepted steps rather than at
/// dense-output samples: the interpolant between steps is a quartic whose
/// error is set by the step size, not by the step tolerance, and would
/// dominate the honest flow error by orders of magnitude.
pub fn compare_parametric_numeric(spec: SurfaceSpec, i: f64) -> Result<f64> {
    frame(spec, i)?;
    // Arclength of one oscillation: dt = A dx in the substitution angle, so
    // half a period is the plain substitution integral of the profile.
    let half_period = substitution_integral(|theta| Ok(profile(spec, theta)?.a), i, 1e-12)?;
    let start = flow::initial_phase(spec, i)?;
    let traj = flow::integrate(
        spec,
        start,
        2.0 * half_period * 1.002,
        FlowSettings::default(),
    )?;
    // The oscillation actually closes at the last lower turning point of
    // the slightly over-integrated span; samples past it belong to the next
    // oscillation, where the parametric lift restarts.
    let t_return = flow::turning_points(&traj)?
        .iter()
        .rev()
        .find(|&&(t, th)| t > 0.0 && (th - i).abs() < (th - (PI - i)).abs())
        .map(|&(t, _)| t)
        .ok_or_else(|| {
            Error::Convergence("no latitude return inside the oscillation window".into())
        })?;

    let mut worst = 0.0_f64;
    for (k, &(t, at)) in traj.samples.iter().enumerate() {
        if t > t_return {
            break;
        }
        // The start is a turning point with p_theta exactly zero, on the
        // increasing branch by construction; everywhere else the momentum
        // sign is the branch. Samples near the upper turning circle are
        // branch-insensitive: both evaluations agree there to the size of
        // p_theta itself.
        let eps: i8 = if k == 0 || at.p_theta > 0.0 { 1 } else { -1 };
        let here = parametric_phi(spec, i, at.theta.clamp(i, PI - i), eps)?;
        worst = worst.max((here - at.phi).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::all_specs;
    use std::f64::consts::FRAC_PI_2;

    /// Rotation values must land on their fraction of π to the module
    /// contract bound; the quadrature itself runs two orders tighter.
    const ROTATION_TOL: f64 = 1e-8;
    const ROTATION_QUAD_TOL: f64 = 1e-10;

    /// First-return bound for closure checks and parametric-vs-flow
    /// comparisons, set by the flow's accumulated error over one period.
    const CLOSURE_TOL: f64 = 1e-6;

    /// Even-part flatness of the profiles: exact identities, so only
    /// rounding noise is allowed.
    const EVEN_PART_TOL: f64 = 1e-12;

    /// The family (p, q) targets: Zoll families close in one turn and one
    /// oscillation, Tannery families in two turns and one oscillation.
    fn expected_class(spec: SurfaceSpec) -> (u32, u32) {
        match spec {
            SurfaceSpec::ZollSphere { .. } | SurfaceSpec::ZollOrbifold { .. } => (1, 1),
            SurfaceSpec::TanneryPear | SurfaceSpec::TanneryGeneralized { .. } => (2, 1),
        }
    }

    /// One flow-safe representative per family: the orbifold pick keeps the
    /// classical band of every tested inclination clear of its degenerate
    /// latitude.
    fn family_reps() -> Vec<SurfaceSpec> {
        vec![
            SurfaceSpec::zoll_sphere(1.0, 2.0).expect("in-domain parameters"),
            SurfaceSpec::pear(),
            SurfaceSpec::generalized(-0.5).expect("in-domain parameters"),
            SurfaceSpec::orbifold(-0.9, 0.01).expect("in-domain parameters"),
        ]
    }

    #[test]
    fn round_sphere_rotation_is_pi_at_every_inclination() {
        for &i in &[0.2, 0.7, 1.3, 1.45] {
            let value =
                rotation_integral(|_| Ok(1.0), i, 1e-12).expect("constant profile integrates");
            assert!(
                (value - PI).abs() < 1e-10,
                "unit profile must rotate by pi at i = {i}, got {value}"
            );
        }
    }

    #[test]
    fn zoll_families_rotate_by_pi_independent_of_inclination() {
        let zolls = [
            SurfaceSpec::zoll_sphere(1.0, 2.0).expect("in-domain parameters"),
            SurfaceSpec::zoll_sphere(-1.0, 3.0).expect("in-domain parameters"),
            SurfaceSpec::zoll_sphere(5.0, 10.0).expect("in-domain parameters"),
            SurfaceSpec::orbifold(-0.9, 0.01).expect("in-domain parameters"),
            SurfaceSpec::orbifold(0.3, 2.0).expect("in-domain parameters"),
        ];
        for spec in zolls {
            for &i in &[0.1, 0.7, 1.5] {
                let r = rotation_number(spec, i, ROTATION_QUAD_TOL).expect("rotation classifies");
                assert!(
                    (r.value - PI).abs() < ROTATION_TOL,
                    "{spec:?} at i = {i}: rotation {} strays from pi",
                    r.value
                );
                assert_eq!(
                    (r.p, r.q),
                    (1, 1),
                    "{spec:?} at i = {i} must classify as 1/1"
                );
            }
        }
    }

    #[test]
    fn tannery_families_rotate_by_two_pi_independent_of_inclination() {
        let tannerys = [
            SurfaceSpec::pear(),
            SurfaceSpec::generalized(-0.9).expect("in-domain parameters"),
            SurfaceSpec::generalized(0.0).expect("in-domain parameters"),
            SurfaceSpec::generalized(0.9).expect("in-domain parameters"),
        ];
        for spec in tannerys {
            for &i in &[0.1, 0.7, 1.5] {
                let r = rotation_number(spec, i, ROTATION_QUAD_TOL).expect("rotation classifies");
                assert!(
                    (r.value - TAU).abs() < ROTATION_TOL,
                    "{spec:?} at i = {i}: rotation {} strays from 2 pi",
                    r.value
                );
                assert_eq!(
                    (r.p, r.q),
                    (2, 1),
                    "{spec:?} at i = {i} must classify as 2/1"
                );
            }
        }
    }

    #[test]
    fn rotation_grid_matches_sequential_evaluation_bit_for_bit() {
        let spec = SurfaceSpec::zoll_sphere(0.0, 1.5).expect("in-domain parameters");
        let grid: Vec<f64> = (0..15).map(|k| 0.1 + 0.1 * k as f64).collect();
        let batch = rotation_grid(spec, &grid, ROTATION_QUAD_TOL);
        for (k, (&i, b)) in grid.iter().zip(&batch).enumerate() {
            let s = rotation_number(spec, i, ROTATION_QUAD_TOL).expect("rotation classifies");
            let b = b.as_ref().expect("batch rotation classifies");
            assert!(
                s.value.to_bits() == b.value.to_bits()
                    && s.residual.to_bits() == b.residual.to_bits(),
                "batch entry {k} diverges from the sequential value"
            );
        }
    }

    #[test]
    fn classifier_rejects_an_irrational_rotation_value() {
        let err = classify(0.5, std::f64::consts::SQRT_2 * PI, 1e-10)
            .expect_err("sqrt(2) pi is not a small fraction of pi");
        assert!(
            matches!(err, Error::Classification(_)),
            "expected a classification failure, got {err:?}"
        );
        let ok = classify(0.5, 1.5 * PI, 1e-10).expect("3 pi / 2 classifies");
        assert_eq!((ok.p, ok.q), (3, 2), "3 pi / 2 must classify as 3/2");
    }

    #[test]
    fn odd_profile_constants_are_the_closure_ratios() {
        for spec in all_specs() {
            let (constant, violation) = odd_profile_check(spec, 1000);
            let expected = match spec {
                SurfaceSpec::ZollSphere { .. } | SurfaceSpec::ZollOrbifold { .. } => 1.0,
                SurfaceSpec::TanneryPear | SurfaceSpec::TanneryGeneralized { .. } => 2.0,
            };
            assert!(
                (constant - expected).abs() < EVEN_PART_TOL,
                "{spec:?}: even part {constant} is not the closure ratio {expected}"
            );
            assert!(
                violation < EVEN_PART_TOL,
                "{spec:?}: even part wobbles by {violation:e}"
            );
        }
    }

    #[test]
    fn odd_kernel_contribution_vanishes_under_the_rotation_quadrature() {
        // The odd part of the profile integrates to zero against the
        // rotation kernel; that cancellation is exactly why the rotation
        // value is inclination-independent.
        for spec in family_reps() {
            let odd =
                |theta: f64| Ok(0.5 * (profile(spec, theta)?.a - profile(spec, PI - theta)?.a));
            let value = rotation_integral(odd, 0.6, 1e-12).expect("odd part integrates");
            assert!(
                value.abs() < 1e-10,
                "{spec:?}: odd kernel contribution {value:e} fails to cancel"
            );
        }
    }

    #[test]
    fn parametric_phi_is_exactly_zero_at_the_start() {
        for spec in family_reps() {
            let phi = parametric_phi(spec, 0.7, 0.7, 1).expect("start is in band");
            assert_eq!(
                phi, 0.0,
                "{spec:?}: increasing branch must be anchored at zero azimuth"
            );
        }
    }

    #[test]
    fn parametric_phi_reaches_the_rotation_value_at_the_top() {
        for spec in family_reps() {
            let i = 0.7;
            let (p, _) = expected_class(spec);
            let target = p as f64 * PI;
            let top = parametric_phi(spec, i, PI - i, 1).expect("top is in band");
            assert!(
                (top - target).abs() < CLOSURE_TOL,
                "{spec:?}: half-oscillation advance {top} misses {target}"
            );
            let back = parametric_phi(spec, i, i, -1).expect("bottom is in band");
            assert!(
                (back - 2.0 * target).abs() < CLOSURE_TOL,
                "{spec:?}: full-oscillation advance {back} misses {}",
                2.0 * target
            );
        }
    }

    #[test]
    fn parametric_phi_is_strictly_monotone_on_both_branches() {
        let i = 0.5;
        for spec in [
            SurfaceSpec::zoll_sphere(1.0, 2.0).expect("in-domain parameters"),
            SurfaceSpec::pear(),
        ] {
            let n = 1000;
            let mut prev_inc = -1.0;
            let mut prev_dec = f64::INFINITY;
            for k in 0..=n {
                let theta = i + (PI - 2.0 * i) * (k as f64 / n as f64);
                let inc = parametric_phi(spec, i, theta, 1).expect("in band");
                assert!(
                    inc > prev_inc,
                    "{spec:?}: increasing branch stalls at theta = {theta}"
                );
                prev_inc = inc;
                let dec = parametric_phi(spec, i, theta, -1).expect("in band");
                assert!(
                    dec < prev_dec,
                    "{spec:?}: decreasing branch must advance as theta falls, \
                     stalls at theta = {theta}"
                );
                prev_dec = dec;
            }
        }
    }

    #[test]
    fn parametric_phi_rejects_latitudes_outside_the_band() {
        let spec = SurfaceSpec::zoll_sphere(1.0, 2.0).expect("in-domain parameters");
        for theta in [0.5, PI - 0.5] {
            let err = parametric_phi(spec, 0.7, theta, 1)
                .expect_err("forbidden latitude must be rejected");
            assert!(
                matches!(err, Error::Domain(_)),
                "expected a domain error, got {err:?}"
            );
        }
        let err = parametric_phi(spec, 0.7, 1.0, 0).expect_err("branch sign 0 must be rejected");
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn parametric_curves_advance_by_two_pi_p() {
        for spec in family_reps() {
            for &i in &[0.4, 1.47] {
                let curve = parametric_curve(spec, i, 200).expect("curve builds");
                let (p, q) = expected_class(spec);
                assert!(
                    (curve.total_phi - TAU * p as f64).abs() < CLOSURE_TOL,
                    "{spec:?} at i = {i}: total advance {} misses 2 pi p = {}",
                    curve.total_phi,
                    TAU * p as f64
                );
                assert_eq!(
                    curve.samples.len(),
                    q as usize * 400 + 1,
                    "{spec:?} at i = {i}: sample count off"
                );
                assert_eq!(
                    curve.samples[0].phi, 0.0,
                    "{spec:?} at i = {i}: curve must start at zero azimuth"
                );
                let mut flips = 0usize;
                for pair in curve.samples.windows(2) {
                    assert!(
                        pair[1].phi > pair[0].phi,
                        "{spec:?} at i = {i}: azimuth stalls near theta = {}",
                        pair[1].theta
                    );
                    if pair[0].branch != pair[1].branch {
                        flips += 1;
                        let at = pair[0].theta;
                        let near_turning = (at - i).abs() < 1e-9 || (at - (PI - i)).abs() < 1e-9;
                        assert!(
                            near_turning,
                            "{spec:?} at i = {i}: branch flips away from a turning \
                             latitude, at theta = {at}"
                        );
                    }
                }
                assert_eq!(
                    flips,
                    2 * q as usize - 1,
                    "{spec:?} at i = {i}: wrong number of branch flips"
                );
            }
        }
    }

    #[test]
    fn curves_vary_continuously_at_the_corner_parameter() {
        // The lowest admissible first parameter of the sphere family is a
        // domain corner; curves there must be the limit of curves nearby.
        let at_corner = parametric_curve(
            SurfaceSpec::zoll_sphere(-1.0, 3.0).expect("in-domain parameters"),
            0.8,
            200,
        )
        .expect("curve builds");
        let nearby = parametric_curve(
            SurfaceSpec::zoll_sphere(-1.0 + 1e-12, 3.0).expect("in-domain parameters"),
            0.8,
            200,
        )
        .expect("curve builds");
        let worst = at_corner
            .samples
            .iter()
            .zip(&nearby.samples)
            .map(|(a, b)| (a.phi - b.phi).abs())
            .fold(0.0f64, f64::max);
        assert!(
            worst < 1e-9,
            "curves at and next to the corner parameter diverge by {worst:e}"
        );
    }

    #[test]
    fn pear_equator_azimuth_matches_the_flow_oracle() {
        // The mid-band azimuth of the pear geodesic of inclination 1/2,
        // cross-checked against the integrated flow. The value is
        // 2 pi - 2.0707963... ~ 4.2123889803847, reproducibly away from any
        // simple closed-form guess.
        let spec = SurfaceSpec::pear();
        let i = 0.5;
        let parametric = parametric_phi(spec, i, FRAC_PI_2, 1).expect("equator is in band");
        let start = flow::initial_phase(spec, i).expect("inclination in range");
        let traj =
            flow::integrate(spec, start, TAU, FlowSettings::default()).expect("flow integrates");
        // First upward equator crossing, bisected on the dense output.
        let mut crossing = None;
        for pair in traj.samples.windows(2) {
            let (ta, pa) = pair[0];
            let (tb, pb) = pair[1];
            if pa.theta < FRAC_PI_2 && pb.theta >= FRAC_PI_2 && pa.p_theta > 0.0 {
                let (mut lo, mut hi) = (ta, tb);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let at = traj.sample_at(mid).expect("inside the span");
                    if at.theta < FRAC_PI_2 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                crossing = Some(0.5 * (lo + hi));
                break;
            }
        }
        let t_cross = crossing.expect("the increasing branch crosses the equator");
        let oracle = traj.sample_at(t_cross).expect("inside the span").phi;
        assert!(
            (parametric - oracle).abs() < 1e-8,
            "parametric equator azimuth {parametric} vs flow oracle {oracle}"
        );
        assert!(
            (parametric - 4.21238898038469).abs() < 1e-9,
            "pear equator azimuth moved from its pinned value: {parametric}"
        );
    }

    #[test]
    fn closure_check_recovers_the_zoll_period() {
        let spec = SurfaceSpec::zoll_sphere(1.0, 2.0).expect("in-domain parameters");
        let report = closure_check(spec, 0.25 * PI, CLOSURE_TOL).expect("geodesic closes");
        assert_eq!(
            (report.turns, report.oscillations),
            (1, 1),
            "sphere-family geodesics close in one turn and one oscillation"
        );
        assert!(
            (report.period - TAU).abs() < CLOSURE_TOL,
            "closed-geodesic length {} is not 2 pi",
            report.period
        );
        // The return should be as sharp as the integrator, far sharper than
        // the acceptance tolerance.
        assert!(
            report.residual < 1e-7,
            "return residual {:e} is out of scale with the integrator drift",
            report.residual
        );
    }

    #[test]
    fn closure_check_counts_every_family_correctly() {
        for spec in family_reps() {
            let report = closure_check(spec, 0.7, CLOSURE_TOL).expect("geodesic closes");
            let (p, q) = expected_class(spec);
            assert_eq!(
                (report.turns, report.oscillations),
                (p, q),
                "{spec:?}: wrong closure counts"
            );
            // Flat even part makes every closed geodesic 2 pi p long.
            assert!(
                (report.period - TAU * p as f64).abs() < CLOSURE_TOL,
                "{spec:?}: period {} is not 2 pi p",
                report.period
            );
        }
    }

    #[test]
    fn closure_check_reports_no_return_for_an_unreachable_tolerance() {
        let spec = SurfaceSpec::zoll_sphere(1.0, 2.0).expect("in-domain parameters");
        let err =
            closure_check(spec, 0.7, 1e-16).expect_err("no integrated return is ever this sharp");
        assert!(
            matches!(err, Error::NoReturn { .. }),
            "expected a no-return report, got {err:?}"
        );
    }

    #[test]
    fn orbifold_operations_reject_bands_reaching_the_degenerate_latitude() {
        // For these parameters the profile vanishes at about 2.0030, so
        // inclinations below pi - 2.0030 ~ 1.1386 put the degenerate
        // latitude inside the classical band.
        let spec = SurfaceSpec::orbifold(0.3, 2.0).expect("in-domain parameters");
        for result in [
            parametric_phi(spec, 0.3, 1.0, 1).map(|_| ()),
            parametric_curve(spec, 0.3, 64).map(|_| ()),
            closure_check(spec, 0.3, CLOSURE_TOL).map(|_| ()),
        ] {
            let err = result.expect_err("band reaches the degenerate latitude");
            assert!(
                matches!(err, Error::Domain(_)),
                "expected a domain rejection, got {err:?}"
            );
        }
        // A steeper inclination keeps the band clear and must work.
        let report = closure_check(spec, 1.2, CLOSURE_TOL).expect("geodesic closes");
        assert_eq!((report.turns, report.oscillations), (1, 1));
    }

    #[test]
    fn parametric_and_integrated_geodesics_agree_for_all_families() {
        for spec in family_reps() {
            for &i in &[0.3, 0.7, 1.2] {
                let deviation = compare_parametric_numeric(spec, i).expect("comparison runs");
                assert!(
                    deviation < CLOSURE_TOL,
                    "{spec:?} at i = {i}: parametric and integrated azimuths \
                     diverge by {deviation:e}"
                );
            }
        }
    }

    #[test]
    fn curve_csv_has_the_documented_shape() {
        let spec = SurfaceSpec::pear();
        let curve = parametric_curve(spec, 0.7, 8).expect("curve builds");
        let mut buf = Vec::new();
        curve.to_csv(&mut buf).expect("in-memory write");
        let text = String::from_utf8(buf).expect("ascii output");
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("theta,phi,branch"), "header line");
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), curve.samples.len(), "one row per sample");
        for row in rows {
            let fields: Vec<&str> = row.split(',').collect();
            assert_eq!(fields.len(), 3, "row {row} must have three fields");
            fields[0].parse::<f64>().expect("theta parses");
            fields[1].parse::<f64>().expect("phi parses");
            assert!(
                fields[2] == "1" || fields[2] == "-1",
                "branch must be +-1, got {}",
                fields[2]
            );
        }
    }

    #[test]
    fn json_records_carry_every_field() {
        let spec = SurfaceSpec::pear();
        let rotation = rotation_number(spec, 0.6, ROTATION_QUAD_TOL).expect("classifies");
        let parsed: serde_json::Value =
            serde_json::from_str(&rotation.to_json()).expect("valid JSON");
        assert_eq!(parsed["p"], 2);
        assert_eq!(parsed["q"], 1);
        assert!(
            (parsed["value"].as_f64().expect("value is a number") - TAU).abs() < 1e-8,
            "serialized rotation value drifted"
        );
        let report = closure_check(spec, 0.7, CLOSURE_TOL).expect("geodesic closes");
        let parsed: serde_json::Value =
            serde_json::from_str(&report.to_json()).expect("valid JSON");
        assert_eq!(parsed["turns"], 2);
        assert_eq!(parsed["oscillations"], 1);
        assert!(
            parsed["period"].as_f64().expect("period is a number") > 0.0,
            "serialized period must be positive"
        );
        assert!(
            parsed["residual"].as_f64().expect("residual is a number") >= 0.0,
            "serialized residual must be reported"
        );
    }
}
