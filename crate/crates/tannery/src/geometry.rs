//! Metric geometry and visualization data: Gaussian curvature, surface
//! measure, the pear's closed-form embedding, numeric embedding profiles
//! for the other rotational charts, embeddability classification, and mesh
//! and polyline export in Wavefront OBJ form.
//!
//! Curvature of the metric A²(θ)dθ² + sin²θ dφ² follows from the standard
//! surface-of-revolution reduction: with r = sin θ the curvature is
//! K = −(d/dθ)(r′/A)/(A r), and expanding the derivative gives
//! K = (sin θ · A + cos θ · A′)/(sin θ · A³), the formula used throughout.

use crate::closure::GeodesicCurve;
use crate::error::{Error, Result};
use crate::numeric::quad;
use crate::surfaces::{
    chart_metric, generalized, pear, pole_limits, profile, theta_to_chart, zoll_sphere, Chart,
    SurfaceSpec,
};
use rayon::prelude::*;
use std::f64::consts::{PI, SQRT_2, TAU};
use std::io::{self, Write};

/// Default truncation of the unbounded w-charts. The conical vertex sits at
/// w → ∞ but at finite height; the height left beyond the truncation is
/// measured by quadrature in the compactified variable u = 1/√w and carried
/// in the profile, never assumed away.
pub const DEFAULT_CHART_EXTENT: f64 = 1e3;

/// Quadrature tolerance for the one-dimensional measure and curvature
/// integrals; the acceptance bounds sit two orders above it.
const MEASURE_QUAD_TOL: f64 = 1e-12;

/// Tolerance for the native chart area cross-check. Looser than the measure
/// tolerance: the flattest chart members carry a sharp metric peak whose
/// floating-point noise floor defeats a 1e-12 budget.
const CHART_AREA_QUAD_TOL: f64 = 1e-10;

/// Per-segment tolerance for the cumulative height quadrature.
const SEGMENT_QUAD_TOL: f64 = 1e-13;

/// Flattening floor of the generalized family's rotational embedding:
/// −2√2/3. At or below it the classification rejects the embedding.
pub const EMBED_FLATTENING_FLOOR: f64 = -2.0 * SQRT_2 / 3.0;

/// Height-slope radicands below this are treated as contradicting the
/// embeddability classification rather than as roundoff.
const RADICAND_SLACK: f64 = 1e-12;

/// A latitude paired with the Gaussian curvature there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub theta: f64,
    pub k: f64,
}

/// Gaussian curvature K = (sin θ · A + cos θ · A′)/(sin θ · A³) at an
/// interior latitude.
pub fn gaussian_curvature(spec: SurfaceSpec, theta: f64) -> Result<CurvatureSample> {
    let ev = profile(spec, theta)?;
    let k = (ev.s * ev.a + ev.c * ev.da) / (ev.s * ev.a.powi(3));
    Ok(CurvatureSample { theta, k })
}

/// Total measure μ = 2π ∫₋₁¹ A(θ(x)) dx with x = cos θ. The integrand is
/// smooth in x, and the odd structure of the profiles makes the value
/// exactly 4π times the even-part constant of the family.
pub fn surface_measure(spec: SurfaceSpec) -> Result<f64> {
    let mut first_failure = None;
    let quadrature = quad::integrate(
        |x| match profile(spec, x.acos()) {
            Ok(ev) => ev.a,
            Err(e) => {
                first_failure.get_or_insert(e);
                f64::NAN
            }
        },
        -1.0,
        1.0,
        MEASURE_QUAD_TOL,
    );
    match first_failure {
        Some(e) => Err(e),
        None => Ok(TAU * quadrature?.value),
    }
}

/// Integral of the Gaussian curvature against the area element,
/// 2π ∫₀^π (sin θ · A + cos θ · A′)/A² dθ.
///
/// Smooth spheres give 4π; the pear-type families give 4π minus the conical
/// defect 4π/3 of their vertex. The orbifold family is rejected: its profile
/// vanishes at an interior latitude, where the integrand diverges
/// non-integrably.
pub fn total_curvature(spec: SurfaceSpec) -> Result<f64> {
    if matches!(spec, SurfaceSpec::ZollOrbifold { .. }) {
        return Err(Error::Unsupported(
            "the curvature integrand diverges at the interior latitude where this \
             family's profile vanishes"
                .into(),
        ));
    }
    let mut first_failure = None;
    let quadrature = quad::integrate(
        |theta| match profile(spec, theta) {
            Ok(ev) => (ev.s * ev.a + ev.c * ev.da) / (ev.a * ev.a),
            Err(e) => {
                first_failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        PI,
        MEASURE_QUAD_TOL,
    );
    match first_failure {
        Some(e) => Err(e),
        None => Ok(TAU * quadrature?.value),
    }
}

/// Surface measure recomputed as a two-dimensional quadrature of √(det g)
/// over the family's native rational chart, scaled to the θ-form
/// normalization. Cross-checks `surface_measure` without going through θ.
///
/// The orbifold family is rejected: its chart metric degenerates on an
/// interior circle where the profile changes sign, so the chart quadrature
/// measures the unsigned area while the measure integral is signed, and the
/// two legitimately disagree.
pub fn native_chart_area(spec: SurfaceSpec) -> Result<f64> {
    if matches!(spec, SurfaceSpec::ZollOrbifold { .. }) {
        return Err(Error::Unsupported(
            "the native chart metric degenerates on an interior circle; the chart \
             area is the unsigned measure and cannot reproduce the signed one"
                .into(),
        ));
    }
    let scale = spec.scale();
    let chart = |value: f64| -> Result<f64> {
        let point = crate::surfaces::chart_point(spec, crate::surfaces::native_chart(spec), value)?;
        let (g_uu, g_pp) = chart_metric(spec, point)?;
        Ok((g_uu * g_pp).sqrt())
    };
    let mut first_failure = None;
    let quadrature = match spec {
        SurfaceSpec::ZollSphere { .. } => quad::integrate(
            |x| match chart(x) {
                Ok(v) => v,
                Err(e) => {
                    first_failure.get_or_insert(e);
                    f64::NAN
                }
            },
            -1.0,
            1.0,
            CHART_AREA_QUAD_TOL,
        ),
        _ => quad::integrate(
            // w ∈ (0, ∞) compactified by w = t/(1−t); the √(det g) tail
            // falls like 1/w², leaving a bounded integrand in t.
            |t| {
                let w = t / (1.0 - t);
                let jacobian = 1.0 / ((1.0 - t) * (1.0 - t));
                match chart(w) {
                    Ok(v) => v * jacobian,
                    Err(e) => {
                        first_failure.get_or_insert(e);
                        f64::NAN
                    }
                }
            },
            0.0,
            1.0,
            CHART_AREA_QUAD_TOL,
        ),
    };
    match first_failure {
        Some(e) => Err(e),
        None => Ok(TAU * scale * quadrature?.value),
    }
}

/// Cone angles (at θ = 0, at θ = π) read off the metric asymptotics: near a
/// pole the circumference-to-radius ratio tends to 2π/|A(pole)|, so a pole
/// is regular exactly when |A| → 1 there.
pub fn cone_angles(spec: SurfaceSpec) -> (f64, f64) {
    let (north, south) = pole_limits(spec);
    (TAU / north.abs(), TAU / south.abs())
}

/// The pear's closed-form global embedding: radius sin θ, height
/// 4√2 sin(θ/2) above the conical vertex at the origin. Points satisfy
/// X² + Y² = (Z²/8)(1 − Z²/32).
pub fn embed_pear(theta: f64, phi: f64) -> Result<(f64, f64, f64)> {
    if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
        return Err(Error::Domain(format!(
            "embedding latitude must lie in [0, pi], got {theta}"
        )));
    }
    if !phi.is_finite() {
        return Err(Error::Domain(format!(
            "embedding azimuth must be finite, got {phi}"
        )));
    }
    Ok(pear::embed(theta, phi))
}

/// Residual of the pear's cartesian surface equation at a point,
/// |X² + Y² − (Z²/8)(1 − Z²/32)|.
pub fn pear_cartesian_residual(x: f64, y: f64, z: f64) -> f64 {
    let z2 = z * z;
    (x * x + y * y - z2 / 8.0 * (1.0 - z2 / 32.0)).abs()
}

/// The pear's Gaussian curvature in closed form, 2/(2 + cos θ)³. The
/// generic curvature formula is required to reproduce this to roundoff.
pub fn pear_curvature_closed_form(theta: f64) -> f64 {
    pear::curvature(theta.cos())
}

/// The pear's cumulative embedding height above its regular pole in closed
/// form, 4√2 (1 − 1/√(1+w)). The quadrature-built profile is required to
/// reproduce this.
pub fn pear_height_closed_form(w: f64) -> f64 {
    pear::height_w(w)
}

/// Whether the surface admits a rotational isometric embedding in R³, with
/// the reason. Defined for the pear, the generalized family, and the l = −1
/// spherical member; the general spherical and orbifold families have no
/// embedding construction here and are rejected as unsupported.
pub fn embeddability(spec: SurfaceSpec) -> Result<(bool, String)> {
    match spec {
        SurfaceSpec::TanneryPear => Ok((
            true,
            "global closed-form embedding of revolution".to_string(),
        )),
        SurfaceSpec::TanneryGeneralized { a } => {
            if a > EMBED_FLATTENING_FLOOR {
                Ok((
                    true,
                    format!(
                        "flattening parameter {a} lies above the embeddability \
                         threshold {EMBED_FLATTENING_FLOOR}"
                    ),
                ))
            } else {
                Ok((
                    false,
                    format!(
                        "flattening parameter {a} at or below the embeddability \
                         threshold {EMBED_FLATTENING_FLOOR}"
                    ),
                ))
            }
        }
        SurfaceSpec::ZollSphere { m, .. } => match spec.zoll_v_parameter() {
            Some(a_v) if a_v >= 0.0 => Ok((
                true,
                format!(
                    "height slope stays nonnegative across the rational chart \
                     (chart parameter {a_v})"
                ),
            )),
            Some(a_v) => Ok((
                false,
                format!(
                    "height slope turns negative between the poles for m = {m} \
                     (chart parameter {a_v} < 0)"
                ),
            )),
            None => Err(Error::Unsupported(
                "no rotational embedding construction for the general spherical family".into(),
            )),
        },
        SurfaceSpec::ZollOrbifold { .. } => Err(Error::Unsupported(
            "no embedding analysis for the orbifold family; its profile changes sign".into(),
        )),
    }
}

/// A sampled rotational embedding profile: chart values, embedded radius,
/// and cumulative height, with the height anchored at zero on the θ = π end
/// of the chart. Rows are uniform in latitude, ascending in the chart value.
#[derive(Debug, Clone)]
pub struct EmbeddingProfile {
    pub spec: SurfaceSpec,
    pub chart: Chart,
    /// Latitude of each row, descending from π.
    pub theta: Vec<f64>,
    /// Chart value of each row, ascending.
    pub w: Vec<f64>,
    /// Embedded radius at each row.
    pub radius: Vec<f64>,
    /// Cumulative height above the θ = π pole at each row.
    pub height: Vec<f64>,
    /// Full height of the surface, including the measured tail beyond the
    /// chart truncation for the unbounded charts.
    pub total_height: f64,
    /// Height carried by the truncated chart tail (zero for compact charts),
    /// measured by quadrature in the compactified tail variable.
    pub truncation_gap: f64,
    pub embeddable: bool,
    pub reason: String,
}

impl EmbeddingProfile {
    /// CSV export with header `w,A,B`: chart value, radius, height, all at
    /// 17 significant digits.
    pub fn to_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "w,A,B")?;
        for ((w, a), b) in self.w.iter().zip(&self.radius).zip(&self.height) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", w, a, b)?;
        }
        Ok(())
    }
}

/// Chart the rotational embedding is parameterized on: the compact v-chart
/// for the spherical member, the unbounded w-chart otherwise. The spherical
/// family's native chart is x, but its embedding kernels live on v.
fn embedding_chart(spec: SurfaceSpec) -> Chart {
    match spec {
        SurfaceSpec::ZollSphere { .. } => Chart::V,
        _ => Chart::W,
    }
}

/// Embedded radius at a chart value, per family.
fn embed_radius(spec: SurfaceSpec, value: f64) -> f64 {
    match spec {
        SurfaceSpec::TanneryPear => pear::radius_w(value),
        SurfaceSpec::TanneryGeneralized { a } => generalized::radius_w(a, value),
        SurfaceSpec::ZollSphere { .. } => {
            let a_v = spec
                .zoll_v_parameter()
                .expect("embeddable member has l = -1");
            zoll_sphere::radius_v(a_v, value)
        }
        SurfaceSpec::ZollOrbifold { .. } => unreachable!("embeddability rejected the orbifold"),
    }
}

/// Embedded radius slope dA/d(chart) at a chart value, per family.
fn embed_radius_slope(spec: SurfaceSpec, value: f64) -> f64 {
    match spec {
        SurfaceSpec::TanneryPear => pear::radius_slope_w(value),
        SurfaceSpec::TanneryGeneralized { a } => generalized::radius_slope_w(a, value),
        SurfaceSpec::ZollSphere { .. } => {
            let a_v = spec
                .zoll_v_parameter()
                .expect("embeddable member has l = -1");
            zoll_sphere::radius_slope_v(a_v, value)
        }
        SurfaceSpec::ZollOrbifold { .. } => unreachable!("embeddability rejected the orbifold"),
    }
}

/// Relative deviation of the embedding's induced metric from the chart
/// metric at one latitude, |((A′)² + (B′)²) − g_uu| / g_uu. The embedding
/// kernels are isometric by construction, so this probes their closed forms
/// against the independently coded chart metric.
pub fn embedding_slope_identity_residual(spec: SurfaceSpec, theta: f64) -> Result<f64> {
    let (embeddable, reason) = embeddability(spec)?;
    if !embeddable {
        return Err(Error::Domain(format!(
            "{} is not embeddable: {reason}",
            spec.family_name()
        )));
    }
    let chart = embedding_chart(spec);
    let value = theta_to_chart(spec, theta, chart)?.value;
    let slope = embed_radius_slope(spec, value);
    let induced = slope * slope + embed_bprime_sq(spec, value);
    let point = crate::surfaces::chart_point(spec, chart, value)?;
    let (g_uu, _) = chart_metric(spec, point)?;
    Ok(((induced - g_uu) / g_uu).abs())
}

/// Squared height slope (dB/d chart)² at a chart value, per family.
fn embed_bprime_sq(spec: SurfaceSpec, value: f64) -> f64 {
    match spec {
        SurfaceSpec::TanneryPear => pear::bprime_sq(value),
        SurfaceSpec::TanneryGeneralized { a } => generalized::bprime_sq(a, value),
        SurfaceSpec::ZollSphere { .. } => {
            let a_v = spec
                .zoll_v_parameter()
                .expect("embeddable member has l = -1");
            zoll_sphere::bprime_sq_v(a_v, value)
        }
        SurfaceSpec::ZollOrbifold { .. } => unreachable!("embeddability rejected the orbifold"),
    }
}

/// √((B′)²) with the radicand checked: a genuinely negative value
/// contradicts the embeddability classification and is reported as such.
fn height_slope(spec: SurfaceSpec, value: f64) -> Result<f64> {
    let sq = embed_bprime_sq(spec, value);
    if sq < -RADICAND_SLACK {
        return Err(Error::NegativeRadicand {
            at: value,
            value: sq,
        });
    }
    Ok(sq.max(0.0).sqrt())
}

fn integrate_height_segment(spec: SurfaceSpec, lo: f64, hi: f64) -> Result<f64> {
    let mut first_failure = None;
    let quadrature = quad::integrate(
        |u| match height_slope(spec, u) {
            Ok(v) => v,
            Err(e) => {
                first_failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        SEGMENT_QUAD_TOL,
    );
    match first_failure {
        Some(e) => Err(e),
        None => Ok(quadrature?.value),
    }
}

/// Height carried beyond w_max on the unbounded charts, integrated in the
/// compactified variable u = 1/√w where the slope tail √(8/w³) becomes the
/// smooth bounded integrand 2√(…)/u³.
fn tail_height(spec: SurfaceSpec, w_max: f64) -> Result<f64> {
    let mut first_failure = None;
    let quadrature = quad::integrate(
        |u| match height_slope(spec, 1.0 / (u * u)) {
            Ok(v) => 2.0 * v / (u * u * u),
            Err(e) => {
                first_failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        1.0 / w_max.sqrt(),
        SEGMENT_QUAD_TOL,
    );
    match first_failure {
        Some(e) => Err(e),
        None => Ok(quadrature?.value),
    }
}

/// `embedding_profile` with the default chart truncation.
pub fn embedding_profile(spec: SurfaceSpec, n_samples: usize) -> Result<EmbeddingProfile> {
    embedding_profile_with_extent(spec, n_samples, DEFAULT_CHART_EXTENT)
}

/// Sample the rotational embedding profile of an embeddable surface:
/// latitude-uniform rows from the θ = π pole toward θ = 0, with the radius
/// from the closed-form chart kernels and the height accumulated by
/// adaptive quadrature of √((B′)²) segment by segment.
///
/// Unbounded w-charts are truncated at `w_max`; the height beyond the
/// truncation is measured separately and reported as `truncation_gap`, so
/// `total_height` is the full height of the surface, not of the truncation.
pub fn embedding_profile_with_extent(
    spec: SurfaceSpec,
    n_samples: usize,
    w_max: f64,
) -> Result<EmbeddingProfile> {
    let (embeddable, reason) = embeddability(spec)?;
    if !embeddable {
        return Err(Error::Domain(format!(
            "{} is not embeddable: {reason}",
            spec.family_name()
        )));
    }
    if !(w_max.is_finite() && w_max > 1.0) {
        return Err(Error::Domain(format!(
            "chart truncation must exceed 1, got {w_max}"
        )));
    }
    let n = n_samples.max(3);
    let compact_chart = matches!(spec, SurfaceSpec::ZollSphere { .. });

    // Latitude range of the sampled rows: the full (0, π) for the compact
    // v-chart, [θ(w_max), π] for the truncated w-charts.
    let theta_end = if compact_chart {
        0.0
    } else {
        match spec {
            SurfaceSpec::TanneryPear => pear::theta_of_w(w_max),
            SurfaceSpec::TanneryGeneralized { a } => generalized::theta_of_w(a, w_max),
            _ => unreachable!("w-charts are the Tannery families"),
        }
    };

    let mut theta = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let mut radius = Vec::with_capacity(n);
    let mut height = Vec::with_capacity(n);

    for j in 0..n {
        let th = PI - (PI - theta_end) * (j as f64 / (n - 1) as f64);
        let value = if j == 0 {
            // θ = π exactly: the chart value at the pole, free of the
            // forward map's trigonometric roundoff.
            match spec {
                SurfaceSpec::ZollSphere { .. } => spec
                    .zoll_v_parameter()
                    .expect("embeddable member has l = -1"),
                _ => 0.0,
            }
        } else if compact_chart && j == n - 1 {
            1.0
        } else if !compact_chart && j == n - 1 {
            w_max
        } else {
            match spec {
                SurfaceSpec::TanneryPear => pear::w_of_theta(th),
                SurfaceSpec::TanneryGeneralized { a } => {
                    generalized::w_of_theta(a, th.sin(), th.cos())
                }
                SurfaceSpec::ZollSphere { l, m } => {
                    let a_v = spec
                        .zoll_v_parameter()
                        .expect("embeddable member has l = -1");
                    zoll_sphere::v_of_x(a_v, zoll_sphere::x_of_theta(l, m, th.sin(), th.cos()))
                }
                SurfaceSpec::ZollOrbifold { .. } => {
                    unreachable!("embeddability rejected the orbifold")
                }
            }
        };
        let b = if j == 0 {
            0.0
        } else {
            height[j - 1] + integrate_height_segment(spec, w[j - 1], value)?
        };
        theta.push(th);
        w.push(value);
        radius.push(embed_radius(spec, value));
        height.push(b);
    }

    let truncation_gap = if compact_chart {
        0.0
    } else {
        tail_height(spec, w_max)?
    };
    let total_height = height[n - 1] + truncation_gap;

    Ok(EmbeddingProfile {
        spec,
        chart: embedding_chart(spec),
        theta,
        w,
        radius,
        height,
        total_height,
        truncation_gap,
        embeddable,
        reason,
    })
}

/// Height above the θ = π pole at an arbitrary latitude, interpolated
/// linearly on the profile's latitude-uniform rows. Latitudes beyond the
/// truncated end interpolate between the last row and the apex, whose
/// height is the measured total; the height slope in θ is smooth and
/// bounded there, so linear interpolation stays accurate.
fn height_at_theta(profile: &EmbeddingProfile, theta: f64) -> f64 {
    let n = profile.theta.len();
    let theta_end = profile.theta[n - 1];
    let th = theta.clamp(0.0, PI);
    if th <= theta_end {
        let b_last = profile.height[n - 1];
        if theta_end <= 0.0 {
            return b_last;
        }
        let frac = (theta_end - th) / theta_end;
        return b_last + (profile.total_height - b_last) * frac;
    }
    let step = (PI - theta_end) / (n - 1) as f64;
    let pos = (PI - th) / step;
    let idx = (pos.floor() as usize).min(n - 2);
    let frac = pos - idx as f64;
    profile.height[idx] * (1.0 - frac) + profile.height[idx + 1] * frac
}

/// Embedded (radius, height-above-apex) of a latitude ring. The pear uses
/// its closed form; the other families take the exact radius kernel at the
/// forward-mapped chart value and the interpolated profile height. Heights
/// are measured downward from the θ = 0 vertex so the apex sits at Z = 0.
fn ring_radius_height(spec: SurfaceSpec, emb: &EmbeddingProfile, theta: f64) -> Result<(f64, f64)> {
    if let SurfaceSpec::TanneryPear = spec {
        return Ok((theta.sin(), pear::TOTAL_HEIGHT * (0.5 * theta).sin()));
    }
    let value = theta_to_chart(spec, theta, emb.chart)?.value;
    Ok((
        embed_radius(spec, value),
        emb.total_height - height_at_theta(emb, theta),
    ))
}

/// A surface-of-revolution mesh: shared pole vertices, latitude rings, quad
/// bands between rings, triangle fans at the poles, and optional polylines
/// traced over the surface.
#[derive(Debug, Clone, Default)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Triangle fans at the two poles, 0-indexed.
    pub triangles: Vec<[usize; 3]>,
    /// Quad bands between latitude rings, 0-indexed.
    pub quads: Vec<[usize; 4]>,
    /// Polylines as 0-indexed vertex chains.
    pub polylines: Vec<Vec<usize>>,
}

impl Mesh {
    /// Append a polyline, storing its points as new vertices.
    pub fn attach_polyline(&mut self, points: &[[f64; 3]]) {
        let base = self.vertices.len();
        self.vertices.extend_from_slice(points);
        self.polylines.push((base..base + points.len()).collect());
    }

    /// Check the structural invariants: finite vertices and in-range
    /// connectivity.
    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.iter().all(|c| c.is_finite()) {
                return Err(Error::Domain(format!("vertex {i} is not finite: {v:?}")));
            }
        }
        let n = self.vertices.len();
        let ok = self.triangles.iter().flatten().all(|&i| i < n)
            && self.quads.iter().flatten().all(|&i| i < n)
            && self.polylines.iter().flatten().all(|&i| i < n);
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(
                "mesh connectivity references a vertex out of range".into(),
            ))
        }
    }

    /// Wavefront OBJ text: `v` records, `f` records (1-indexed, no
    /// normals), `l` records for the polylines.
    pub fn to_obj<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for v in &self.vertices {
            writeln!(out, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
        }
        for t in &self.triangles {
            writeln!(out, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        for q in &self.quads {
            writeln!(out, "f {} {} {} {}", q[0] + 1, q[1] + 1, q[2] + 1, q[3] + 1)?;
        }
        for line in &self.polylines {
            write!(out, "l")?;
            for &i in line {
                write!(out, " {}", i + 1)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Surface-of-revolution mesh over an (θ, φ) grid: `n_theta` latitude rings
/// of `n_phi` vertices plus the two shared pole vertices, the θ = 0 vertex
/// at the origin and the θ = π pole at the full height. Rings are built in
/// parallel; ordering is deterministic.
pub fn export_mesh(
    spec: SurfaceSpec,
    emb: &EmbeddingProfile,
    n_theta: usize,
    n_phi: usize,
) -> Result<Mesh> {
    if emb.spec != spec {
        return Err(Error::Domain(format!(
            "profile was built for {}, not {}",
            emb.spec.family_name(),
            spec.family_name()
        )));
    }
    if !emb.embeddable {
        return Err(Error::Domain("profile is not embeddable".into()));
    }
    if n_theta < 3 || n_phi < 3 {
        return Err(Error::Domain(format!(
            "mesh needs at least 3 rings and 3 sectors, got {n_theta} x {n_phi}"
        )));
    }

    let rings: Vec<Result<Vec<[f64; 3]>>> = (1..=n_theta)
        .into_par_iter()
        .map(|k| {
            let theta = PI * k as f64 / (n_theta + 1) as f64;
            let (r, z) = ring_radius_height(spec, emb, theta)?;
            Ok((0..n_phi)
                .map(|j| {
                    let phi = TAU * j as f64 / n_phi as f64;
                    [r * phi.cos(), r * phi.sin(), z]
                })
                .collect())
        })
        .collect();

    let mut mesh = Mesh::default();
    let apex_height = if matches!(spec, SurfaceSpec::TanneryPear) {
        pear::TOTAL_HEIGHT
    } else {
        emb.total_height
    };
    mesh.vertices.push([0.0, 0.0, 0.0]);
    for ring in rings {
        mesh.vertices.extend(ring?);
    }
    mesh.vertices.push([0.0, 0.0, apex_height]);

    let ring_start = |k: usize| 1 + k * n_phi;
    let south = 1 + n_theta * n_phi;
    for j in 0..n_phi {
        let jn = (j + 1) % n_phi;
        mesh.triangles
            .push([0, ring_start(0) + j, ring_start(0) + jn]);
        mesh.triangles.push([
            south,
            ring_start(n_theta - 1) + jn,
            ring_start(n_theta - 1) + j,
        ]);
    }
    for k in 0..n_theta - 1 {
        for j in 0..n_phi {
            let jn = (j + 1) % n_phi;
            mesh.quads.push([
                ring_start(k) + j,
                ring_start(k + 1) + j,
                ring_start(k + 1) + jn,
                ring_start(k) + jn,
            ]);
        }
    }
    Ok(mesh)
}

/// Map a branch-resolved geodesic curve through the embedding of its
/// surface. Closed curves land on closed polylines: the first and last
/// points coincide up to the curve's own closure residual.
pub fn geodesic_polyline(
    spec: SurfaceSpec,
    curve: &GeodesicCurve,
    emb: &EmbeddingProfile,
) -> Result<Vec<[f64; 3]>> {
    if emb.spec != spec {
        return Err(Error::Domain(format!(
            "profile was built for {}, not {}",
            emb.spec.family_name(),
            spec.family_name()
        )));
    }
    if curve.samples.is_empty() {
        return Err(Error::Domain("geodesic curve carries no samples".into()));
    }
    curve
        .samples
        .iter()
        .map(|s| {
            if let SurfaceSpec::TanneryPear = spec {
                let (x, y, z) = pear::embed(s.theta, s.phi);
                // The closed form measures height above the vertex already.
                return Ok([x, y, z]);
            }
            let (r, z) = ring_radius_height(spec, emb, s.theta)?;
            Ok([r * s.phi.cos(), r * s.phi.sin(), z])
        })
        .collect()
}
