//! The four metric families and their coordinate charts.
//!
//! Every surface is a sphere-like surface of revolution with metric
//! G = A²(θ) dθ² + sin²θ dφ² on the open strip θ ∈ (0, π). Each family also
//! carries the algebraic chart it was originally constructed in (x, v, or w),
//! in which the metric is rational: G = scale · (g_uu du² + g_φφ dφ²). This
//! module owns the profile A and its analytic derivative, the chart maps in
//! both directions, the rational metric components, and numeric consistency
//! checks tying the two descriptions together.

pub(crate) mod generalized;
pub(crate) mod orbifold;
pub(crate) mod pear;
pub(crate) mod zoll_sphere;

use crate::error::{Error, Result};
use crate::numeric::roots::bisect;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A validated member of one of the four families. Parameters are stored
/// once; derived quantities (ϱ, r, the v-chart parameter) are always
/// recomputed from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceSpec {
    /// Spherical Zoll family, l ≥ −1 and m > 1.
    ZollSphere { l: f64, m: f64 },
    /// Tannery's pear, no parameters (scale normalized away).
    TanneryPear,
    /// One-parameter deformation of the pear, −1 < a < 1.
    TanneryGeneralized { a: f64 },
    /// Zoll family on the orbifold with one conical point, −1 < a < 1, m > 0.
    ZollOrbifold { a: f64, m: f64 },
}

impl SurfaceSpec {
    pub fn zoll_sphere(l: f64, m: f64) -> Result<Self> {
        if !l.is_finite() || !m.is_finite() {
            return Err(Error::Domain("parameters must be finite".into()));
        }
        if l < -1.0 {
            return Err(Error::Domain(format!(
                "l must be at least -1 for the spherical Zoll family, got {l}"
            )));
        }
        if m <= 1.0 {
            return Err(Error::Domain(format!(
                "m must exceed 1 for the spherical Zoll family, got {m}"
            )));
        }
        Ok(Self::ZollSphere { l, m })
    }

    pub fn pear() -> Self {
        Self::TanneryPear
    }

    pub fn generalized(a: f64) -> Result<Self> {
        if !(a.is_finite() && -1.0 < a && a < 1.0) {
            return Err(Error::Domain(format!(
                "a must lie strictly inside (-1, 1) for the generalized Tannery family, got {a}"
            )));
        }
        Ok(Self::TanneryGeneralized { a })
    }

    pub fn orbifold(a: f64, m: f64) -> Result<Self> {
        if !(a.is_finite() && -1.0 < a && a < 1.0) {
            return Err(Error::Domain(format!(
                "a must lie strictly inside (-1, 1) for the orbifold Zoll family, got {a}"
            )));
        }
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::Domain(format!(
                "m must be positive for the orbifold Zoll family, got {m}"
            )));
        }
        Ok(Self::ZollOrbifold { a, m })
    }

    pub fn family_name(self) -> &'static str {
        match self {
            Self::ZollSphere { .. } => "zoll-sphere",
            Self::TanneryPear => "tannery-pear",
            Self::TanneryGeneralized { .. } => "tannery-generalized",
            Self::ZollOrbifold { .. } => "zoll-orbifold",
        }
    }

    /// Global factor linking the native rational chart to the θ-form:
    /// G = scale · g.
    pub fn scale(self) -> f64 {
        match self {
            Self::ZollSphere { l, m } => l + m,
            Self::TanneryPear => 1.0,
            Self::TanneryGeneralized { a } => 0.5 * (1.0 + a),
            Self::ZollOrbifold { m, .. } => m,
        }
    }

    /// ϱ = (1−a)/(1+a) of the generalized Tannery family.
    pub fn rho_tan(self) -> Option<f64> {
        match self {
            Self::TanneryGeneralized { a } => Some(generalized::rho(a)),
            _ => None,
        }
    }

    /// ϱ = 2/(m−1) of the spherical Zoll family (a distinct parameter from
    /// `rho_tan` despite the habitual shared symbol).
    pub fn rho_zoll(self) -> Option<f64> {
        match self {
            Self::ZollSphere { m, .. } => Some(2.0 / (m - 1.0)),
            _ => None,
        }
    }

    /// r = √(m² + 2am + 1) of the orbifold family.
    pub fn r_orbifold(self) -> Option<f64> {
        match self {
            Self::ZollOrbifold { a, m } => Some(orbifold::r_param(a, m)),
            _ => None,
        }
    }

    /// The v-chart parameter a = (m−3)/(m+1) of the l = −1 spherical member,
    /// for which the metric also has a rational form on v ∈ (a, 1).
    pub fn zoll_v_parameter(self) -> Option<f64> {
        match self {
            Self::ZollSphere { l: -1.0, m } => Some((m - 3.0) / (m + 1.0)),
            _ => None,
        }
    }
}

/// Flat serialization record: {"family", "l", "m", "a"} with exactly the
/// keys the family needs. Unknown or irrelevant keys are rejected.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecRecord {
    family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
}

impl TryFrom<SpecRecord> for SurfaceSpec {
    type Error = Error;

    fn try_from(rec: SpecRecord) -> Result<Self> {
        let take = |name: &str, v: Option<f64>| {
            v.ok_or_else(|| {
                Error::Domain(format!("family '{}' requires key '{}'", rec.family, name))
            })
        };
        let forbid = |name: &str, v: Option<f64>| {
            if v.is_some() {
                Err(Error::Domain(format!(
                    "family '{}' does not accept key '{}'",
                    rec.family, name
                )))
            } else {
                Ok(())
            }
        };
        match rec.family.as_str() {
            "zoll-sphere" => {
                forbid("a", rec.a)?;
                SurfaceSpec::zoll_sphere(take("l", rec.l)?, take("m", rec.m)?)
            }
            "tannery-pear" => {
                forbid("l", rec.l)?;
                forbid("m", rec.m)?;
                forbid("a", rec.a)?;
                Ok(SurfaceSpec::pear())
            }
            "tannery-generalized" => {
                forbid("l", rec.l)?;
                forbid("m", rec.m)?;
                SurfaceSpec::generalized(take("a", rec.a)?)
            }
            "zoll-orbifold" => {
                forbid("l", rec.l)?;
                SurfaceSpec::orbifold(take("a", rec.a)?, take("m", rec.m)?)
            }
            other => Err(Error::Domain(format!(
                "unknown family '{other}' (expected zoll-sphere, tannery-pear, \
                 tannery-generalized, or zoll-orbifold)"
            ))),
        }
    }
}

impl Serialize for SurfaceSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let (l, m, a) = match *self {
            Self::ZollSphere { l, m } => (Some(l), Some(m), None),
            Self::TanneryPear => (None, None, None),
            Self::TanneryGeneralized { a } => (None, None, Some(a)),
            Self::ZollOrbifold { a, m } => (None, Some(m), Some(a)),
        };
        SpecRecord {
            family: self.family_name().to_string(),
            l,
            m,
            a,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SurfaceSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let rec = SpecRecord::deserialize(de)?;
        SurfaceSpec::try_from(rec).map_err(serde::de::Error::custom)
    }
}

/// Family-specific auxiliaries carried alongside a profile evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyAux {
    /// The radical pair H± = √(1 − k± sin²θ).
    ZollSphere {
        h_plus: f64,
        h_minus: f64,
    },
    Pear,
    /// R = √(1 + ϱ sin²θ).
    Generalized {
        r: f64,
    },
    /// The shape factor R of A = 1 + cR, and the radicals B, 𝓑 it is
    /// built from.
    Orbifold {
        r: f64,
        b: f64,
        b_radical: f64,
    },
}

/// Pointwise evaluation of the metric profile at one latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEval {
    pub theta: f64,
    pub s: f64,
    pub c: f64,
    /// Profile value A(θ).
    pub a: f64,
    /// Analytic derivative dA/dθ.
    pub da: f64,
    pub aux: FamilyAux,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && 0.0 < theta && theta < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "theta must lie strictly inside (0, pi), got {theta}"
        )))
    }
}

/// Evaluate the profile A, its derivative, and the family auxiliaries.
pub fn profile(spec: SurfaceSpec, theta: f64) -> Result<ProfileEval> {
    check_theta(theta)?;
    let (s, c) = (theta.sin(), theta.cos());
    let (a, da, aux) = match spec {
        SurfaceSpec::ZollSphere { l, m } => {
            let (h_plus, h_minus) = zoll_sphere::h_pair(l, m, s);
            (
                zoll_sphere::profile_value(l, m, s, c),
                zoll_sphere::profile_slope(l, m, s, c),
                FamilyAux::ZollSphere { h_plus, h_minus },
            )
        }
        SurfaceSpec::TanneryPear => (
            pear::profile_value(c),
            pear::profile_slope(s),
            FamilyAux::Pear,
        ),
        SurfaceSpec::TanneryGeneralized { a } => (
            generalized::profile_value(a, s, c),
            generalized::profile_slope(a, s, c),
            FamilyAux::Generalized {
                r: generalized::radical(a, s),
            },
        ),
        SurfaceSpec::ZollOrbifold { a, m } => {
            let (value, slope, r, b, b_radical) = orbifold::profile_parts(a, m, s, c);
            (value, slope, FamilyAux::Orbifold { r, b, b_radical })
        }
    };
    Ok(ProfileEval {
        theta,
        s,
        c,
        a,
        da,
        aux,
    })
}

/// Continuous limits (A(0⁺), A(π⁻)) of the profile at the two poles. The
/// orbifold's −1 at θ = π reflects the profile's zero crossing in (π/2, π);
/// the other three families stay positive throughout.
pub fn pole_limits(spec: SurfaceSpec) -> (f64, f64) {
    match spec {
        SurfaceSpec::ZollSphere { .. } => (1.0, 1.0),
        SurfaceSpec::TanneryPear => (3.0, 1.0),
        SurfaceSpec::TanneryGeneralized { .. } => (3.0, 1.0),
        SurfaceSpec::ZollOrbifold { .. } => (3.0, -1.0),
    }
}

/// Interior latitude where the profile vanishes, if the family has one.
///
/// Only the orbifold profile crosses zero; the other three families return
/// `None`. Geodesic bands and curvature integrals that reach the returned
/// latitude degenerate, so callers use it to pick admissible inclinations.
pub fn profile_zero_latitude(spec: SurfaceSpec) -> Result<Option<f64>> {
    match spec {
        SurfaceSpec::ZollOrbifold { a, m } => orbifold::degeneracy_theta(a, m).map(Some),
        _ => Ok(None),
    }
}

/// Coordinate charts a family can be expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    Theta,
    V,
    W,
    X,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::Theta => "theta",
            Chart::V => "v",
            Chart::W => "w",
            Chart::X => "x",
        }
    }
}

/// A chart value together with the open interval it must lie in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub chart: Chart,
    pub value: f64,
    pub valid_interval: (f64, f64),
}

/// The open validity interval of a chart for this family, or
/// UnsupportedChart if the pair is undefined.
pub fn chart_interval(spec: SurfaceSpec, chart: Chart) -> Result<(f64, f64)> {
    let unsupported = || Error::UnsupportedChart {
        family: spec.family_name(),
        chart: chart.name(),
    };
    match chart {
        Chart::Theta => Ok((0.0, PI)),
        Chart::X => match spec {
            SurfaceSpec::ZollSphere { .. } => Ok((-1.0, 1.0)),
            _ => Err(unsupported()),
        },
        Chart::V => match spec.zoll_v_parameter() {
            Some(a) => Ok((a, 1.0)),
            None => Err(unsupported()),
        },
        Chart::W => match spec {
            SurfaceSpec::TanneryPear
            | SurfaceSpec::TanneryGeneralized { .. }
            | SurfaceSpec::ZollOrbifold { .. } => Ok((0.0, f64::INFINITY)),
            _ => Err(unsupported()),
        },
    }
}

/// Validate a raw chart value into a ChartPoint (strictly inside the open
/// interval).
pub fn chart_point(spec: SurfaceSpec, chart: Chart, value: f64) -> Result<ChartPoint> {
    let valid_interval = chart_interval(spec, chart)?;
    if !(value.is_finite() && valid_interval.0 < value && value < valid_interval.1) {
        return Err(Error::Domain(format!(
            "{} = {} outside the open interval ({}, {}) for family {}",
            chart.name(),
            value,
            valid_interval.0,
            valid_interval.1,
            spec.family_name()
        )));
    }
    Ok(ChartPoint {
        chart,
        value,
        valid_interval,
    })
}

/// The algebraic chart a family's rational metric lives in.
pub fn native_chart(spec: SurfaceSpec) -> Chart {
    match spec {
        SurfaceSpec::ZollSphere { .. } => Chart::X,
        _ => Chart::W,
    }
}

/// Forward chart map θ ↦ chart value.
pub fn theta_to_chart(spec: SurfaceSpec, theta: f64, chart: Chart) -> Result<ChartPoint> {
    check_theta(theta)?;
    let valid_interval = chart_interval(spec, chart)?;
    let (s, c) = (theta.sin(), theta.cos());
    let value = match (chart, spec) {
        (Chart::Theta, _) => theta,
        (Chart::X, SurfaceSpec::ZollSphere { l, m }) => zoll_sphere::x_of_theta(l, m, s, c),
        (Chart::V, SurfaceSpec::ZollSphere { l, m }) => {
            let a = (m - 3.0) / (m + 1.0);
            zoll_sphere::v_of_x(a, zoll_sphere::x_of_theta(l, m, s, c))
        }
        (Chart::W, SurfaceSpec::TanneryPear) => pear::w_of_theta(theta),
        (Chart::W, SurfaceSpec::TanneryGeneralized { a }) => generalized::w_of_theta(a, s, c),
        (Chart::W, SurfaceSpec::ZollOrbifold { a, m }) => orbifold::w_of_theta(a, m, s, c),
        _ => unreachable!("chart_interval already filtered unsupported pairs"),
    };
    Ok(ChartPoint {
        chart,
        value,
        valid_interval,
    })
}

/// Analytic slope d(chart)/dθ of the forward map.
pub fn chart_slope(spec: SurfaceSpec, theta: f64, chart: Chart) -> Result<f64> {
    check_theta(theta)?;
    chart_interval(spec, chart)?;
    let (s, c) = (theta.sin(), theta.cos());
    Ok(match (chart, spec) {
        (Chart::Theta, _) => 1.0,
        (Chart::X, SurfaceSpec::ZollSphere { l, m }) => zoll_sphere::dx_dtheta(l, m, s, c),
        (Chart::V, SurfaceSpec::ZollSphere { l, m }) => {
            let a = (m - 3.0) / (m + 1.0);
            0.5 * (1.0 - a) * zoll_sphere::dx_dtheta(l, m, s, c)
        }
        (Chart::W, SurfaceSpec::TanneryPear) => pear::dw_dtheta(theta),
        (Chart::W, SurfaceSpec::TanneryGeneralized { a }) => generalized::dw_dtheta(a, s, c),
        (Chart::W, SurfaceSpec::ZollOrbifold { a, m }) => orbifold::dw_dtheta(a, m, s, c),
        _ => unreachable!("chart_interval already filtered unsupported pairs"),
    })
}

const POLE_GUARD: f64 = 1e-12;
const INVERSION_TOL: f64 = 1e-14;

fn invert_decreasing<F: FnMut(f64) -> f64>(mut forward: F, target: f64) -> Result<f64> {
    bisect(
        |theta| forward(theta) - target,
        POLE_GUARD,
        PI - POLE_GUARD,
        INVERSION_TOL,
        200,
    )
}

/// Inverse chart map. Closed form where the algebra allows (pear and
/// generalized Tannery w-charts), bracketed bisection on the monotone
/// forward map otherwise.
pub fn chart_to_theta(spec: SurfaceSpec, point: ChartPoint) -> Result<f64> {
    // Revalidate: ChartPoint fields are public and could have been edited.
    let point = chart_point(spec, point.chart, point.value)?;
    match (point.chart, spec) {
        (Chart::Theta, _) => Ok(point.value),
        (Chart::X, SurfaceSpec::ZollSphere { l, m }) => invert_decreasing(
            |theta| zoll_sphere::x_of_theta(l, m, theta.sin(), theta.cos()),
            point.value,
        ),
        (Chart::V, SurfaceSpec::ZollSphere { l, m }) => {
            let a = (m - 3.0) / (m + 1.0);
            let x = zoll_sphere::x_of_v(a, point.value);
            invert_decreasing(
                |theta| zoll_sphere::x_of_theta(l, m, theta.sin(), theta.cos()),
                x,
            )
        }
        (Chart::W, SurfaceSpec::TanneryPear) => Ok(pear::theta_of_w(point.value)),
        (Chart::W, SurfaceSpec::TanneryGeneralized { a }) => {
            Ok(generalized::theta_of_w(a, point.value))
        }
        (Chart::W, SurfaceSpec::ZollOrbifold { a, m }) => orbifold::theta_of_w(a, m, point.value),
        _ => unreachable!("chart_point already filtered unsupported pairs"),
    }
}

/// Diagonal components (g_uu, g_φφ) of the rational metric in the family's
/// native algebraic chart (x or v for the spherical family, w otherwise).
pub fn chart_metric(spec: SurfaceSpec, point: ChartPoint) -> Result<(f64, f64)> {
    let point = chart_point(spec, point.chart, point.value)?;
    match (point.chart, spec) {
        (Chart::X, SurfaceSpec::ZollSphere { l, m }) => {
            Ok(zoll_sphere::metric_components(l, m, point.value))
        }
        (Chart::V, SurfaceSpec::ZollSphere { l: -1.0, .. }) => {
            let a = spec.zoll_v_parameter().expect("l = -1 checked");
            Ok(zoll_sphere::v_metric_components(a, point.value))
        }
        (Chart::W, SurfaceSpec::TanneryPear) => Ok(pear::metric_components(point.value)),
        (Chart::W, SurfaceSpec::TanneryGeneralized { a }) => {
            Ok(generalized::metric_components(a, point.value))
        }
        (Chart::W, SurfaceSpec::ZollOrbifold { a, m }) => {
            Ok(orbifold::metric_components(a, m, point.value))
        }
        (chart, _) => Err(Error::UnsupportedChart {
            family: spec.family_name(),
            chart: chart.name(),
        }),
    }
}

/// Pull the native-chart metric back to θ, apply the family scale, and
/// return the maximum relative deviation from (A², sin²θ). This is the
/// numeric proof that the rational chart and the θ-form describe the same
/// surface.
pub fn chart_consistency_residual(spec: SurfaceSpec, theta: f64) -> Result<f64> {
    let ev = profile(spec, theta)?;
    let chart = native_chart(spec);
    // The w-charts reach the metric through a pole-stable w(θ); the x-chart
    // metric needs 1 - x² assembled from θ directly, since recomputing it
    // from the rounded x would shed relative precision at the poles.
    let (g_uu, g_pp) = match spec {
        SurfaceSpec::ZollSphere { l, m } => zoll_sphere::metric_from_theta(l, m, ev.s, ev.c),
        _ => {
            let point = theta_to_chart(spec, theta, chart)?;
            chart_metric(spec, point)?
        }
    };
    let slope = chart_slope(spec, theta, chart)?;
    let scale = spec.scale();
    let a2 = ev.a * ev.a;
    let s2 = ev.s * ev.s;
    let r_theta = (scale * g_uu * slope * slope - a2).abs() / a2;
    let r_phi = (scale * g_pp - s2).abs() / s2;
    Ok(r_theta.max(r_phi))
}

/// For the l = −1 spherical member only: maximum relative deviation between
/// the v-chart rational metric and 2/(1−a) times the x-chart metric under
/// the affine change 2v = (1−a)x + (1+a).
pub fn v_chart_limit_residual(spec: SurfaceSpec, theta: f64) -> Result<f64> {
    let a = spec.zoll_v_parameter().ok_or_else(|| {
        Error::Unsupported(
            "the v-chart comparison is defined only for the l = -1 spherical member".into(),
        )
    })?;
    check_theta(theta)?;
    let SurfaceSpec::ZollSphere { l, m } = spec else {
        unreachable!("zoll_v_parameter returned Some")
    };
    let (s, c) = (theta.sin(), theta.cos());
    let x = zoll_sphere::x_of_theta(l, m, s, c);
    let v = zoll_sphere::v_of_x(a, x);
    let (g_xx, g_xp) = zoll_sphere::metric_components(l, m, x);
    let (g_vv, g_vp) = zoll_sphere::v_metric_components(a, v);
    let factor = 2.0 / (1.0 - a);
    let dvdx = 0.5 * (1.0 - a);
    let r_uu = (g_vv * dvdx * dvdx - factor * g_xx).abs() / (factor * g_xx).abs();
    let r_pp = (g_vp - factor * g_xp).abs() / (factor * g_xp).abs();
    Ok(r_uu.max(r_pp))
}

/// A parameter sweep covering every family, including boundary-flavored
/// members (the limit spherical member l = -1, a steep orbifold). Test
/// support shared across the crate.
#[cfg(test)]
pub(crate) fn all_specs() -> Vec<SurfaceSpec> {
    vec![
        SurfaceSpec::zoll_sphere(-1.0, 3.0).unwrap(),
        SurfaceSpec::zoll_sphere(0.0, 1.5).unwrap(),
        SurfaceSpec::zoll_sphere(1.0, 2.0).unwrap(),
        SurfaceSpec::zoll_sphere(5.0, 10.0).unwrap(),
        SurfaceSpec::pear(),
        SurfaceSpec::generalized(-0.9).unwrap(),
        SurfaceSpec::generalized(0.0).unwrap(),
        SurfaceSpec::generalized(0.9).unwrap(),
        SurfaceSpec::orbifold(-0.5, 2.0).unwrap(),
        SurfaceSpec::orbifold(0.0, 1.0).unwrap(),
        SurfaceSpec::orbifold(0.3, 2.0).unwrap(),
        SurfaceSpec::orbifold(0.5, 0.5).unwrap(),
    ]
}
