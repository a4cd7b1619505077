//! The eight subcommands. Each resolves its options, drives the library,
//! writes any requested artifacts, and emits one JSON report document whose
//! checks decide the exit code.
//!
//! Library errors split by origin: domain and chart misuse surface as
//! configuration errors, numerical breakdowns become failed checks or
//! runtime errors. The report battery converts every failure into a check
//! record so it never aborts partway.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use tannery::flow::FlowSettings;
use tannery::surfaces::{self, Chart, SurfaceSpec};
use tannery::Error;

use crate::config::{
    config_err, default_inclination, lib_err, load_file, parse_i_grid, require_positive,
    resolve_spec, spec_json, validate_inclination, CliError, DEFAULT_I_GRID,
};
use crate::report::{json_f64, json_str, time, Check, Document};
use crate::{
    ClosureArgs, CurvatureArgs, EmbedArgs, FlowArgs, InvariantsArgs, MeasureArgs, ReportArgs,
    RotationArgs, SurfaceArgs,
};

/// Default tolerances, one per check family. Each is the acceptance
/// threshold of the corresponding verification, overridable per command.
const ROTATION_TOL: f64 = 1e-8;
const ROTATION_QUAD_TOL: f64 = 1e-10;
const CLOSURE_TOL: f64 = 1e-6;
const DRIFT_TOL: f64 = 1e-7;
const CONSTRAINT_TOL: f64 = 1e-10;
const SYSTEM_TOL: f64 = 1e-12;
const MEASURE_TOL: f64 = 1e-9;
const CHART_AREA_TOL: f64 = 1e-8;
const ROUND_TRIP_TOL: f64 = 1e-12;
const PULLBACK_TOL: f64 = 1e-9;
const CURVATURE_CLOSED_TOL: f64 = 1e-12;
const TOTAL_CURVATURE_TOL: f64 = 1e-6;
const PARITY_TOL: f64 = 1e-12;
const INDUCED_METRIC_TOL: f64 = 1e-8;
const HEIGHT_TOL: f64 = 1e-9;

/// Closure type (p, q) of the family: p azimuthal turns and q latitude
/// oscillations per closed geodesic. Equals the even part of the profile.
fn closure_type(spec: SurfaceSpec) -> (u32, u32) {
    match spec {
        SurfaceSpec::ZollSphere { .. } | SurfaceSpec::ZollOrbifold { .. } => (1, 1),
        SurfaceSpec::TanneryPear | SurfaceSpec::TanneryGeneralized { .. } => (2, 1),
    }
}

fn resolve(surface: &SurfaceArgs, file_surface: Option<Value>) -> Result<SurfaceSpec, CliError> {
    resolve_spec(
        surface.family.as_deref(),
        surface.l,
        surface.m,
        surface.a,
        file_surface,
    )
}

fn runtime(e: Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn write_artifact(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_document(doc: &Document, out: Option<&Path>) -> Result<bool, CliError> {
    doc.write(out)
        .map_err(|e| CliError::Runtime(format!("cannot write report: {e}")))?;
    Ok(doc.pass())
}

/// Uniform latitude grid with the poles excluded.
fn theta_grid(n: usize, margin: f64) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|j| margin + (PI - 2.0 * margin) * j as f64 / (n - 1) as f64)
        .collect()
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct RotationFile {
    surface: Option<Value>,
    i_grid: Option<String>,
    quad_tol: Option<f64>,
    check_tol: Option<f64>,
    out: Option<PathBuf>,
}

/// Rotation numbers over an inclination grid, checked against the rational
/// closure angle p pi / q of the family.
pub fn rotation(args: RotationArgs) -> Result<bool, CliError> {
    let file: RotationFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let grid_text = args
        .i_grid
        .or(file.i_grid)
        .unwrap_or_else(|| DEFAULT_I_GRID.to_string());
    let grid = parse_i_grid(&grid_text)?;
    let quad_tol = require_positive(
        "quad-tol",
        args.quad_tol.or(file.quad_tol).unwrap_or(ROTATION_QUAD_TOL),
    )?;
    let check_tol = require_positive(
        "check-tol",
        args.check_tol.or(file.check_tol).unwrap_or(ROTATION_TOL),
    )?;
    let out = args.out.or(file.out);

    let (p, q) = closure_type(spec);
    let expected = p as f64 * PI / q as f64;
    let entries = time("rotation grid", || {
        tannery::closure::rotation_grid(spec, &grid, quad_tol)
    });

    let mut entry_json = Vec::with_capacity(entries.len());
    let mut worst = 0.0f64;
    let mut mismatches = 0usize;
    let mut errors = Vec::new();
    for (idx, res) in entries.iter().enumerate() {
        match res {
            Ok(r) => {
                entry_json.push(r.to_json());
                worst = worst.max((r.value - expected).abs());
                if (r.p, r.q) != (p, q) {
                    mismatches += 1;
                }
            }
            Err(e) => {
                entry_json.push(format!(
                    "{{\"i\":{},\"error\":{}}}",
                    json_f64(grid[idx]),
                    json_str(&e.to_string())
                ));
                errors.push(format!("i = {}: {e}", grid[idx]));
            }
        }
    }

    let mut checks = Vec::new();
    if errors.is_empty() {
        checks.push(Check::with_detail(
            "rotation-angle",
            worst,
            check_tol,
            format!(
                "max |R(i) - {p} pi / {q}| over {} inclinations",
                grid.len()
            ),
        ));
    } else {
        checks.push(Check::failed("rotation-angle", check_tol, errors.join("; ")));
    }
    checks.push(Check::counted(
        "rotation-classification",
        mismatches + errors.len(),
        Some(format!("entries not classified as (p, q) = ({p}, {q})")),
    ));

    let config = format!(
        "{{\"surface\":{},\"i-grid\":{},\"quad-tol\":{},\"check-tol\":{}}}",
        spec_json(spec),
        json_str(&grid_text),
        json_f64(quad_tol),
        json_f64(check_tol)
    );
    let doc = Document {
        command: "rotation",
        config,
        results: vec![
            (
                "expected".into(),
                format!("{{\"p\":{p},\"q\":{q},\"angle\":{}}}", json_f64(expected)),
            ),
            ("entries".into(), format!("[{}]", entry_json.join(","))),
        ],
        checks,
    };
    write_document(&doc, out.as_deref())
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct FlowFile {
    surface: Option<Value>,
    i: Option<f64>,
    t_end: Option<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    drift_tol: Option<f64>,
    trajectory_out: Option<PathBuf>,
    out: Option<PathBuf>,
}

/// One integrated geodesic with the relative drift of its four conserved
/// quantities held under the tolerance.
pub fn flow(args: FlowArgs) -> Result<bool, CliError> {
    let file: FlowFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let i = match args.i.or(file.i) {
        Some(i) => {
            validate_inclination(spec, i)?;
            i
        }
        None => default_inclination(spec)?,
    };
    let t_end = args.t_end.or(file.t_end).unwrap_or(2.0 * TAU);
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(config_err(format!("t-end must be positive, got {t_end}")));
    }
    let defaults = FlowSettings::default();
    let settings = FlowSettings {
        rel_tol: require_positive(
            "rel-tol",
            args.rel_tol.or(file.rel_tol).unwrap_or(defaults.rel_tol),
        )?,
        abs_tol: require_positive(
            "abs-tol",
            args.abs_tol.or(file.abs_tol).unwrap_or(defaults.abs_tol),
        )?,
        ..defaults
    };
    let drift_tol = require_positive(
        "drift-tol",
        args.drift_tol.or(file.drift_tol).unwrap_or(DRIFT_TOL),
    )?;
    let trajectory_out = args.trajectory_out.or(file.trajectory_out);
    let out = args.out.or(file.out);

    let p0 = tannery::flow::initial_phase(spec, i).map_err(lib_err)?;
    let traj = time("integrate", || {
        tannery::flow::integrate(spec, p0, t_end, settings)
    })
    .map_err(runtime)?;
    let rep = tannery::invariants::drift_report(spec, &traj).map_err(runtime)?;

    if let Some(path) = &trajectory_out {
        let mut buf = Vec::new();
        traj.to_csv(&mut buf)
            .map_err(|e| CliError::Runtime(format!("trajectory export: {e}")))?;
        write_artifact(path, &buf)?;
    }

    let checks = vec![
        Check::measured("energy-drift", rep.drift_h.abs(), drift_tol),
        Check::measured("angular-momentum-drift", rep.drift_p_phi.abs(), drift_tol),
        Check::measured("cubic-s1-drift", rep.drift_s1.abs(), drift_tol),
        Check::measured("cubic-s2-drift", rep.drift_s2.abs(), drift_tol),
        Check::measured(
            "constraint-on-trajectory",
            rep.constraint_max_residual.abs(),
            drift_tol,
        ),
    ];
    let config = format!(
        "{{\"surface\":{},\"i\":{},\"t-end\":{},\"rel-tol\":{},\"abs-tol\":{},\"drift-tol\":{}}}",
        spec_json(spec),
        json_f64(i),
        json_f64(t_end),
        json_f64(settings.rel_tol),
        json_f64(settings.abs_tol),
        json_f64(drift_tol)
    );
    let doc = Document {
        command: "flow",
        config,
        results: vec![
            ("inclination".into(), json_f64(i)),
            ("samples".into(), traj.samples.len().to_string()),
            ("invariants".into(), rep.to_json()),
        ],
        checks,
    };
    write_document(&doc, out.as_deref())
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct InvariantsFile {
    surface: Option<Value>,
    points: Option<usize>,
    seed: Option<u64>,
    theta_points: Option<usize>,
    i_grid: Option<String>,
    constraint_tol: Option<f64>,
    system_tol: Option<f64>,
    out: Option<PathBuf>,
}

/// The cubic-integral constraint identity on seeded off-shell points, the
/// coefficient system behind it on an interior latitude grid, and the
/// canonical-start constant recorded across inclinations.
pub fn invariants(args: InvariantsArgs) -> Result<bool, CliError> {
    let file: InvariantsFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let points = args.points.or(file.points).unwrap_or(1000).max(1);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let theta_points = args.theta_points.or(file.theta_points).unwrap_or(1000);
    let grid_text = args
        .i_grid
        .or(file.i_grid)
        .unwrap_or_else(|| DEFAULT_I_GRID.to_string());
    let grid = parse_i_grid(&grid_text)?;
    let constraint_tol = require_positive(
        "constraint-tol",
        args.constraint_tol
            .or(file.constraint_tol)
            .unwrap_or(CONSTRAINT_TOL),
    )?;
    let system_tol = require_positive(
        "system-tol",
        args.system_tol.or(file.system_tol).unwrap_or(SYSTEM_TOL),
    )?;
    let out = args.out.or(file.out);

    let sampled = time("constraint sample", || {
        tannery::invariants::sample_constraint_residual(spec, points, seed)
    })
    .map_err(runtime)?;
    let system = time("coefficient system", || {
        max_system_residual(spec, theta_points)
    })
    .map_err(runtime)?;

    let mut constants = Vec::with_capacity(grid.len());
    let mut worst_gap = 0.0f64;
    for &i in &grid {
        let (s2, measured, closed, gap) = canonical_constant(spec, i).map_err(runtime)?;
        worst_gap = worst_gap.max(gap);
        constants.push(format!(
            "{{\"i\":{},\"s2\":{},\"value\":{},\"closed-form\":{},\"gap\":{}}}",
            json_f64(i),
            json_f64(s2),
            json_f64(measured),
            json_f64(closed),
            json_f64(gap)
        ));
    }

    let checks = vec![
        Check::with_detail(
            "constraint-identity",
            sampled,
            constraint_tol,
            format!("{points} seeded off-shell phase points, seed {seed}"),
        ),
        Check::with_detail(
            "coefficient-system",
            system,
            system_tol,
            format!("{theta_points} interior latitudes, analytic slopes"),
        ),
        Check::with_detail(
            "canonical-constant",
            worst_gap,
            constraint_tol,
            format!(
                "relative gap of S1^2 + S2^2 to its closed form over {} inclinations",
                grid.len()
            ),
        ),
    ];
    let config = format!(
        "{{\"surface\":{},\"points\":{points},\"seed\":{seed},\"theta-points\":{theta_points},\
         \"i-grid\":{},\"constraint-tol\":{},\"system-tol\":{}}}",
        spec_json(spec),
        json_str(&grid_text),
        json_f64(constraint_tol),
        json_f64(system_tol)
    );
    let doc = Document {
        command: "invariants",
        config,
        results: vec![("constants".into(), format!("[{}]", constants.join(",")))],
        checks,
    };
    write_document(&doc, out.as_deref())
}

/// Largest coefficient-system residual over a uniform interior grid.
fn max_system_residual(spec: SurfaceSpec, n: usize) -> tannery::Result<f64> {
    theta_grid(n, 0.1)
        .par_iter()
        .map(|&th| {
            tannery::invariants::coefficient_system_residual(spec, th)
                .map(|r| r.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Cubic integrals at the canonical start of inclination i: S2, the
/// measured S1^2 + S2^2, its closed form through the sigma cubic, and the
/// relative gap between them.
fn canonical_constant(spec: SurfaceSpec, i: f64) -> tannery::Result<(f64, f64, f64, f64)> {
    let p0 = tannery::flow::initial_phase(spec, i)?;
    let (s1, s2) = tannery::invariants::cubic_integrals(spec, p0)?;
    let sig = tannery::invariants::sigma_triple(spec);
    let sq = i.sin() * i.sin();
    let closed = 1.0 + sig.sigma1 * sq + sig.sigma2 * sq * sq + sig.sigma3 * sq * sq * sq;
    let measured = s1 * s1 + s2 * s2;
    let gap = (measured - closed).abs() / closed.abs().max(1e-12);
    Ok((s2, measured, closed, gap))
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ClosureFile {
    surface: Option<Value>,
    i: Option<f64>,
    tol: Option<f64>,
    curve_samples: Option<usize>,
    curve_out: Option<PathBuf>,
    out: Option<PathBuf>,
}

/// First-return closure of one geodesic: gap, period, winding counts, and
/// agreement between the parametric curve and the integrated flow.
pub fn closure(args: ClosureArgs) -> Result<bool, CliError> {
    let file: ClosureFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let i = match args.i.or(file.i) {
        Some(i) => {
            validate_inclination(spec, i)?;
            i
        }
        None => default_inclination(spec)?,
    };
    let tol = require_positive("tol", args.tol.or(file.tol).unwrap_or(CLOSURE_TOL))?;
    let curve_samples = args.curve_samples.or(file.curve_samples).unwrap_or(256);
    let curve_out = args.curve_out.or(file.curve_out);
    let out = args.out.or(file.out);

    let (p, q) = closure_type(spec);
    let mut checks = Vec::new();
    let mut results = vec![("inclination".to_string(), json_f64(i))];

    match time("closure", || tannery::closure::closure_check(spec, i, tol)) {
        Ok(rep) => {
            checks.push(Check::measured("closure-gap", rep.residual, tol));
            checks.push(Check::with_detail(
                "closure-period",
                (rep.period - TAU * p as f64 / q as f64).abs(),
                tol,
                format!("first-return arclength against 2 pi {p} / {q}"),
            ));
            let winding_off = usize::from((rep.turns, rep.oscillations) != (p, q));
            checks.push(Check::counted(
                "closure-winding",
                winding_off,
                Some(format!(
                    "(turns, oscillations) = ({}, {}) against ({p}, {q})",
                    rep.turns, rep.oscillations
                )),
            ));
            results.push(("closure".into(), rep.to_json()));
        }
        Err(e @ (Error::Domain(_) | Error::UnsupportedChart { .. })) => return Err(lib_err(e)),
        Err(e) => {
            let msg = e.to_string();
            checks.push(Check::failed("closure-gap", tol, msg.clone()));
            checks.push(Check::failed("closure-period", tol, msg.clone()));
            checks.push(Check::failed("closure-winding", 1.0, msg));
        }
    }

    match tannery::closure::compare_parametric_numeric(spec, i) {
        Ok(dev) => checks.push(Check::with_detail(
            "parametric-flow",
            dev,
            tol,
            "max azimuth deviation between the parametric curve and the integrated flow".into(),
        )),
        Err(e) => checks.push(Check::failed("parametric-flow", tol, e.to_string())),
    }

    if let Some(path) = &curve_out {
        let curve =
            tannery::closure::parametric_curve(spec, i, curve_samples).map_err(runtime)?;
        results.push(("total-phi".into(), json_f64(curve.total_phi)));
        let mut buf = Vec::new();
        curve
            .to_csv(&mut buf)
            .map_err(|e| CliError::Runtime(format!("curve export: {e}")))?;
        write_artifact(path, &buf)?;
    }

    let config = format!(
        "{{\"surface\":{},\"i\":{},\"tol\":{},\"curve-samples\":{curve_samples}}}",
        spec_json(spec),
        json_f64(i),
        json_f64(tol)
    );
    let doc = Document {
        command: "closure",
        config,
        results,
        checks,
    };
    write_document(&doc, out.as_deref())
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct CurvatureFile {
    surface: Option<Value>,
    points: Option<usize>,
    comparison_tol: Option<f64>,
    total_tol: Option<f64>,
    samples_out: Option<PathBuf>,
    out: Option<PathBuf>,
}

/// Gaussian curvature samples, the pear's closed form and endpoint limits,
/// and the total curvature where the integral converges.
pub fn curvature(args: CurvatureArgs) -> Result<bool, CliError> {
    let file: CurvatureFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let points = args.points.or(file.points).unwrap_or(1000).max(2);
    let comparison_tol = require_positive(
        "comparison-tol",
        args.comparison_tol
            .or(file.comparison_tol)
            .unwrap_or(CURVATURE_CLOSED_TOL),
    )?;
    let total_tol = require_positive(
        "total-tol",
        args.total_tol.or(file.total_tol).unwrap_or(TOTAL_CURVATURE_TOL),
    )?;
    let samples_out = args.samples_out.or(file.samples_out);
    let out = args.out.or(file.out);

    let grid = theta_grid(points, 1e-6);
    let samples: Vec<tannery::Result<tannery::geometry::CurvatureSample>> =
        time("curvature samples", || {
            grid.par_iter()
                .map(|&th| tannery::geometry::gaussian_curvature(spec, th))
                .collect()
        });
    let eval_errors = samples.iter().filter(|r| r.is_err()).count();

    let mut checks = Vec::new();
    let mut results = vec![("samples".to_string(), points.to_string())];

    checks.push(Check::counted(
        "curvature-evaluations",
        eval_errors,
        Some(format!("failed evaluations over {points} latitudes")),
    ));

    if let SurfaceSpec::TanneryPear = spec {
        let mut worst = 0.0f64;
        for (th, res) in grid.iter().zip(&samples) {
            if let Ok(s) = res {
                worst = worst.max((s.k - tannery::geometry::pear_curvature_closed_form(*th)).abs());
            }
        }
        checks.push(Check::with_detail(
            "curvature-closed-form",
            worst,
            comparison_tol,
            format!("profile-based curvature against the closed form at {points} latitudes"),
        ));
        if let (Ok(north), Ok(south)) = (&samples[0], &samples[samples.len() - 1]) {
            checks.push(Check::with_detail(
                "curvature-north-limit",
                (north.k - 2.0 / 27.0).abs(),
                total_tol,
                "limit 2/27 at the rounded pole".into(),
            ));
            checks.push(Check::with_detail(
                "curvature-south-limit",
                (south.k - 2.0).abs(),
                total_tol,
                "limit 2 at the conical pole".into(),
            ));
        } else {
            checks.push(Check::failed(
                "curvature-north-limit",
                total_tol,
                "endpoint evaluation failed".into(),
            ));
        }
    }

    let expected_total = match spec {
        SurfaceSpec::ZollSphere { .. } => Some(2.0 * TAU),
        SurfaceSpec::TanneryPear | SurfaceSpec::TanneryGeneralized { .. } => {
            Some(2.0 * TAU * 2.0 / 3.0)
        }
        SurfaceSpec::ZollOrbifold { .. } => None,
    };
    match tannery::geometry::total_curvature(spec) {
        Ok(total) => {
            let expected = expected_total.expect("families with a total have an expected value");
            checks.push(Check::with_detail(
                "total-curvature",
                (total - expected).abs(),
                total_tol,
                "integrated curvature against the Gauss-Bonnet total".into(),
            ));
            results.push(("total-curvature".into(), json_f64(total)));
        }
        Err(Error::Unsupported(msg)) => {
            checks.push(Check::skipped("total-curvature", msg));
            results.push(("total-curvature".into(), "null".into()));
        }
        Err(e) => checks.push(Check::failed("total-curvature", total_tol, e.to_string())),
    }

    let (north_angle, south_angle) = tannery::geometry::cone_angles(spec);
    results.push((
        "cone-angles".into(),
        format!("[{},{}]", json_f64(north_angle), json_f64(south_angle)),
    ));

    if let Some(path) = &samples_out {
        let mut buf = Vec::new();
        {
            use std::io::Write;
            writeln!(buf, "theta,k").expect("vector writes are infallible");
            for (th, res) in grid.iter().zip(&samples) {
                if let Ok(s) = res {
                    writeln!(buf, "{:.16e},{:.16e}", th, s.k)
                        .expect("vector writes are infallible");
                }
            }
        }
        write_artifact(path, &buf)?;
    }

    let config = format!(
        "{{\"surface\":{},\"points\":{points},\"comparison-tol\":{},\"total-tol\":{}}}",
        spec_json(spec),
        json_f64(comparison_tol),
        json_f64(total_tol)
    );
    let doc = Document {
        command: "curvature",
        config,
        results,
        checks,
    };
    write_document(&doc, out.as_deref())
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct MeasureFile {
    surface: Option<Value>,
    tol: Option<f64>,
    cross_tol: Option<f64>,
    out: Option<PathBuf>,
}

/// The surface measure against its closed form p/q x 4 pi, the native-chart
/// area cross-check, and the parity structure of the profile.
pub fn measure(args: MeasureArgs) -> Result<bool, CliError> {
    let file: MeasureFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let tol = require_positive("tol", args.tol.or(file.tol).unwrap_or(MEASURE_TOL))?;
    let cross_tol = require_positive(
        "cross-tol",
        args.cross_tol.or(file.cross_tol).unwrap_or(CHART_AREA_TOL),
    )?;
    let out = args.out.or(file.out);

    let (p, q) = closure_type(spec);
    let expected = p as f64 / q as f64 * 2.0 * TAU;
    let mu = time("surface measure", || {
        tannery::geometry::surface_measure(spec)
    })
    .map_err(runtime)?;

    let mut checks = vec![Check::with_detail(
        "surface-measure",
        (mu - expected).abs(),
        tol,
        format!("measure against {p}/{q} x 4 pi"),
    )];
    let mut results = vec![
        ("measure".to_string(), json_f64(mu)),
        ("expected".to_string(), json_f64(expected)),
    ];

    match tannery::geometry::native_chart_area(spec) {
        Ok(area) => {
            checks.push(Check::with_detail(
                "chart-area",
                (area - mu).abs(),
                cross_tol,
                "native-chart area quadrature against the latitude measure".into(),
            ));
            results.push(("chart-area".into(), json_f64(area)));
        }
        Err(Error::Unsupported(msg)) => {
            checks.push(Check::skipped("chart-area", msg));
            results.push(("chart-area".into(), "null".into()));
        }
        Err(e) => checks.push(Check::failed("chart-area", cross_tol, e.to_string())),
    }

    let (constant, violation) = tannery::closure::odd_profile_check(spec, 1000);
    checks.push(Check::with_detail(
        "profile-constant",
        (constant - p as f64 / q as f64).abs(),
        PARITY_TOL,
        format!("equatorial profile value against {p}/{q}"),
    ));
    checks.push(Check::with_detail(
        "even-profile-part",
        violation,
        PARITY_TOL,
        "largest deviation of A(theta) + A(pi - theta) from twice the constant".into(),
    ));
    results.push(("profile-constant".into(), json_f64(constant)));

    let config = format!(
        "{{\"surface\":{},\"tol\":{},\"cross-tol\":{}}}",
        spec_json(spec),
        json_f64(tol),
        json_f64(cross_tol)
    );
    let doc = Document {
        command: "measure",
        config,
        results,
        checks,
    };
    write_document(&doc, out.as_deref())
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct EmbedFile {
    surface: Option<Value>,
    samples: Option<usize>,
    w_max: Option<f64>,
    n_theta: Option<usize>,
    n_phi: Option<usize>,
    geodesic_i: Option<f64>,
    profile_out: Option<PathBuf>,
    mesh_out: Option<PathBuf>,
    out: Option<PathBuf>,
}

/// The rotational embedding: profile, mesh, and consistency checks, or a
/// report of why the surface admits none. A surface that fails the
/// embeddability classification is a finding, not an error.
pub fn embed(args: EmbedArgs) -> Result<bool, CliError> {
    let file: EmbedFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let samples = args.samples.or(file.samples).unwrap_or(200);
    let w_max = args
        .w_max
        .or(file.w_max)
        .unwrap_or(tannery::geometry::DEFAULT_CHART_EXTENT);
    let n_theta = args.n_theta.or(file.n_theta).unwrap_or(48);
    let n_phi = args.n_phi.or(file.n_phi).unwrap_or(24);
    let geodesic_i = args.geodesic_i.or(file.geodesic_i);
    let profile_out = args.profile_out.or(file.profile_out);
    let mesh_out = args.mesh_out.or(file.mesh_out);
    let out = args.out.or(file.out);

    let config = format!(
        "{{\"surface\":{},\"samples\":{samples},\"w-max\":{},\"n-theta\":{n_theta},\
         \"n-phi\":{n_phi},\"geodesic-i\":{}}}",
        spec_json(spec),
        json_f64(w_max),
        geodesic_i.map_or("null".to_string(), json_f64)
    );

    let (embeddable, reason) = match tannery::geometry::embeddability(spec) {
        Ok(pair) => pair,
        Err(Error::Unsupported(msg)) => (false, msg),
        Err(e) => return Err(runtime(e)),
    };
    if !embeddable {
        let doc = Document {
            command: "embed",
            config,
            results: vec![
                ("embeddable".into(), "false".into()),
                ("reason".into(), json_str(&reason)),
            ],
            checks: Vec::new(),
        };
        return write_document(&doc, out.as_deref());
    }

    let profile = time("embedding profile", || {
        tannery::geometry::embedding_profile_with_extent(spec, samples, w_max)
    })
    .map_err(lib_err)?;

    let mut checks = Vec::new();

    let induced = theta_grid(199, PI / 200.0)
        .par_iter()
        .map(|&th| tannery::geometry::embedding_slope_identity_residual(spec, th))
        .try_reduce(|| 0.0, |a: f64, b| Ok(a.max(b)));
    match induced {
        Ok(worst) => checks.push(Check::with_detail(
            "induced-metric",
            worst,
            INDUCED_METRIC_TOL,
            "embedding slopes against the chart metric at 199 latitudes".into(),
        )),
        Err(e) => checks.push(Check::failed(
            "induced-metric",
            INDUCED_METRIC_TOL,
            e.to_string(),
        )),
    }

    let mut mesh = time("mesh", || {
        tannery::geometry::export_mesh(spec, &profile, n_theta, n_phi)
    })
    .map_err(lib_err)?;
    match mesh.validate() {
        Ok(()) => checks.push(Check::counted("mesh-validity", 0, None)),
        Err(e) => checks.push(Check::counted("mesh-validity", 1, Some(e.to_string()))),
    }

    if let SurfaceSpec::TanneryPear = spec {
        let worst = mesh
            .vertices
            .iter()
            .fold(0.0f64, |acc, v| {
                acc.max(tannery::geometry::pear_cartesian_residual(v[0], v[1], v[2]))
            });
        checks.push(Check::with_detail(
            "cartesian-identity",
            worst,
            CURVATURE_CLOSED_TOL,
            format!("quartic surface equation over {} mesh vertices", mesh.vertices.len()),
        ));
        checks.push(Check::with_detail(
            "profile-height",
            (profile.total_height - 4.0 * SQRT_2).abs(),
            HEIGHT_TOL,
            "total height against 4 sqrt 2".into(),
        ));
    }

    let mut results = vec![
        ("embeddable".to_string(), "true".to_string()),
        ("reason".to_string(), json_str(&reason)),
        ("chart".to_string(), json_str(profile.chart.name())),
        ("total-height".to_string(), json_f64(profile.total_height)),
        (
            "truncation-gap".to_string(),
            json_f64(profile.truncation_gap),
        ),
        ("vertices".to_string(), mesh.vertices.len().to_string()),
        ("quads".to_string(), mesh.quads.len().to_string()),
        ("triangles".to_string(), mesh.triangles.len().to_string()),
    ];

    if let Some(gi) = geodesic_i {
        validate_inclination(spec, gi)?;
        let curve = tannery::closure::parametric_curve(spec, gi, 256).map_err(lib_err)?;
        let pts = tannery::geometry::geodesic_polyline(spec, &curve, &profile).map_err(runtime)?;
        results.push(("geodesic-points".into(), pts.len().to_string()));
        mesh.attach_polyline(&pts);
    }

    if let Some(path) = &profile_out {
        let mut buf = Vec::new();
        profile
            .to_csv(&mut buf)
            .map_err(|e| CliError::Runtime(format!("profile export: {e}")))?;
        write_artifact(path, &buf)?;
    }
    if let Some(path) = &mesh_out {
        let mut buf = Vec::new();
        mesh.to_obj(&mut buf)
            .map_err(|e| CliError::Runtime(format!("mesh export: {e}")))?;
        write_artifact(path, &buf)?;
    }

    let doc = Document {
        command: "embed",
        config,
        results,
        checks,
    };
    write_document(&doc, out.as_deref())
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct ReportFile {
    surface: Option<Value>,
    seed: Option<u64>,
    i: Option<f64>,
    out: Option<PathBuf>,
}

type StepOut = (Vec<Check>, Vec<(String, String)>);

/// The full verification battery at the acceptance tolerances, one
/// consolidated report. Checks run in parallel; assembly is sequential
/// with a fixed order, and failures accumulate instead of aborting.
pub fn report_all(args: ReportArgs) -> Result<bool, CliError> {
    let file: ReportFile = load_file(args.surface.config.as_deref())?;
    let spec = resolve(&args.surface, file.surface)?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let i = match args.i.or(file.i) {
        Some(i) => {
            validate_inclination(spec, i)?;
            i
        }
        None => default_inclination(spec)?,
    };
    let out = args.out.or(file.out);

    let steps: Vec<Box<dyn Fn() -> StepOut + Send + Sync>> = vec![
        Box::new(move || step_charts(spec)),
        Box::new(move || step_system(spec)),
        Box::new(move || step_constraint(spec, seed)),
        Box::new(move || step_rotation(spec)),
        Box::new(move || step_closure(spec, i)),
        Box::new(move || step_drift(spec, i)),
        Box::new(move || step_measure(spec)),
        Box::new(move || step_curvature(spec)),
        Box::new(move || step_embedding(spec)),
    ];
    let outputs: Vec<StepOut> = time("battery", || steps.par_iter().map(|s| s()).collect());

    let mut checks = Vec::new();
    let mut results = vec![("inclination".to_string(), json_f64(i))];
    for (c, r) in outputs {
        checks.extend(c);
        results.extend(r);
    }

    let config = format!(
        "{{\"surface\":{},\"seed\":{seed},\"i\":{}}}",
        spec_json(spec),
        json_f64(i)
    );
    let doc = Document {
        command: "report",
        config,
        results,
        checks,
    };
    write_document(&doc, out.as_deref())
}

/// Chart round trips, metric pullbacks, and the affine-chart limit where
/// the family has one.
fn step_charts(spec: SurfaceSpec) -> StepOut {
    let grid = theta_grid(500, 1e-6);
    let mut charts = vec![surfaces::native_chart(spec)];
    if spec.zoll_v_parameter().is_some() {
        charts.push(Chart::V);
    }

    let mut checks = Vec::new();
    let mut round_trip = 0.0f64;
    let mut round_err = None;
    for &chart in &charts {
        for &th in &grid {
            let trip = surfaces::theta_to_chart(spec, th, chart)
                .and_then(|pt| surfaces::chart_to_theta(spec, pt));
            match trip {
                Ok(back) => round_trip = round_trip.max((back - th).abs()),
                Err(e) => {
                    round_err = Some(format!("{} chart at theta = {th}: {e}", chart.name()));
                    break;
                }
            }
        }
    }
    let chart_names: Vec<&str> = charts.iter().map(|c| c.name()).collect();
    checks.push(match round_err {
        None => Check::with_detail(
            "chart-round-trip",
            round_trip,
            ROUND_TRIP_TOL,
            format!("charts {} at 500 latitudes", chart_names.join(", ")),
        ),
        Some(msg) => Check::failed("chart-round-trip", ROUND_TRIP_TOL, msg),
    });

    let pullback = grid
        .par_iter()
        .map(|&th| surfaces::chart_consistency_residual(spec, th))
        .try_reduce(|| 0.0, |a: f64, b| Ok(a.max(b)));
    checks.push(match pullback {
        Ok(worst) => Check::with_detail(
            "chart-pullback",
            worst,
            PULLBACK_TOL,
            "chart metric pulled back against the latitude form".into(),
        ),
        Err(e) => Check::failed("chart-pullback", PULLBACK_TOL, e.to_string()),
    });

    if spec.zoll_v_parameter().is_some() {
        let limit = grid
            .par_iter()
            .map(|&th| surfaces::v_chart_limit_residual(spec, th))
            .try_reduce(|| 0.0, |a: f64, b| Ok(a.max(b)));
        checks.push(match limit {
            Ok(worst) => Check::with_detail(
                "v-chart-limit",
                worst,
                PULLBACK_TOL,
                "affine chart against its scaling limit".into(),
            ),
            Err(e) => Check::failed("v-chart-limit", PULLBACK_TOL, e.to_string()),
        });
    } else {
        checks.push(Check::skipped(
            "v-chart-limit",
            "the family has no affine v-chart".into(),
        ));
    }

    (checks, Vec::new())
}

fn step_system(spec: SurfaceSpec) -> StepOut {
    let check = match max_system_residual(spec, 1000) {
        Ok(worst) => Check::with_detail(
            "coefficient-system",
            worst,
            SYSTEM_TOL,
            "1000 interior latitudes, analytic slopes".into(),
        ),
        Err(e) => Check::failed("coefficient-system", SYSTEM_TOL, e.to_string()),
    };
    (vec![check], Vec::new())
}

fn step_constraint(spec: SurfaceSpec, seed: u64) -> StepOut {
    let mut checks = Vec::new();
    match tannery::invariants::sample_constraint_residual(spec, 1000, seed) {
        Ok(worst) => checks.push(Check::with_detail(
            "constraint-identity",
            worst,
            CONSTRAINT_TOL,
            format!("1000 seeded off-shell phase points, seed {seed}"),
        )),
        Err(e) => checks.push(Check::failed(
            "constraint-identity",
            CONSTRAINT_TOL,
            e.to_string(),
        )),
    }

    let grid = parse_i_grid(DEFAULT_I_GRID).expect("the default grid is well formed");
    let mut worst_gap = 0.0f64;
    let mut err = None;
    for &i in &grid {
        match canonical_constant(spec, i) {
            Ok((_, _, _, gap)) => worst_gap = worst_gap.max(gap),
            Err(e) => {
                err = Some(e.to_string());
                break;
            }
        }
    }
    checks.push(match err {
        None => Check::with_detail(
            "canonical-constant",
            worst_gap,
            CONSTRAINT_TOL,
            format!(
                "relative gap of S1^2 + S2^2 to its closed form over {} inclinations",
                grid.len()
            ),
        ),
        Some(msg) => Check::failed("canonical-constant", CONSTRAINT_TOL, msg),
    });
    (checks, Vec::new())
}

fn step_rotation(spec: SurfaceSpec) -> StepOut {
    let grid = parse_i_grid(DEFAULT_I_GRID).expect("the default grid is well formed");
    let (p, q) = closure_type(spec);
    let expected = p as f64 * PI / q as f64;
    let entries = tannery::closure::rotation_grid(spec, &grid, ROTATION_QUAD_TOL);

    let mut entry_json = Vec::with_capacity(entries.len());
    let mut worst = 0.0f64;
    let mut offenders = 0usize;
    let mut errors = Vec::new();
    for (idx, res) in entries.iter().enumerate() {
        match res {
            Ok(r) => {
                entry_json.push(r.to_json());
                worst = worst.max((r.value - expected).abs());
                if (r.p, r.q) != (p, q) {
                    offenders += 1;
                }
            }
            Err(e) => {
                entry_json.push(format!(
                    "{{\"i\":{},\"error\":{}}}",
                    json_f64(grid[idx]),
                    json_str(&e.to_string())
                ));
                errors.push(format!("i = {}: {e}", grid[idx]));
            }
        }
    }
    let mut checks = Vec::new();
    if errors.is_empty() {
        checks.push(Check::with_detail(
            "rotation-angle",
            worst,
            ROTATION_TOL,
            format!("max |R(i) - {p} pi / {q}| over {} inclinations", grid.len()),
        ));
    } else {
        checks.push(Check::failed(
            "rotation-angle",
            ROTATION_TOL,
            errors.join("; "),
        ));
    }
    checks.push(Check::counted(
        "rotation-classification",
        offenders + errors.len(),
        Some(format!("entries not classified as (p, q) = ({p}, {q})")),
    ));
    (
        checks,
        vec![("rotation".into(), format!("[{}]", entry_json.join(",")))],
    )
}

fn step_closure(spec: SurfaceSpec, i: f64) -> StepOut {
    let (p, q) = closure_type(spec);
    let mut checks = Vec::new();
    let mut results = Vec::new();
    match tannery::closure::closure_check(spec, i, CLOSURE_TOL) {
        Ok(rep) => {
            checks.push(Check::measured("closure-gap", rep.residual, CLOSURE_TOL));
            checks.push(Check::with_detail(
                "closure-period",
                (rep.period - TAU * p as f64 / q as f64).abs(),
                CLOSURE_TOL,
                format!("first-return arclength against 2 pi {p} / {q}"),
            ));
            checks.push(Check::counted(
                "closure-winding",
                usize::from((rep.turns, rep.oscillations) != (p, q)),
                Some(format!(
                    "(turns, oscillations) = ({}, {}) against ({p}, {q})",
                    rep.turns, rep.oscillations
                )),
            ));
            results.push(("closure".to_string(), rep.to_json()));
        }
        Err(e) => {
            let msg = e.to_string();
            checks.push(Check::failed("closure-gap", CLOSURE_TOL, msg.clone()));
            checks.push(Check::failed("closure-period", CLOSURE_TOL, msg.clone()));
            checks.push(Check::failed("closure-winding", 1.0, msg));
        }
    }
    match tannery::closure::compare_parametric_numeric(spec, i) {
        Ok(dev) => checks.push(Check::with_detail(
            "parametric-flow",
            dev,
            CLOSURE_TOL,
            "max azimuth deviation between the parametric curve and the integrated flow".into(),
        )),
        Err(e) => checks.push(Check::failed("parametric-flow", CLOSURE_TOL, e.to_string())),
    }
    (checks, results)
}

fn step_drift(spec: SurfaceSpec, i: f64) -> StepOut {
    let run = tannery::flow::initial_phase(spec, i).and_then(|p0| {
        let traj = tannery::flow::integrate(spec, p0, 2.0 * TAU, FlowSettings::default())?;
        tannery::invariants::drift_report(spec, &traj)
    });
    match run {
        Ok(rep) => {
            let worst = rep
                .drift_h
                .abs()
                .max(rep.drift_p_phi.abs())
                .max(rep.drift_s1.abs())
                .max(rep.drift_s2.abs());
            let checks = vec![
                Check::with_detail(
                    "flow-drift",
                    worst,
                    DRIFT_TOL,
                    "largest relative drift of H, p_phi, S1, S2 over two closure periods".into(),
                ),
                Check::measured(
                    "constraint-on-trajectory",
                    rep.constraint_max_residual.abs(),
                    DRIFT_TOL,
                ),
            ];
            (checks, vec![("invariants".to_string(), rep.to_json())])
        }
        Err(e) => (
            vec![
                Check::failed("flow-drift", DRIFT_TOL, e.to_string()),
                Check::failed("constraint-on-trajectory", DRIFT_TOL, e.to_string()),
            ],
            Vec::new(),
        ),
    }
}

fn step_measure(spec: SurfaceSpec) -> StepOut {
    let (p, q) = closure_type(spec);
    let expected = p as f64 / q as f64 * 2.0 * TAU;
    let mut checks = Vec::new();
    let mut results = Vec::new();
    match tannery::geometry::surface_measure(spec) {
        Ok(mu) => {
            checks.push(Check::with_detail(
                "surface-measure",
                (mu - expected).abs(),
                MEASURE_TOL,
                format!("measure against {p}/{q} x 4 pi"),
            ));
            results.push(("measure".to_string(), json_f64(mu)));
            match tannery::geometry::native_chart_area(spec) {
                Ok(area) => checks.push(Check::measured(
                    "chart-area",
                    (area - mu).abs(),
                    CHART_AREA_TOL,
                )),
                Err(Error::Unsupported(msg)) => checks.push(Check::skipped("chart-area", msg)),
                Err(e) => checks.push(Check::failed("chart-area", CHART_AREA_TOL, e.to_string())),
            }
        }
        Err(e) => {
            checks.push(Check::failed("surface-measure", MEASURE_TOL, e.to_string()));
            checks.push(Check::failed("chart-area", CHART_AREA_TOL, e.to_string()));
        }
    }

    let (constant, violation) = tannery::closure::odd_profile_check(spec, 1000);
    checks.push(Check::with_detail(
        "profile-constant",
        (constant - p as f64 / q as f64).abs(),
        PARITY_TOL,
        format!("equatorial profile value against {p}/{q}"),
    ));
    checks.push(Check::with_detail(
        "even-profile-part",
        violation,
        PARITY_TOL,
        "largest deviation of A(theta) + A(pi - theta) from twice the constant".into(),
    ));
    results.push(("profile-constant".to_string(), json_f64(constant)));
    (checks, results)
}

fn step_curvature(spec: SurfaceSpec) -> StepOut {
    let mut checks = Vec::new();
    let mut results = Vec::new();

    if let SurfaceSpec::TanneryPear = spec {
        let grid = theta_grid(1000, 1e-6);
        let worst = grid
            .par_iter()
            .map(|&th| {
                tannery::geometry::gaussian_curvature(spec, th)
                    .map(|s| (s.k - tannery::geometry::pear_curvature_closed_form(th)).abs())
            })
            .try_reduce(|| 0.0, |a: f64, b| Ok(a.max(b)));
        checks.push(match worst {
            Ok(w) => Check::with_detail(
                "curvature-closed-form",
                w,
                CURVATURE_CLOSED_TOL,
                "profile-based curvature against the closed form at 1000 latitudes".into(),
            ),
            Err(e) => Check::failed("curvature-closed-form", CURVATURE_CLOSED_TOL, e.to_string()),
        });
    }

    let expected_total = match spec {
        SurfaceSpec::ZollSphere { .. } => Some(2.0 * TAU),
        SurfaceSpec::TanneryPear | SurfaceSpec::TanneryGeneralized { .. } => {
            Some(2.0 * TAU * 2.0 / 3.0)
        }
        SurfaceSpec::ZollOrbifold { .. } => None,
    };
    match tannery::geometry::total_curvature(spec) {
        Ok(total) => {
            let expected = expected_total.expect("families with a total have an expected value");
            checks.push(Check::with_detail(
                "total-curvature",
                (total - expected).abs(),
                TOTAL_CURVATURE_TOL,
                "integrated curvature against the Gauss-Bonnet total".into(),
            ));
            results.push(("total-curvature".to_string(), json_f64(total)));
        }
        Err(Error::Unsupported(msg)) => checks.push(Check::skipped("total-curvature", msg)),
        Err(e) => checks.push(Check::failed(
            "total-curvature",
            TOTAL_CURVATURE_TOL,
            e.to_string(),
        )),
    }
    (checks, results)
}

fn step_embedding(spec: SurfaceSpec) -> StepOut {
    match tannery::geometry::embeddability(spec) {
        Ok((true, _)) => {
            let induced = theta_grid(199, PI / 200.0)
                .par_iter()
                .map(|&th| tannery::geometry::embedding_slope_identity_residual(spec, th))
                .try_reduce(|| 0.0, |a: f64, b| Ok(a.max(b)));
            let check = match induced {
                Ok(worst) => Check::with_detail(
                    "induced-metric",
                    worst,
                    INDUCED_METRIC_TOL,
                    "embedding slopes against the chart metric at 199 latitudes".into(),
                ),
                Err(e) => Check::failed("induced-metric", INDUCED_METRIC_TOL, e.to_string()),
            };
            (
                vec![check],
                vec![("embeddable".to_string(), "true".to_string())],
            )
        }
        Ok((false, reason)) | Err(Error::Unsupported(reason)) => (
            vec![Check::skipped("induced-metric", reason)],
            vec![("embeddable".to_string(), "false".to_string())],
        ),
        Err(e) => (
            vec![Check::failed(
                "induced-metric",
                INDUCED_METRIC_TOL,
                e.to_string(),
            )],
            Vec::new(),
        ),
    }
}
