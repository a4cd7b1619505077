//! Command-line laboratory for four families of surfaces of revolution
//! whose geodesic flows close up: rotation numbers, Hamiltonian flows,
//! cubic first integrals, closure checks, curvature, measures, and
//! embeddings, each reported as a JSON document of residual checks.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails or a
//! computation breaks down, 2 for configuration mistakes.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::CliError;

#[derive(Parser)]
#[command(
    name = "tannery",
    version,
    about = "Geodesic-flow laboratory for Zoll and Tannery surfaces of revolution"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Measure rotation numbers over an inclination grid and check that
    /// they hold the family's rational closure angle.
    Rotation(RotationArgs),
    /// Integrate one geodesic and check conservation of the energy, the
    /// angular momentum, and the two cubic integrals.
    Flow(FlowArgs),
    /// Check the cubic-integral constraint identity off shell and the
    /// coefficient system behind it.
    Invariants(InvariantsArgs),
    /// Assemble a closed geodesic parametrically and check first-return
    /// closure, winding counts, and agreement with the integrated flow.
    Closure(ClosureArgs),
    /// Sample the Gaussian curvature and check its closed forms and total.
    Curvature(CurvatureArgs),
    /// Check the surface measure against its closed form and the parity
    /// structure of the profile.
    Measure(MeasureArgs),
    /// Build the isometric embedding profile and mesh, with consistency
    /// checks, or report why the surface has none.
    Embed(EmbedArgs),
    /// Run the full verification battery and emit one consolidated report.
    Report(ReportArgs),
}

/// Surface selection, shared by every subcommand. The surface comes either
/// from --family with its parameters or from the --config file, not both.
#[derive(Args)]
struct SurfaceArgs {
    /// Family: zoll-sphere, tannery-pear, tannery-generalized, zoll-orbifold.
    #[arg(long, value_name = "NAME")]
    family: Option<String>,

    /// Parameter l of zoll-sphere (l >= -1).
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    l: Option<f64>,

    /// Parameter m of zoll-sphere (m > 1) or zoll-orbifold (m > 0).
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    m: Option<f64>,

    /// Parameter a of tannery-generalized or zoll-orbifold (-1 < a < 1).
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    a: Option<f64>,

    /// JSON run configuration supplying the surface and any omitted options.
    #[arg(long, value_name = "PATH", conflicts_with_all = ["family", "l", "m", "a"])]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RotationArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Inclination grid start:end:count, inclusive, in radians.
    #[arg(long, value_name = "GRID")]
    i_grid: Option<String>,

    /// Quadrature tolerance for the rotation integral.
    #[arg(long, value_name = "TOL")]
    quad_tol: Option<f64>,

    /// Tolerance on the distance from the rational closure angle.
    #[arg(long, value_name = "TOL")]
    check_tol: Option<f64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlowArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Inclination of the start point, in (0, pi/2).
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    i: Option<f64>,

    /// Integration span in arclength.
    #[arg(long, value_name = "REAL")]
    t_end: Option<f64>,

    /// Relative step-error tolerance of the integrator.
    #[arg(long, value_name = "TOL")]
    rel_tol: Option<f64>,

    /// Absolute step-error tolerance of the integrator.
    #[arg(long, value_name = "TOL")]
    abs_tol: Option<f64>,

    /// Tolerance on the relative drift of each conserved quantity.
    #[arg(long, value_name = "TOL")]
    drift_tol: Option<f64>,

    /// Write the sampled trajectory as CSV (t,theta,phi,p_theta,p_phi).
    #[arg(long, value_name = "PATH")]
    trajectory_out: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InvariantsArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Number of seeded off-shell phase points for the constraint check.
    #[arg(long, value_name = "N")]
    points: Option<usize>,

    /// Seed of the off-shell sample.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Number of interior latitudes for the coefficient-system check.
    #[arg(long, value_name = "N")]
    theta_points: Option<usize>,

    /// Inclination grid for the canonical-start constant record.
    #[arg(long, value_name = "GRID")]
    i_grid: Option<String>,

    /// Tolerance on the normalized constraint residual.
    #[arg(long, value_name = "TOL")]
    constraint_tol: Option<f64>,

    /// Tolerance on the coefficient-system residuals.
    #[arg(long, value_name = "TOL")]
    system_tol: Option<f64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClosureArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Inclination of the geodesic, in (0, pi/2).
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    i: Option<f64>,

    /// Tolerance on the first-return gap and the period.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,

    /// Samples per monotone latitude branch of the exported curve.
    #[arg(long, value_name = "N")]
    curve_samples: Option<usize>,

    /// Write the closed curve as CSV (theta,phi,branch).
    #[arg(long, value_name = "PATH")]
    curve_out: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurvatureArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Number of interior latitude samples.
    #[arg(long, value_name = "N")]
    points: Option<usize>,

    /// Tolerance on the closed-form curvature comparison.
    #[arg(long, value_name = "TOL")]
    comparison_tol: Option<f64>,

    /// Tolerance on the total-curvature check.
    #[arg(long, value_name = "TOL")]
    total_tol: Option<f64>,

    /// Write the curvature samples as CSV (theta,k).
    #[arg(long, value_name = "PATH")]
    samples_out: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Tolerance on the surface measure against its closed form.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,

    /// Tolerance on the native-chart area cross-check.
    #[arg(long, value_name = "TOL")]
    cross_tol: Option<f64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Number of profile rows.
    #[arg(long, value_name = "N")]
    samples: Option<usize>,

    /// Chart truncation for the unbounded charts (must exceed 1).
    #[arg(long, value_name = "REAL")]
    w_max: Option<f64>,

    /// Latitude rings of the exported mesh.
    #[arg(long, value_name = "N")]
    n_theta: Option<usize>,

    /// Azimuth sectors of the exported mesh.
    #[arg(long, value_name = "N")]
    n_phi: Option<usize>,

    /// Also embed the closed geodesic of this inclination as a polyline.
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    geodesic_i: Option<f64>,

    /// Write the profile as CSV (w,A,B).
    #[arg(long, value_name = "PATH")]
    profile_out: Option<PathBuf>,

    /// Write the mesh as Wavefront OBJ.
    #[arg(long, value_name = "PATH")]
    mesh_out: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    surface: SurfaceArgs,

    /// Seed of the off-shell constraint sample.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Inclination for the single-geodesic checks; defaults to a value
    /// admissible for the family.
    #[arg(long, value_name = "REAL", allow_hyphen_values = true)]
    i: Option<f64>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Cmd::Rotation(args) => commands::rotation(args),
        Cmd::Flow(args) => commands::flow(args),
        Cmd::Invariants(args) => commands::invariants(args),
        Cmd::Closure(args) => commands::closure(args),
        Cmd::Curvature(args) => commands::curvature(args),
        Cmd::Measure(args) => commands::measure(args),
        Cmd::Embed(args) => commands::embed(args),
        Cmd::Report(args) => commands::report_all(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.render());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
