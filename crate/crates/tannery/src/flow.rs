//! Hamiltonian geodesic flow on the surface families.
//!
//! Free motion on a surface of revolution with metric A²(θ)dθ² + sin²θ dφ²
//! has hamiltonian H = ½(p_θ²/A² + p_φ²/sin²θ). On the energy shell 2E = 1
//! the time parameter is arclength, and p_φ (the Clairaut constant) confines
//! every non-meridian trajectory to the band sin θ ≥ |p_φ|, safely away from
//! the polar chart singularities. The azimuthal momentum is carried as an
//! exact constant; only (θ, φ, p_θ) are integrated.

use crate::error::{Error, Result};
use crate::numeric::rk::{Dopri5, Segment};
use crate::surfaces::{profile, SurfaceSpec};
use rayon::prelude::*;
use std::io::{self, Write};

/// A point of the phase space. φ accumulates (it is not reduced mod 2π), so
/// winding information survives long integrations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub theta: f64,
    pub phi: f64,
    pub p_theta: f64,
    pub p_phi: f64,
}

/// Integrator configuration. `max_step` bounds the arclength between stored
/// samples; `dense_output` records per-step interpolants so events can be
/// located independently of the step sequence.
#[derive(Debug, Clone, Copy)]
pub struct FlowSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub dense_output: bool,
}

impl Default for FlowSettings {
    fn default() -> Self {
        FlowSettings {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: 0.5,
            dense_output: true,
        }
    }
}

/// Starts with |p_φ| below this are meridians up to integrator resolution
/// and are rejected: their geodesics run through the poles, outside the
/// coordinate strip.
pub const MERIDIAN_MIN_P_PHI: f64 = 1e-8;

/// Required closeness of a start point to the arclength shell 2H = 1.
pub const ON_SHELL_TOL: f64 = 1e-12;

/// Bisection width, in arclength, for event location on dense output.
const EVENT_TOL: f64 = 1e-12;

/// An integrated geodesic: accepted-step samples plus (when requested) the
/// dense interpolant covering [0, T] without gaps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub spec: SurfaceSpec,
    pub settings: FlowSettings,
    pub samples: Vec<(f64, PhasePoint)>,
    segments: Vec<Segment<3>>,
    p_phi: f64,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        self.samples.last().expect("at least the start sample").0
    }

    pub fn end(&self) -> (f64, PhasePoint) {
        *self.samples.last().expect("at least the start sample")
    }

    pub fn has_dense_output(&self) -> bool {
        !self.segments.is_empty()
    }

    /// Dense evaluation at any arclength inside [0, duration].
    pub fn sample_at(&self, t: f64) -> Result<PhasePoint> {
        if self.samples.len() == 1 {
            // Zero-length trajectory: only t = 0 is inside the span.
            if t == 0.0 {
                return Ok(self.samples[0].1);
            }
            return Err(Error::Domain(format!(
                "t = {t} outside the integrated span [0, 0]"
            )));
        }
        if self.segments.is_empty() {
            return Err(Error::Domain(
                "dense sampling requires dense_output to have been enabled".into(),
            ));
        }
        let t_end = self.duration();
        if !(0.0..=t_end).contains(&t) {
            return Err(Error::Domain(format!(
                "t = {t} outside the integrated span [0, {t_end}]"
            )));
        }
        let idx = match self
            .segments
            .binary_search_by(|s| s.t0.partial_cmp(&t).expect("finite segment start"))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let y = self.segments[idx].eval(t);
        Ok(PhasePoint {
            theta: y[0],
            phi: y[1],
            p_theta: y[2],
            p_phi: self.p_phi,
        })
    }

    /// CSV export with header `t,theta,phi,p_theta,p_phi`, one accepted step
    /// per row, 17 significant digits throughout.
    pub fn to_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "t,theta,phi,p_theta,p_phi")?;
        for (t, p) in &self.samples {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                t, p.theta, p.phi, p.p_theta, p.p_phi
            )?;
        }
        Ok(())
    }
}

/// H = ½(p_θ²/A² + p_φ²/sin²θ). Arclength parametrization corresponds to
/// the shell H = ½.
pub fn hamiltonian(spec: SurfaceSpec, p: PhasePoint) -> Result<f64> {
    let ev = profile(spec, p.theta)?;
    let pi_term = p.p_theta / ev.a;
    let l_term = p.p_phi / ev.s;
    Ok(0.5 * (pi_term * pi_term + l_term * l_term))
}

/// Hamilton's equations: (dθ/dt, dφ/dt, dp_θ/dt, dp_φ/dt). The last
/// component is identically zero; it is returned so the vector matches the
/// phase-space layout.
pub fn hamilton_rhs(spec: SurfaceSpec, p: PhasePoint) -> Result<[f64; 4]> {
    let ev = profile(spec, p.theta)?;
    let a2 = ev.a * ev.a;
    let s2 = ev.s * ev.s;
    Ok([
        p.p_theta / a2,
        p.p_phi / s2,
        ev.da * p.p_theta * p.p_theta / (a2 * ev.a) + ev.c * p.p_phi * p.p_phi / (s2 * ev.s),
        0.0,
    ])
}

/// The canonical start of inclination i: the turning point θ = i, heading
/// due east with p_φ = sin i. Lies on the shell 2H = 1 exactly.
pub fn initial_phase(spec: SurfaceSpec, i: f64) -> Result<PhasePoint> {
    if !(i.is_finite() && 0.0 < i && i < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "inclination must lie strictly inside (0, pi/2), got {i}"
        )));
    }
    profile(spec, i)?;
    Ok(PhasePoint {
        theta: i,
        phi: 0.0,
        p_theta: 0.0,
        p_phi: i.sin(),
    })
}

fn check_settings(settings: &FlowSettings) -> Result<()> {
    if settings.rel_tol > 0.0 && settings.abs_tol > 0.0 && settings.max_step > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(
            "flow tolerances and max_step must be positive".into(),
        ))
    }
}

/// Integrate the geodesic flow from `p0` over t ∈ [0, T].
///
/// `p0` must sit on the arclength shell (|2H − 1| ≤ 1e−12) and must not be
/// a meridian: Clairaut's bound sin θ ≥ |p_φ| then keeps the trajectory
/// inside the coordinate strip for any T. T = 0 yields the single-sample
/// trajectory.
pub fn integrate(
    spec: SurfaceSpec,
    p0: PhasePoint,
    t_end: f64,
    settings: FlowSettings,
) -> Result<Trajectory> {
    check_settings(&settings)?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::Domain(format!(
            "integration span T must satisfy T >= 0, got {t_end}"
        )));
    }
    if p0.p_phi.abs() < MERIDIAN_MIN_P_PHI {
        return Err(Error::Domain(format!(
            "meridian start (|p_phi| = {} < {MERIDIAN_MIN_P_PHI}) rejected: meridians \
             run through the poles, where the coordinate strip is singular",
            p0.p_phi.abs()
        )));
    }
    let h0 = hamiltonian(spec, p0)?;
    if (2.0 * h0 - 1.0).abs() > ON_SHELL_TOL {
        return Err(Error::Domain(format!(
            "start point off the arclength shell: |2H - 1| = {:e} exceeds {ON_SHELL_TOL:e}",
            (2.0 * h0 - 1.0).abs()
        )));
    }

    let p_phi = p0.p_phi;
    if t_end == 0.0 {
        return Ok(Trajectory {
            spec,
            settings,
            samples: vec![(0.0, p0)],
            segments: Vec::new(),
            p_phi,
        });
    }

    // NaN poisons the step whenever a trial stage leaves the strip; the
    // controller then rejects and shrinks, and a genuine pole approach
    // surfaces as StepFailure instead of a panic.
    let rhs = move |_t: f64, y: &[f64; 3]| -> [f64; 3] {
        match profile(spec, y[0]) {
            Ok(ev) => {
                let a2 = ev.a * ev.a;
                let s2 = ev.s * ev.s;
                [
                    y[2] / a2,
                    p_phi / s2,
                    ev.da * y[2] * y[2] / (a2 * ev.a) + ev.c * p_phi * p_phi / (s2 * ev.s),
                ]
            }
            Err(_) => [f64::NAN; 3],
        }
    };

    let solver = Dopri5 {
        rel_tol: settings.rel_tol,
        abs_tol: settings.abs_tol,
        max_step: settings.max_step,
        ..Dopri5::default()
    };
    let sol = solver
        .solve(
            rhs,
            0.0,
            t_end,
            [p0.theta, p0.phi, p0.p_theta],
            settings.dense_output,
        )
        .map_err(|u| Error::StepFailure {
            t: u.t,
            theta: u.y[0],
        })?;

    let samples = sol
        .ts
        .iter()
        .zip(&sol.ys)
        .map(|(&t, y)| {
            (
                t,
                PhasePoint {
                    theta: y[0],
                    phi: y[1],
                    p_theta: y[2],
                    p_phi,
                },
            )
        })
        .collect();
    Ok(Trajectory {
        spec,
        settings,
        samples,
        segments: sol.segments,
        p_phi,
    })
}

/// Integrate many (start, T) jobs for one surface in parallel. Results are
/// returned in job order, independent of scheduling.
pub fn integrate_batch(
    spec: SurfaceSpec,
    jobs: &[(PhasePoint, f64)],
    settings: FlowSettings,
) -> Vec<Result<Trajectory>> {
    jobs.par_iter()
        .map(|&(p0, t_end)| integrate(spec, p0, t_end, settings))
        .collect()
}

/// Locate the turning points of the latitude: times where p_θ crosses zero,
/// refined on the dense output to 1e−12 in t. Returns (t, θ(t)) pairs in
/// increasing t order, including a turning point exactly at the start.
pub fn turning_points(traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    if traj.samples.len() > 1 && traj.segments.is_empty() {
        return Err(Error::Domain(
            "turning-point location requires dense output".into(),
        ));
    }
    let mut events = Vec::new();
    let first = &traj.samples[0];
    if first.1.p_theta == 0.0 {
        events.push((first.0, first.1.theta));
    }
    for pair in traj.samples.windows(2) {
        let (ta, pa) = pair[0];
        let (tb, pb) = pair[1];
        if pb.p_theta == 0.0 {
            events.push((tb, pb.theta));
            continue;
        }
        if pa.p_theta == 0.0 || pa.p_theta.signum() == pb.p_theta.signum() {
            continue;
        }
        // Bisect the dense p_theta over [ta, tb].
        let (mut lo, mut hi) = (ta, tb);
        let (mut f_lo, _) = (pa.p_theta, pb.p_theta);
        while hi - lo > EVENT_TOL {
            let mid = 0.5 * (lo + hi);
            let f_mid = traj.sample_at(mid)?.p_theta;
            if f_mid == 0.0 {
                lo = mid;
                break;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
                f_lo = f_mid;
            } else {
                hi = mid;
            }
        }
        let t_star = 0.5 * (lo + hi);
        events.push((t_star, traj.sample_at(t_star)?.theta));
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Module contract bounds: energy drift along trajectories of length
    /// <= 8π at default tolerances, and the return accuracy of closed
    /// geodesics over one full period.
    const ENERGY_DRIFT_TOL: f64 = 1e-8;
    const CLOSURE_TOL: f64 = 1e-6;
    const REVERSIBILITY_TOL: f64 = 1e-7;

    fn flow_specs() -> Vec<SurfaceSpec> {
        vec![
            SurfaceSpec::zoll_sphere(1.0, 2.0).unwrap(),
            SurfaceSpec::pear(),
            SurfaceSpec::generalized(-0.5).unwrap(),
            // Wide safe band: the profile zero sits beyond pi - 0.3.
            SurfaceSpec::orbifold(-0.9, 0.01).unwrap(),
        ]
    }

    #[test]
    fn canonical_starts_sit_on_the_arclength_shell() {
        let spec = SurfaceSpec::pear();
        let p = initial_phase(spec, PI / 6.0).unwrap();
        assert_eq!(p.theta, PI / 6.0);
        assert_eq!(p.phi, 0.0);
        assert_eq!(p.p_theta, 0.0);
        assert!((p.p_phi - 0.5).abs() < 1e-15, "p_phi = sin(pi/6)");
        for i in [0.2, 0.7, 1.3] {
            let h = hamiltonian(spec, initial_phase(spec, i).unwrap()).unwrap();
            assert!(
                (2.0 * h - 1.0).abs() < 1e-15,
                "2H at inclination {} was {}",
                i,
                2.0 * h
            );
        }
    }

    #[test]
    fn hamiltonian_matches_hand_values_on_and_off_meridians() {
        let spec = SurfaceSpec::pear();
        // Equator: A = 2. A meridian-style point is fine for evaluation,
        // only the integrator rejects it.
        let p = PhasePoint {
            theta: PI / 2.0,
            phi: 0.0,
            p_theta: 2.0,
            p_phi: 0.0,
        };
        assert!((hamiltonian(spec, p).unwrap() - 0.5).abs() < 1e-15);
        let p = PhasePoint {
            theta: PI / 2.0,
            phi: 0.0,
            p_theta: 0.6 * 2.0,
            p_phi: 0.8,
        };
        assert!(
            (hamiltonian(spec, p).unwrap() - 0.5).abs() < 1e-15,
            "0.36 + 0.64 must rebuild the half shell"
        );
    }

    #[test]
    fn inclination_domain_is_enforced() {
        let spec = SurfaceSpec::pear();
        for bad in [0.0, PI / 2.0, -0.1, 2.0, f64::NAN] {
            assert!(initial_phase(spec, bad).is_err(), "i = {bad} accepted");
        }
    }

    #[test]
    fn integrator_rejects_meridians_and_off_shell_starts() {
        let spec = SurfaceSpec::pear();
        let meridian = PhasePoint {
            theta: PI / 2.0,
            phi: 0.0,
            p_theta: 2.0,
            p_phi: 0.0,
        };
        assert!(integrate(spec, meridian, 1.0, FlowSettings::default()).is_err());
        let off_shell = PhasePoint {
            theta: PI / 2.0,
            phi: 0.0,
            p_theta: 0.5,
            p_phi: 0.9,
        };
        assert!(
            integrate(spec, off_shell, 1.0, FlowSettings::default()).is_err(),
            "2H != 1 must be rejected"
        );
        let ok = initial_phase(spec, 0.8).unwrap();
        assert!(integrate(spec, ok, -1.0, FlowSettings::default()).is_err());
    }

    #[test]
    fn zero_span_returns_the_single_start_sample() {
        let spec = SurfaceSpec::pear();
        let p0 = initial_phase(spec, 0.8).unwrap();
        let traj = integrate(spec, p0, 0.0, FlowSettings::default()).unwrap();
        assert_eq!(traj.samples.len(), 1);
        assert_eq!(traj.samples[0], (0.0, p0));
        assert_eq!(traj.sample_at(0.0).unwrap(), p0);
    }

    #[test]
    fn rhs_agrees_with_finite_differences_of_the_hamiltonian() {
        const STEP: f64 = 1e-6;
        const FD_TOL: f64 = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let specs = flow_specs();
        for _ in 0..100 {
            let spec = specs[rng.random_range(0..specs.len())];
            let p = PhasePoint {
                theta: rng.random_range(0.3..PI - 0.3),
                phi: rng.random_range(0.0..6.0),
                p_theta: rng.random_range(-1.0..1.0),
                p_phi: rng.random_range(0.2..0.9),
            };
            let rhs = hamilton_rhs(spec, p).unwrap();
            let h = |q: PhasePoint| hamiltonian(spec, q).unwrap();
            let d_p_theta = {
                let mut a = p;
                let mut b = p;
                a.p_theta += STEP;
                b.p_theta -= STEP;
                (h(a) - h(b)) / (2.0 * STEP)
            };
            let d_p_phi = {
                let mut a = p;
                let mut b = p;
                a.p_phi += STEP;
                b.p_phi -= STEP;
                (h(a) - h(b)) / (2.0 * STEP)
            };
            let d_theta = {
                let mut a = p;
                let mut b = p;
                a.theta += STEP;
                b.theta -= STEP;
                (h(a) - h(b)) / (2.0 * STEP)
            };
            assert!((rhs[0] - d_p_theta).abs() < FD_TOL, "dtheta/dt mismatch");
            assert!((rhs[1] - d_p_phi).abs() < FD_TOL, "dphi/dt mismatch");
            assert!((rhs[2] + d_theta).abs() < FD_TOL, "dp_theta/dt mismatch");
            assert_eq!(rhs[3], 0.0, "p_phi must be analytically constant");
        }
    }

    #[test]
    fn energy_and_azimuthal_momentum_survive_long_flows() {
        for spec in flow_specs() {
            let p0 = initial_phase(spec, 0.8).unwrap();
            let traj = integrate(spec, p0, 8.0 * PI, FlowSettings::default()).unwrap();
            let mut last_phi = f64::NEG_INFINITY;
            for &(t, p) in &traj.samples {
                let h = hamiltonian(spec, p).unwrap();
                assert!(
                    (2.0 * h - 1.0).abs() < ENERGY_DRIFT_TOL,
                    "energy drift {:e} at t = {} for {}",
                    (2.0 * h - 1.0).abs(),
                    t,
                    spec.family_name()
                );
                assert_eq!(p.p_phi, p0.p_phi, "p_phi must be carried exactly");
                assert!(p.phi > last_phi, "phi must increase strictly");
                last_phi = p.phi;
            }
        }
    }

    #[test]
    fn zoll_sphere_flow_closes_after_arclength_two_pi() {
        let spec = SurfaceSpec::zoll_sphere(1.0, 2.0).unwrap();
        let p0 = initial_phase(spec, PI / 4.0).unwrap();
        let traj = integrate(spec, p0, 2.0 * PI, FlowSettings::default()).unwrap();
        let (_, p) = traj.end();
        assert!((p.theta - p0.theta).abs() < CLOSURE_TOL, "theta return");
        assert!(p.p_theta.abs() < CLOSURE_TOL, "p_theta return");
        assert!(
            (p.phi - 2.0 * PI).abs() < CLOSURE_TOL,
            "azimuth must advance by exactly one turn, got {}",
            p.phi
        );
    }

    #[test]
    fn pear_flow_closes_after_two_turns() {
        let spec = SurfaceSpec::pear();
        let p0 = initial_phase(spec, PI / 3.0).unwrap();
        let traj = integrate(spec, p0, 4.0 * PI, FlowSettings::default()).unwrap();
        let (_, p) = traj.end();
        assert!((p.theta - p0.theta).abs() < CLOSURE_TOL, "theta return");
        assert!(p.p_theta.abs() < CLOSURE_TOL, "p_theta return");
        assert!(
            (p.phi - 4.0 * PI).abs() < CLOSURE_TOL,
            "azimuth must advance by exactly two turns, got {}",
            p.phi
        );
    }

    /// Rescale p_theta at fixed latitude so 2H = 1 exactly. Chained
    /// integrations need this: a numerical end state drifts off the shell by
    /// O(rel_tol) more than the strict start gate admits.
    fn project_to_shell(spec: SurfaceSpec, p: PhasePoint) -> PhasePoint {
        let ev = profile(spec, p.theta).unwrap();
        let l_term = p.p_phi / ev.s;
        let target = ev.a * (1.0 - l_term * l_term).max(0.0).sqrt();
        PhasePoint {
            p_theta: target.copysign(p.p_theta),
            ..p
        }
    }

    #[test]
    fn momentum_flip_reverses_the_flow() {
        for spec in [
            SurfaceSpec::pear(),
            SurfaceSpec::zoll_sphere(-1.0, 3.0).unwrap(),
        ] {
            let p0 = initial_phase(spec, 0.9).unwrap();
            let t_span = 7.3;
            let fwd = integrate(spec, p0, t_span, FlowSettings::default()).unwrap();
            let (_, p1) = fwd.end();
            let flipped = project_to_shell(
                spec,
                PhasePoint {
                    p_theta: -p1.p_theta,
                    ..p1
                },
            );
            let back = integrate(spec, flipped, t_span, FlowSettings::default()).unwrap();
            let (_, p2) = back.end();
            assert!(
                (p2.theta - p0.theta).abs() < REVERSIBILITY_TOL
                    && (p2.p_theta + p0.p_theta).abs() < REVERSIBILITY_TOL,
                "flip-reversed flow missed the start for {}: theta {} vs {}",
                spec.family_name(),
                p2.theta,
                p0.theta
            );
            // The reversed azimuth retraces its advance.
            assert!(
                (p2.phi - 2.0 * p1.phi + p0.phi).abs() < REVERSIBILITY_TOL,
                "reversed azimuth should double the forward advance"
            );
        }
    }

    #[test]
    fn turning_points_alternate_and_are_equally_spaced() {
        // Closed-form oracle: along the flow dt = A dx in the oscillation
        // variable, so one half oscillation lasts the integral of A, which
        // is π for unit even part (spherical Zoll) and 2π for even part 2
        // (Tannery families).
        let cases = [
            (SurfaceSpec::zoll_sphere(1.0, 2.0).unwrap(), 0.6, PI),
            (SurfaceSpec::pear(), 0.5, 2.0 * PI),
        ];
        for (spec, i, half_period) in cases {
            let p0 = initial_phase(spec, i).unwrap();
            let traj = integrate(spec, p0, 8.0 * PI, FlowSettings::default()).unwrap();
            let events = turning_points(&traj).unwrap();
            assert!(events.len() >= 3, "expected several turning points");
            for (k, &(t, theta)) in events.iter().enumerate() {
                let expected = if k % 2 == 0 { i } else { PI - i };
                assert!(
                    (theta - expected).abs() < 1e-8,
                    "turning latitude {} at t = {} (expected {})",
                    theta,
                    t,
                    expected
                );
            }
            for pair in events.windows(2) {
                let gap = pair[1].0 - pair[0].0;
                assert!(
                    (gap - half_period).abs() < 1e-7,
                    "oscillation gap {} should be {} for {}",
                    gap,
                    half_period,
                    spec.family_name()
                );
            }
        }
    }

    #[test]
    fn dense_output_stays_on_shell_between_steps() {
        let spec = SurfaceSpec::generalized(0.5).unwrap();
        let p0 = initial_phase(spec, 1.1).unwrap();
        let traj = integrate(spec, p0, 10.0, FlowSettings::default()).unwrap();
        for k in 0..=500 {
            let t = 10.0 * k as f64 / 500.0;
            let p = traj.sample_at(t).unwrap();
            let h = hamiltonian(spec, p).unwrap();
            assert!(
                (2.0 * h - 1.0).abs() < ENERGY_DRIFT_TOL,
                "dense sample off shell at t = {t}"
            );
        }
        assert!(traj.sample_at(10.0 + 1e-9).is_err(), "beyond-span sampling");
        assert!(traj.sample_at(-0.1).is_err(), "negative-t sampling");
    }

    #[test]
    fn csv_export_round_trips_the_samples() {
        let spec = SurfaceSpec::pear();
        let p0 = initial_phase(spec, 0.7).unwrap();
        let traj = integrate(spec, p0, 1.0, FlowSettings::default()).unwrap();
        let mut buf = Vec::new();
        traj.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,theta,phi,p_theta,p_phi"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), traj.samples.len());
        let first: Vec<f64> = rows[0].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first.len(), 5);
        assert_eq!(first[1], p0.theta, "printed theta must parse back exactly");
    }

    #[test]
    fn batch_integration_matches_sequential_results() {
        let spec = SurfaceSpec::generalized(-0.9).unwrap();
        let jobs: Vec<(PhasePoint, f64)> = [0.4, 0.7, 1.0, 1.3]
            .iter()
            .map(|&i| (initial_phase(spec, i).unwrap(), 5.0))
            .collect();
        let batch = integrate_batch(spec, &jobs, FlowSettings::default());
        for (job, result) in jobs.iter().zip(batch) {
            let solo = integrate(spec, job.0, job.1, FlowSettings::default()).unwrap();
            let batched = result.unwrap();
            assert_eq!(
                solo.end().1,
                batched.end().1,
                "batch and sequential runs must agree bitwise"
            );
        }
    }
}
