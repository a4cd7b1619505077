//! Embedded Dormand-Prince 5(4) integrator with FSAL, PI step-size control,
//! and the classic quartic dense-output interpolant.
//!
//! 7 stages, 6 right-hand-side evaluations per accepted step. The dense
//! interpolant is 4th-order accurate on each step, which is what makes
//! bisection-based event location (turning points, closure returns)
//! independent of the step sequence.

/// Step-size underflow: the controller drove h below the resolution of t.
///
/// Carries the last state so the caller can attach problem-specific context
/// (the geodesic flow reports the latitude at failure).
#[derive(Debug, Clone, Copy)]
pub struct Underflow<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
}

/// Dormand-Prince tableau, row by row.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
/// 5th-order solution weights (also the last tableau row: FSAL).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
/// Error weights b - b̂ (difference of the 5th- and 4th-order solutions).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
/// Dense-output weights for the quartic interpolant.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// One accepted step's dense-output data. Valid for t in [t0, t0 + h].
#[derive(Debug, Clone, Copy)]
pub struct Segment<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> Segment<N> {
    /// Evaluate the interpolant at the normalized position xi = (t - t0)/h.
    pub fn eval_xi(&self, xi: f64) -> [f64; N] {
        let xi1 = 1.0 - xi;
        let mut y = [0.0; N];
        for i in 0..N {
            let c = &self.cont;
            y[i] = c[0][i] + xi * (c[1][i] + xi1 * (c[2][i] + xi * (c[3][i] + xi1 * c[4][i])));
        }
        y
    }

    /// Evaluate the interpolant at absolute time t.
    pub fn eval(&self, t: f64) -> [f64; N] {
        self.eval_xi((t - self.t0) / self.h)
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Result of one integration: accepted-step samples plus, when requested,
/// the dense segments covering [t0, t_end] without gaps.
#[derive(Debug, Clone)]
pub struct Integration<const N: usize> {
    pub ts: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub segments: Vec<Segment<N>>,
    pub n_accepted: usize,
    pub n_rejected: usize,
    pub n_rhs: usize,
}

impl<const N: usize> Integration<N> {
    /// Dense evaluation at any t inside the integrated span. Requires the
    /// integration to have been run with dense output.
    pub fn eval(&self, t: f64) -> [f64; N] {
        assert!(!self.segments.is_empty(), "dense output was not recorded");
        let first = &self.segments[0];
        if t <= first.t0 {
            return first.eval(t);
        }
        // Last segment whose start does not exceed t.
        let idx = match self
            .segments
            .binary_search_by(|s| s.t0.partial_cmp(&t).expect("non-finite segment start"))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        self.segments[idx].eval(t)
    }
}

/// Adaptive integrator configuration. Defaults reproduce the classic
/// production tuning: safety 0.9, step-scale window [0.2, 10], PI
/// stabilization beta = 0.04.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub safety: f64,
    pub beta: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: f64::INFINITY,
            safety: 0.9,
            beta: 0.04,
            max_steps: 10_000_000,
        }
    }
}

impl Dopri5 {
    /// Integrate y' = f(t, y) from t0 to t_end (t_end >= t0). When `dense` is
    /// set, every accepted step also records its interpolant segment.
    pub fn solve<const N: usize, F>(
        &self,
        mut f: F,
        t0: f64,
        t_end: f64,
        y0: [f64; N],
        dense: bool,
    ) -> Result<Integration<N>, Underflow<N>>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut out = Integration {
            ts: vec![t0],
            ys: vec![y0],
            segments: Vec::new(),
            n_accepted: 0,
            n_rejected: 0,
            n_rhs: 0,
        };
        if t_end <= t0 {
            return Ok(out);
        }

        let expo1 = 0.2 - self.beta * 0.75;
        let mut fac_old: f64 = 1e-4;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        out.n_rhs += 1;
        let mut h = self.initial_step(&mut f, t, &y, &k1, t_end, &mut out.n_rhs);
        let mut rejected = false;

        for _ in 0..self.max_steps {
            if t >= t_end {
                return Ok(out);
            }
            if 0.1 * h <= t.abs() * f64::EPSILON {
                return Err(Underflow { t, y });
            }
            let mut last = false;
            if t + h >= t_end {
                h = t_end - t;
                last = true;
            }

            // Stages 2..6 plus the 5th-order solution and its FSAL stage.
            let mut ys = [0.0; N];
            for i in 0..N {
                ys[i] = y[i] + h * A21 * k1[i];
            }
            let k2 = f(t + C2 * h, &ys);
            for i in 0..N {
                ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
            }
            let k3 = f(t + C3 * h, &ys);
            for i in 0..N {
                ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
            }
            let k4 = f(t + C4 * h, &ys);
            for i in 0..N {
                ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
            }
            let k5 = f(t + C5 * h, &ys);
            for i in 0..N {
                ys[i] = y[i]
                    + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
            }
            let k6 = f(t + h, &ys);
            let mut y1 = [0.0; N];
            for i in 0..N {
                y1[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
            }
            let k7 = f(t + h, &y1);
            out.n_rhs += 6;

            // Scaled RMS error of the embedded 4th-order difference.
            let mut err_sq = 0.0;
            for i in 0..N {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sk = self.abs_tol + self.rel_tol * y[i].abs().max(y1[i].abs());
                err_sq += (e / sk) * (e / sk);
            }
            let err = (err_sq / N as f64).sqrt();

            let fac11 = err.powf(expo1);
            // Lund stabilization: damp the controller with the error of the
            // previous accepted step before recording the current one.
            let fac = (fac11 / fac_old.powf(self.beta) / self.safety).clamp(0.1, 5.0);
            if err <= 1.0 {
                fac_old = err.max(1e-4);
                if dense {
                    let mut cont = [[0.0; N]; 5];
                    for i in 0..N {
                        let dy = y1[i] - y[i];
                        let bspl = h * k1[i] - dy;
                        cont[0][i] = y[i];
                        cont[1][i] = dy;
                        cont[2][i] = bspl;
                        cont[3][i] = dy - h * k7[i] - bspl;
                        cont[4][i] = h
                            * (D1 * k1[i]
                                + D3 * k3[i]
                                + D4 * k4[i]
                                + D5 * k5[i]
                                + D6 * k6[i]
                                + D7 * k7[i]);
                    }
                    out.segments.push(Segment { t0: t, h, cont });
                }
                t = if last { t_end } else { t + h };
                y = y1;
                k1 = k7;
                out.ts.push(t);
                out.ys.push(y);
                out.n_accepted += 1;

                let mut h_new = h / fac;
                if h_new > self.max_step {
                    h_new = self.max_step;
                }
                if rejected {
                    h_new = h_new.min(h);
                }
                rejected = false;
                h = h_new;
            } else {
                h /= (fac11 / self.safety).min(5.0);
                rejected = true;
                out.n_rejected += 1;
            }
        }
        Err(Underflow { t, y })
    }

    /// Standard starting-step heuristic: balance the scaled sizes of y and
    /// y', probe one Euler step, and bound by the implied 5th-order accuracy.
    fn initial_step<const N: usize, F>(
        &self,
        f: &mut F,
        t0: f64,
        y0: &[f64; N],
        f0: &[f64; N],
        t_end: f64,
        n_rhs: &mut usize,
    ) -> f64
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
    {
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..N {
            let sk = self.abs_tol + self.rel_tol * y0[i].abs();
            dnf += (f0[i] / sk) * (f0[i] / sk);
            dny += (y0[i] / sk) * (y0[i] / sk);
        }
        let mut h = if dnf <= 1e-10 || dny <= 1e-10 {
            1e-6
        } else {
            0.01 * (dny / dnf).sqrt()
        };
        h = h.min(self.max_step).min(t_end - t0);

        let mut y1 = [0.0; N];
        for i in 0..N {
            y1[i] = y0[i] + h * f0[i];
        }
        let f1 = f(t0 + h, &y1);
        *n_rhs += 1;
        let mut der2 = 0.0;
        for i in 0..N {
            let sk = self.abs_tol + self.rel_tol * y0[i].abs();
            der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
        }
        let der2 = der2.sqrt() / h;
        let der12 = der2.max(dnf.sqrt());
        let h1 = if der12 <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der12).powf(0.2)
        };
        (100.0 * h).min(h1).min(self.max_step).min(t_end - t0)
    }
}
