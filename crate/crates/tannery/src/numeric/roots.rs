//! Bracketed bisection. Chosen over faster secant-type iterations because
//! every root this crate locates lives on a provably monotone map, and
//! bisection's worst case is its only case: ~50 iterations to 1e-14.

use crate::error::{Error, Result};

/// Find x in [lo, hi] with f(x) = 0, assuming f changes sign on the bracket.
/// Stops when the bracket width drops below `x_tol` and returns its midpoint.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    if !x_tol.is_finite() || x_tol <= 0.0 {
        return Err(Error::Domain(format!(
            "bisection tolerance must be positive, got {x_tol}"
        )));
    }
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::Convergence(format!(
            "no sign change on bracket [{lo}, {hi}]: f = ({f_lo:e}, {f_hi:e})"
        )));
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..max_iter {
        if hi - lo <= x_tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence(format!(
        "bisection did not reach width {x_tol:e} in {max_iter} iterations (bracket [{lo}, {hi}])"
    )))
}
