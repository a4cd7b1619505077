//! Continued-fraction rational approximation with a denominator cap.
//!
//! Used to classify rotation numbers: the measured value divided by pi must
//! be recognized as p/q with small q, and a value that is NOT close to such a
//! fraction must be rejected rather than silently rounded.

/// A reduced fraction p/q with q >= 1. Convergents of a continued fraction
/// are automatically in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub p: i64,
    pub q: i64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Best rational approximation of x with denominator at most `max_den`,
/// by continued-fraction convergents plus the final semiconvergent probe.
/// Ties are broken toward the smaller denominator: a later candidate must be
/// strictly closer to replace an earlier one.
pub fn best_rational(x: f64, max_den: i64) -> Rational {
    assert!(max_den >= 1, "denominator cap must be at least 1");
    assert!(x.is_finite(), "cannot approximate a non-finite value");
    let negative = x < 0.0;
    let x = x.abs();

    let (mut p0, mut q0) = (1i64, 0i64);
    let (mut p1, mut q1) = (x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    // Continued-fraction digits of a 53-bit float below this are noise.
    while frac > 1e-15 {
        let inv = 1.0 / frac;
        let a = inv.floor() as i64;
        let q2 = match a.checked_mul(q1).and_then(|v| v.checked_add(q0)) {
            Some(v) => v,
            None => break,
        };
        if q2 > max_den {
            // The last convergent fits; its semiconvergent with the largest
            // admissible partial digit may still be closer.
            let t = (max_den - q0) / q1;
            if t >= 1 {
                let ps = t * p1 + p0;
                let qs = t * q1 + q0;
                if (x - ps as f64 / qs as f64).abs() < (x - p1 as f64 / q1 as f64).abs() {
                    p1 = ps;
                    q1 = qs;
                }
            }
            break;
        }
        let p2 = a * p1 + p0;
        (p0, q0) = (p1, q1);
        (p1, q1) = (p2, q2);
        frac = inv - a as f64;
    }
    Rational {
        p: if negative { -p1 } else { p1 },
        q: q1,
    }
}
