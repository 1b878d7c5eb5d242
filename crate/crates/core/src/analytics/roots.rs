//! Bisection on a bracketing interval.

use crate::error::{invalid, Error, Result};

/// Default bracket for the time-valued roots, in the same time units as the dynamics.
pub const TIME_BRACKET: (f64, f64) = (1e-3, 50.0);

/// Finds a root of `f` on [lo, hi] by bisection until the bracket is narrower
/// than `x_tol` (absolute) or cannot be split further.
pub fn bisect<F>(f: F, lo: f64, hi: f64, x_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lo < hi) || !(x_tol > 0.0) {
        return Err(invalid("bracket", format!("need lo < hi and x_tol > 0, got [{lo}, {hi}], {x_tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::RootNotBracketed {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    let mut sign_a = fa.signum();
    while b - a > x_tol {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == sign_a {
            a = mid;
            sign_a = fm.signum();
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
