//! Bracketed scalar root finding (Illinois-type regula falsi with bisection
//! safeguard) and bracket expansion helpers.

use crate::error::{Error, Result};

/// Find `x` in `[lo, hi]` with `f(x) = 0`, assuming `f(lo)` and `f(hi)` have
/// opposite signs (either may be zero). Converges when the bracket width is
/// below `atol + rtol * |x|`.
pub fn solve_bracketed(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    rtol: f64,
    atol: f64,
) -> Result<f64> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() {
        return Err(Error::Bracket(format!(
            "NaN at bracket endpoints [{lo}, {hi}]"
        )));
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}]: f(lo)={flo:e}, f(hi)={fhi:e}"
        )));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= atol + rtol * mid.abs() {
            return Ok(mid);
        }
        // Illinois step, falling back to bisection when the secant point
        // leaves the bracket or stalls.
        let mut x = (flo * hi - fhi * lo) / (flo - fhi);
        if !x.is_finite() || x <= lo || x >= hi {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 || fx.is_nan() {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expand `[x0, x0 * factor, ...]` upward until `f` changes sign relative to
/// `f(lo)`. Returns the bracketing pair. Fails past `cap`.
pub fn expand_upward(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    cap: f64,
) -> Result<(f64, f64)> {
    let flo = f(lo);
    if flo == 0.0 {
        return Ok((lo, lo));
    }
    let mut hi = if lo > 0.0 { lo * 2.0 } else { 1.0 };
    for _ in 0..2000 {
        let fhi = f(hi);
        if fhi == 0.0 || fhi.signum() != flo.signum() {
            return Ok((lo, hi));
        }
        lo = hi;
        hi *= 2.0;
        if hi > cap {
            return Err(Error::Bracket(format!(
                "bracket expansion exceeded {cap:e}"
            )));
        }
    }
    Err(Error::Bracket("bracket expansion stalled".into()))
}
