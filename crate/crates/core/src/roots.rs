//! Bracketing and one-dimensional root finding for monotone functions.

use crate::error::{Error, Result};

/// Double `hi` from `start` until `pred(hi)` holds, up to `cap`.
pub fn bracket_upward<P>(start: f64, cap: f64, mut pred: P) -> Result<f64>
where
    P: FnMut(f64) -> Result<bool>,
{
    let mut hi = start.max(1e-12);
    loop {
        if pred(hi)? {
            return Ok(hi);
        }
        hi *= 2.0;
        if hi > cap {
            return Err(Error::Bracket(format!(
                "no bracket below cap {cap:e} (reached {hi:e})"
            )));
        }
    }
}

/// Smallest `v` in `[lo, hi]` with `pred(v)` true, for a monotone predicate
/// (false then true). Plain bisection, robust to jumps; `hi` must satisfy
/// the predicate.
pub fn monotone_boundary<P>(mut lo: f64, mut hi: f64, mut pred: P) -> Result<f64>
where
    P: FnMut(f64) -> Result<bool>,
{
    for _ in 0..200 {
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Root of continuous `f` in `[lo, hi]` given `f(lo)` and `f(hi)` with
/// opposite signs. Illinois-damped false position with a bisection
/// safeguard; converges to `|f| <= ftol` or a relatively tiny bracket.
pub fn illinois_root<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    mut fhi: f64,
    ftol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Bracket(format!(
            "no sign change on [{lo}, {hi}] ({flo:e}, {fhi:e})"
        )));
    }
    let mut side = 0i8;
    for _ in 0..300 {
        let denom = fhi - flo;
        let mut mid = if denom != 0.0 {
            hi - fhi * (hi - lo) / denom
        } else {
            0.5 * (lo + hi)
        };
        if !(mid > lo && mid < hi) {
            mid = 0.5 * (lo + hi);
        }
        let fmid = f(mid)?;
        if fmid.abs() <= ftol {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            fhi = fmid;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::Bracket(format!(
        "root refinement stalled on [{lo}, {hi}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn illinois_finds_smooth_roots() {
        let f = |x: f64| Ok(x * x - 9.0);
        let r = illinois_root(f, 0.0, 10.0, -9.0, 91.0, 1e-12).unwrap();
        assert!((r - 3.0).abs() < 1e-10);
    }

    #[test]
    fn boundary_of_step_predicate() {
        // floor(v) >= 1 first holds at v = 1.
        let b = monotone_boundary(0.0, 4.0, |v| Ok(v.floor() >= 1.0)).unwrap();
        assert!((b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_doubles_until_hit() {
        let hi = bracket_upward(1.0, 1e9, |v| Ok(v * v >= 1000.0)).unwrap();
        assert!(hi * hi >= 1000.0 && (hi / 2.0) * (hi / 2.0) < 1000.0);
        assert!(bracket_upward(1.0, 8.0, |v| Ok(v > 100.0)).is_err());
    }
}
