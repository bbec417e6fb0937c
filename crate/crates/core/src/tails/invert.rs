//! Generalized inverses of monotone functions and the tabulated quantile.

use crate::error::{Error, Result};
use crate::func::RealFn;
use crate::roots::{bracket_upward, monotone_boundary};

/// Result of a generalized inverse: the located point plus a flag telling
/// whether the level sat below the function's value at 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenInv {
    pub value: f64,
    pub clamped_at_zero: bool,
}

/// `h⁻¹(t) = inf{v ≥ 0: h(v) ≥ t}` for non-decreasing `h` growing to ∞.
/// Exact (to rounding) for continuous strictly increasing `h`; at jumps it
/// returns the left edge of the first level set at or above `t`.
pub fn generalized_inverse(h: &RealFn, t: f64) -> Result<GenInv> {
    let h0 = h.eval(0.0)?;
    if h0 >= t {
        return Ok(GenInv {
            value: 0.0,
            clamped_at_zero: h0 > t,
        });
    }
    let hi = bracket_upward(1.0, 1e18, |v| Ok(h.eval(v)? >= t))?;
    let lo = if hi <= 1.0 { 0.0 } else { hi / 2.0 };
    let value = monotone_boundary(lo, hi, |v| Ok(h.eval(v)? >= t))?;
    Ok(GenInv {
        value,
        clamped_at_zero: false,
    })
}

/// `σ(v) = V⁻¹(1/v)`: the generalized inverse of a decreasing regularly
/// varying bound at level 1/v.
pub fn sigma(v_fun: &RealFn, v: f64) -> Result<f64> {
    if !(v >= 1.0) {
        return Err(Error::Domain(format!("sigma requires v >= 1, got {v}")));
    }
    let level = 1.0 / v;
    let start = 1.0;
    if v_fun.eval(start)? <= level {
        return Ok(start);
    }
    let hi = bracket_upward(2.0 * start, 1e18, |t| Ok(v_fun.eval(t)? <= level))?;
    monotone_boundary(hi / 2.0, hi, |t| Ok(v_fun.eval(t)? <= level))
}

/// Monotone-cubic quantile table for expression-backed tails: 4096
/// log-spaced levels from 1e-9 to 1, interpolated in (ln u, ln t) with
/// Fritsch–Carlson slopes, extended below the table by the power tail.
#[derive(Debug, Clone)]
pub struct MonotoneTable {
    /// Levels, ascending (u[0] = 1e-9 .. u[n-1] = 1).
    u: Vec<f64>,
    /// Quantiles at the levels (descending in u).
    t: Vec<f64>,
    log_u: Vec<f64>,
    log_t: Vec<f64>,
    /// Hermite slopes d(ln t)/d(ln u).
    slope: Vec<f64>,
    /// Tail extension index.
    alpha: f64,
}

pub(crate) const TABLE_NODES: usize = 4096;
const TABLE_UMIN: f64 = 1e-9;

impl MonotoneTable {
    pub fn build(fplus: &RealFn, x0: f64, alpha: f64) -> Result<Self> {
        let n = TABLE_NODES;
        let mut u = Vec::with_capacity(n);
        let mut t = Vec::with_capacity(n);
        let lw = TABLE_UMIN.ln();
        for j in 0..n {
            let w = lw * (1.0 - j as f64 / (n - 1) as f64);
            u.push(w.exp());
        }
        *u.last_mut().unwrap() = 1.0;
        for &level in &u {
            t.push(solve_level(fplus, x0, level)?);
        }
        let log_u: Vec<f64> = u.iter().map(|v| v.ln()).collect();
        let log_t: Vec<f64> = t
            .iter()
            .map(|&v| {
                if v > 0.0 {
                    Ok(v.ln())
                } else {
                    Err(Error::Spec(format!("quantile {v} is not positive")))
                }
            })
            .collect::<Result<_>>()?;
        let slope = fritsch_carlson_slopes(&log_u, &log_t);
        Ok(MonotoneTable {
            u,
            t,
            log_u,
            log_t,
            slope,
            alpha,
        })
    }

    /// `F₊⁻¹(u)`; node levels reproduce their quantiles exactly.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.u.len();
        if u >= 1.0 {
            return self.t[n - 1];
        }
        if u <= self.u[0] {
            if u == self.u[0] {
                return self.t[0];
            }
            // Power extension below the table.
            return self.t[0] * (u / self.u[0]).powf(1.0 / self.alpha);
        }
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.u[mid] <= u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if self.u[lo] == u {
            return self.t[lo];
        }
        if self.u[hi] == u {
            return self.t[hi];
        }
        let h = self.log_u[hi] - self.log_u[lo];
        let s = (u.ln() - self.log_u[lo]) / h;
        let (y0, y1) = (self.log_t[lo], self.log_t[hi]);
        let (d0, d1) = (self.slope[lo], self.slope[hi]);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * h * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * h * d1;
        value.exp()
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.u.iter().copied().zip(self.t.iter().copied())
    }
}

fn solve_level(fplus: &RealFn, x0: f64, level: f64) -> Result<f64> {
    if fplus.eval(x0)? <= level {
        return Ok(x0);
    }
    let hi = bracket_upward(2.0 * x0, 1e30, |t| Ok(fplus.eval(t)? <= level))?;
    monotone_boundary(hi / 2.0, hi, |t| Ok(fplus.eval(t)? <= level))
}

/// Shape-preserving slopes for monotone data (either direction): 4th-order
/// centered differences on the uniform log grid, limited to at most three
/// times the adjacent secants so the Hermite segments stay monotone.
fn fritsch_carlson_slopes(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut delta = Vec::with_capacity(n - 1);
    for i in 0..n - 1 {
        delta.push((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]));
    }
    let mut d = vec![0.0; n];
    for i in 0..n {
        d[i] = if i >= 2 && i + 2 < n {
            let h = xs[i + 1] - xs[i];
            (ys[i - 2] - 8.0 * ys[i - 1] + 8.0 * ys[i + 1] - ys[i + 2]) / (12.0 * h)
        } else if i + 4 < n && i < 2 {
            let h = xs[i + 1] - xs[i];
            (-25.0 * ys[i] + 48.0 * ys[i + 1] - 36.0 * ys[i + 2] + 16.0 * ys[i + 3]
                - 3.0 * ys[i + 4])
                / (12.0 * h)
        } else if i >= 4 {
            let h = xs[i] - xs[i - 1];
            (25.0 * ys[i] - 48.0 * ys[i - 1] + 36.0 * ys[i - 2] - 16.0 * ys[i - 3]
                + 3.0 * ys[i - 4])
                / (12.0 * h)
        } else if i == 0 {
            delta[0]
        } else {
            delta[i - 1]
        };
    }
    // Monotonicity limiter against the adjacent secants.
    for i in 0..n {
        let left = if i > 0 { delta[i - 1] } else { delta[i] };
        let right = if i < n - 1 { delta[i] } else { delta[i - 1] };
        if left * right <= 0.0 {
            d[i] = 0.0;
            continue;
        }
        let cap = 3.0 * left.abs().min(right.abs());
        if d[i].signum() != left.signum() {
            d[i] = 0.0;
        } else if d[i].abs() > cap {
            d[i] = cap * left.signum();
        }
    }
    d
}
