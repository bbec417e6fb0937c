//! Karamata-style constructors.
//!
//! A representation pair (c, ε) with c(t) → c ∈ (0, ∞) and ε(t) → limit
//! builds
//!
//! ```text
//!   g(x) = c(x) · exp{ ∫ ε(t)/t dt }   over t ∈ [1, e^Γ(x)]
//! ```
//!
//! with the clock Γ(x) equal to ln x (slow variation), x (local constancy)
//! or γ(x) (scale-ψ local constancy). The inner integral is always computed
//! after the substitution t = e^u as ∫₀^Γ ε(e^u) du — the upper limit e^Γ
//! overflows doubles for quite ordinary inputs, the substituted form never
//! does. Past u where e^u itself is unrepresentable, ε is extended by its
//! declared limit; the built function keeps its membership exactly, since
//! any measurable extension tending to the same limit is a valid ε.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::func::RealFn;
use crate::quad::{adaptive_simpson, PANEL_TOL};

use super::condition_a::{check_class_k, ClassKConfig};
use super::gamma::{gamma, PsiSpec};
use super::Verdict;

/// Largest u with e^u representable as an f64.
const LOG_ARG_CAP: f64 = 709.0;

#[derive(Debug, Clone)]
pub struct RepresentationSpec {
    pub cfun: RealFn,
    pub epsfun: RealFn,
    /// Declared limit of c(t), finite and positive.
    pub c_limit: f64,
    /// Declared limit of ε(t): 0 for the locally constant constructions,
    /// the index α in regularly-varying mode.
    pub eps_limit: f64,
}

impl RepresentationSpec {
    /// Validate the pair on a diagnostic grid t ∈ {1, 10, …, 1e12}:
    /// c must be positive and finite everywhere and both functions must be
    /// approaching their declared limits (deviation shrinking along the
    /// grid and within a loose cap at the far end).
    pub fn new(cfun: RealFn, epsfun: RealFn, c_limit: f64, eps_limit: f64) -> Result<Self> {
        if !(c_limit > 0.0 && c_limit.is_finite()) {
            return Err(Error::Spec(format!(
                "c limit must be finite and positive, got {c_limit}"
            )));
        }
        if !eps_limit.is_finite() {
            return Err(Error::Spec(format!("eps limit must be finite, got {eps_limit}")));
        }
        let grid: Vec<f64> = (0..=12).map(|k| 10f64.powi(k)).collect();
        let mut c_dev = Vec::new();
        let mut e_dev = Vec::new();
        for &t in &grid {
            let c = cfun.eval(t)?;
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::Spec(format!(
                    "c function `{}` must be positive and finite; got {c} at t = {t}",
                    cfun.name()
                )));
            }
            c_dev.push((c - c_limit).abs());
            let e = epsfun.eval(t)?;
            if !e.is_finite() {
                return Err(Error::Spec(format!(
                    "eps function `{}` is not finite at t = {t}",
                    epsfun.name()
                )));
            }
            e_dev.push((e - eps_limit).abs());
        }
        let c_last = *c_dev.last().unwrap();
        let e_last = *e_dev.last().unwrap();
        if c_last > 0.25 * c_limit.abs().max(1.0) || c_last > c_dev[0] + 1e-12 {
            return Err(Error::Spec(format!(
                "c function `{}` does not approach its declared limit {c_limit} \
                 (deviation {c_last:.3e} at t = 1e12)",
                cfun.name()
            )));
        }
        if e_last > 0.25 || e_last > e_dev[0] + 1e-12 {
            return Err(Error::Spec(format!(
                "eps function `{}` does not approach its declared limit {eps_limit} \
                 (deviation {e_last:.3e} at t = 1e12)",
                epsfun.name()
            )));
        }
        Ok(RepresentationSpec {
            cfun,
            epsfun,
            c_limit,
            eps_limit,
        })
    }

    /// Pair for slowly-varying or locally-constant constructions (ε → 0).
    pub fn vanishing(cfun: RealFn, epsfun: RealFn, c_limit: f64) -> Result<Self> {
        Self::new(cfun, epsfun, c_limit, 0.0)
    }

    /// Regularly-varying mode: ε → α.
    pub fn with_index(cfun: RealFn, epsfun: RealFn, c_limit: f64, alpha: f64) -> Result<Self> {
        Self::new(cfun, epsfun, c_limit, alpha)
    }

    fn eps_at_log(&self, u: f64) -> Result<f64> {
        if u <= LOG_ARG_CAP {
            self.epsfun.eval(u.exp())
        } else {
            Ok(self.eps_limit)
        }
    }

    /// ∫₀^upper ε(e^u) du with the limit extension past the cap.
    pub fn log_integral(&self, upper: f64) -> Result<f64> {
        if upper <= LOG_ARG_CAP {
            adaptive_simpson(|u| self.eps_at_log(u), 0.0, upper, PANEL_TOL)
        } else {
            let head = adaptive_simpson(|u| self.eps_at_log(u), 0.0, LOG_ARG_CAP, PANEL_TOL)?;
            Ok(head + self.eps_limit * (upper - LOG_ARG_CAP))
        }
    }
}

fn built(name: String, rep: RepresentationSpec, clock: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> RealFn {
    let rep = Arc::new(rep);
    let clock = Arc::new(clock);
    let rep2 = Arc::clone(&rep);
    let clock2 = Arc::clone(&clock);
    let log_g = move |x: f64| -> Result<f64> {
        if x < 1.0 {
            return Err(Error::Domain(format!(
                "constructed functions are defined for x >= 1, got {x}"
            )));
        }
        let c = rep.cfun.eval(x)?;
        if !(c > 0.0) {
            return Err(Error::Domain(format!("c(x) = {c} must stay positive (x = {x})")));
        }
        Ok(c.ln() + rep.log_integral(clock(x)?)?)
    };
    let log_g2 = move |x: f64| -> Result<f64> {
        if x < 1.0 {
            return Err(Error::Domain(format!(
                "constructed functions are defined for x >= 1, got {x}"
            )));
        }
        let c = rep2.cfun.eval(x)?;
        if !(c > 0.0) {
            return Err(Error::Domain(format!("c(x) = {c} must stay positive (x = {x})")));
        }
        Ok(c.ln() + rep2.log_integral(clock2(x)?)?)
    };
    RealFn::with_log(name, move |x| log_g(x).map(f64::exp), log_g2)
}

/// Slowly varying (ε → 0) or regularly varying (ε → α) construction:
/// Γ(x) = ln x.
pub fn build_svf(rep: &RepresentationSpec) -> Result<RealFn> {
    let name = format!("svf[c = {}, eps = {}]", rep.cfun.name(), rep.epsfun.name());
    Ok(built(name, rep.clone(), |x| Ok(x.ln())))
}

/// Locally constant construction: Γ(x) = x.
pub fn build_lcf(rep: &RepresentationSpec) -> Result<RealFn> {
    let name = format!("lcf[c = {}, eps = {}]", rep.cfun.name(), rep.epsfun.name());
    Ok(built(name, rep.clone(), Ok))
}

/// Scale-ψ locally constant construction: Γ(x) = γ(x). Requires ψ to pass
/// the class-K admissibility check.
pub fn build_psi_lcf(rep: &RepresentationSpec, psi: &PsiSpec) -> Result<RealFn> {
    let k = check_class_k(psi, &ClassKConfig::default())?;
    if k.verdict != Verdict::Pass {
        return Err(Error::Spec(format!(
            "psi `{}` fails the class-K admissibility check: {}",
            psi.name(),
            k.reasons.join("; ")
        )));
    }
    let name = format!(
        "psi-lcf[c = {}, eps = {}, psi = {}]",
        rep.cfun.name(),
        rep.epsfun.name(),
        psi.name()
    );
    let psi = Arc::new(psi.clone());
    Ok(built(name, rep.clone(), move |x| gamma(&psi, x)))
}
