//! Function-class machinery: scale functions, their admissibility classes,
//! Karamata-style constructors, and membership checkers.
//!
//! The central object is a scale function ψ wrapped in a [`PsiSpec`]. A
//! positive function g is *locally constant at scale ψ* when
//! `g(x + v·ψ(x)) / g(x) → 1` for every fixed v keeping `x + v·ψ(x) ≥ c·x`.
//! With ψ ≡ 1 this is ordinary asymptotic local constancy; with ψ(x) = x it
//! is slow variation; intermediate ψ interpolate between the two. The clock
//! `γ(x) = ∫₁ˣ dt/ψ(t)` (and its surrogate `θ(x) = x/ψ(x)`) turns scale-ψ
//! local constancy into plain local constancy by conjugation, which is what
//! the checkers and constructors here exploit.

mod condition_a;
mod checkers;
mod gamma;
mod represent;

pub use checkers::{
    check_lcf, check_psi_lcf, check_psi_lcf_with, check_upper_power, extract_epsilon,
    log_growth_ratio, log_growth_ratio_theta, uniform_deviation, CheckRow,
    ConvergenceDiagnostic, UpperPowerReport, DEFAULT_DEF1_C, DEFAULT_TOL,
};
pub use condition_a::{
    check_class_k, check_class_k1, estimate_condition_a, ClassK1Report, ClassKConfig,
    ClassKReport, CondAConfig, CondAEntry, ConditionAReport,
};
pub use gamma::{
    conjugate_gamma, conjugate_theta, gamma, gamma_inverse, solve_shift, theta, theta_inverse,
    PsiSpec,
};
pub use represent::{build_lcf, build_psi_lcf, build_svf, RepresentationSpec};

use serde::{Deserialize, Serialize};
use std::fmt;

/// Outcome of a membership or class check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Indeterminate,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Indeterminate => "INDETERMINATE",
        })
    }
}

/// Default list of shifts v used by membership checks.
pub fn default_vlist() -> Vec<f64> {
    vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]
}
