//! Numerical toolkit for asymptotically locally constant functions and
//! heavy-tailed random walks.
//!
//! The crate has four layers:
//!
//! - [`expr`]: a small arithmetic expression language in one variable, the
//!   way every function (tails, scale functions, representation pairs)
//!   enters from configs and the command line;
//! - [`funclass`]: the γ/θ clock machinery, Karamata-style constructors and
//!   membership checkers for slow variation, local constancy and scale-ψ
//!   local constancy, plus the admissibility classes of ψ;
//! - [`tails`]: heavy-tailed distribution models with centered
//!   inverse-transform sampling, generalized inverses, σ/h machinery and
//!   zone diagnostics;
//! - [`ldt`]: Monte Carlo estimation of P(Sₙ ≥ x) and P(S̄ₙ ≥ x) against
//!   the one-jump prediction n·F₊(x), with the main-term cross-estimator.
//!
//! Estimation replications are sharded with disjoint RNG streams and merged
//! in shard order: results are bit-identical across thread counts and
//! across the rayon/sequential builds (feature `parallel`, on by default).

// `!(x > 0.0)`-style guards are deliberate: unlike `x <= 0.0` they also
// catch NaN inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod exec;
pub mod expr;
pub mod func;
pub mod funclass;
pub mod grid;
pub mod ldt;
pub mod quad;
pub mod report;
pub mod roots;
pub mod tails;

pub use error::{Error, Result};
pub use func::RealFn;
pub use grid::Grid;

/// Crate version, echoed into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
