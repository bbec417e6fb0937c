//! Shared callable type for positive real functions of one variable.
//!
//! A [`RealFn`] bundles an evaluator with an optional exact log-scale
//! evaluator. Membership checks work on `ln g` throughout, so functions
//! whose values overflow or underflow the double range (`exp(-x)` on a
//! geometric grid, say) still produce exact ratio diagnostics whenever a
//! log form is available.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::expr::{self, Expr};

type DynFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

#[derive(Clone)]
pub struct RealFn {
    name: String,
    f: DynFn,
    ln_f: Option<DynFn>,
}

impl RealFn {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        RealFn {
            name: name.into(),
            f: Arc::new(f),
            ln_f: None,
        }
    }

    /// Like [`RealFn::new`] but with an exact `ln g(x)` companion.
    pub fn with_log(
        name: impl Into<String>,
        f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
        ln_f: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        RealFn {
            name: name.into(),
            f: Arc::new(f),
            ln_f: Some(Arc::new(ln_f)),
        }
    }

    pub fn from_expr(ast: Expr) -> Self {
        let name = ast.to_string();
        let ast2 = ast.clone();
        RealFn {
            name,
            f: Arc::new(move |x| Ok(expr::eval(&ast, x)?)),
            ln_f: Some(Arc::new(move |x| Ok(expr::eval_log(&ast2, x)?))),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::from_expr(expr::parse(text)?))
    }

    pub fn constant(c: f64) -> Self {
        let name = format!("{c:?}");
        RealFn {
            name,
            f: Arc::new(move |_| Ok(c)),
            ln_f: if c > 0.0 {
                let l = c.ln();
                Some(Arc::new(move |_| Ok(l)))
            } else {
                None
            },
        }
    }

    /// The constant function 1; doubles as the trivial scale function.
    pub fn one() -> Self {
        Self::constant(1.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        (self.f)(x)
    }

    /// `ln g(x)`, preferring the exact log form when present.
    pub fn log_eval(&self, x: f64) -> Result<f64> {
        if let Some(ln_f) = &self.ln_f {
            return ln_f(x);
        }
        let v = (self.f)(x)?;
        if v > 0.0 {
            Ok(v.ln())
        } else {
            Err(crate::Error::Domain(format!(
                "`{}` is non-positive ({v}) at x = {x}",
                self.name
            )))
        }
    }

    pub fn has_log_form(&self) -> bool {
        self.ln_f.is_some()
    }
}

impl fmt::Debug for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealFn({})", self.name)
    }
}

impl fmt::Display for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
