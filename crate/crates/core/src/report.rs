//! Deterministic report writers: results CSV, checker CSV, JSON summaries
//! and a small self-contained SVG line plotter.
//!
//! Floating-point statistics are written with `{:e}` (shortest exponential
//! form), which is deterministic across runs and platforms; wall-clock
//! fields never enter these files.

use serde_json::{json, Value};

use crate::funclass::{
    ClassK1Report, ClassKReport, ConditionAReport, ConvergenceDiagnostic, UpperPowerReport,
};
use crate::ldt::{EstimateRecord, PsiConsistency, ScanResult};

/// Shortest exponential rendering for stats columns.
pub fn fe(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// JSON value for an f64; non-finite values become strings so the document
/// stays valid JSON.
pub fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::String(format!("{v}"))
    }
}

pub const RESULTS_HEADER: &str =
    "n,x,estimator,p_hat,se,prediction,ratio,zone_xlnn,zone_ap5,reps,seed";

/// Per-estimator rows (`sum`, `max`, `bigjump`) for each cell.
pub fn results_csv(records: &[EstimateRecord]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in records {
        let mut push = |estimator: &str, p: f64, se: f64, ratio: f64| {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.x,
                estimator,
                fe(p),
                fe(se),
                fe(r.prediction),
                fe(ratio),
                fe(r.zone_scale),
                fe(r.zone_ap5),
                r.reps,
                r.seed
            ));
        };
        if r.p_sum.is_finite() {
            push("sum", r.p_sum, r.se_sum, r.ratio_sum);
            push("max", r.p_max, r.se_max, r.ratio_max);
        }
        if let Some(b) = r.big_jump {
            push("bigjump", b.value, b.se, b.ratio);
        }
    }
    out
}

/// Plot-data CSV: one (n, ratio) row per estimator series.
pub fn plot_data_csv(records: &[EstimateRecord]) -> String {
    let mut out = String::from("n,estimator,ratio\n");
    for r in records {
        if r.p_sum.is_finite() {
            out.push_str(&format!("{},sum,{}\n", r.n, fe(r.ratio_sum)));
            out.push_str(&format!("{},max,{}\n", r.n, fe(r.ratio_max)));
        }
        if let Some(b) = r.big_jump {
            out.push_str(&format!("{},bigjump,{}\n", r.n, fe(b.ratio)));
        }
    }
    out
}

pub const CHECK_HEADER: &str = "check,function,psi,v,x,value,verdict";

/// Membership-check rows: value is the measured ratio, verdict is per-row
/// (SKIP for excluded pairs, PASS/FAIL against the tolerance).
pub fn check_report_csv(d: &ConvergenceDiagnostic) -> String {
    let mut out = String::from(CHECK_HEADER);
    out.push('\n');
    for row in &d.rows {
        let verdict = if row.skipped {
            "SKIP"
        } else if row.deviation <= d.tol + 1e-12 {
            "PASS"
        } else {
            "FAIL"
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            d.check,
            csv_quote(&d.function),
            csv_quote(&d.psi),
            row.v,
            row.x,
            fe(row.ratio),
            verdict
        ));
    }
    out
}

/// Upper-power rows reuse the check columns with v := p and value := ĉ(p).
pub fn upper_power_csv(r: &UpperPowerReport) -> String {
    let mut out = String::from(CHECK_HEADER);
    out.push('\n');
    for &(p, c) in &r.c_hat {
        let verdict = if c >= r.margin - 1e-12 { "PASS" } else { "FAIL" };
        out.push_str(&format!(
            "upper-power,{},,{},,{},{}\n",
            csv_quote(&r.function),
            p,
            fe(c),
            verdict
        ));
    }
    out
}

/// Lower-bound table rows reuse the check columns with value := â(v).
pub fn condition_a_csv(r: &ConditionAReport) -> String {
    let mut out = String::from(CHECK_HEADER);
    out.push('\n');
    for e in &r.entries {
        match e.a_hat {
            Some(a) => out.push_str(&format!(
                "condition-a,,{},{},,{},{}\n",
                csv_quote(&r.psi),
                e.v,
                fe(a),
                if e.pass { "PASS" } else { "FAIL" }
            )),
            None => out.push_str(&format!(
                "condition-a,,{},{},,,SKIP\n",
                csv_quote(&r.psi),
                e.v
            )),
        }
    }
    out
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn convergence_json(d: &ConvergenceDiagnostic) -> Value {
    json!({
        "check": d.check,
        "function": d.function,
        "psi": d.psi,
        "v_window": [d.v_window.0, d.v_window.1],
        "tol": d.tol,
        "tail_deviation": jnum(d.tail_deviation),
        "trend_nonincreasing": d.trend_nonincreasing,
        "verdict": d.verdict,
        "sup_deviation": d.sup_deviation.iter()
            .map(|(x, h)| json!([jnum(*x), jnum(*h)]))
            .collect::<Vec<_>>(),
    })
}

pub fn upper_power_json(r: &UpperPowerReport) -> Value {
    json!({
        "check": "upper-power",
        "function": r.function,
        "c_hat": r.c_hat.iter().map(|(p, c)| json!([jnum(*p), jnum(*c)])).collect::<Vec<_>>(),
        "min_c": jnum(r.min_c),
        "margin": r.margin,
        "lcf": r.lcf,
        "verdict": r.verdict,
    })
}

pub fn condition_a_json(r: &ConditionAReport) -> Value {
    json!({
        "check": "condition-a",
        "psi": r.psi,
        "entries": r.entries.iter().map(|e| json!({
            "v": e.v,
            "a_hat": e.a_hat.map(jnum),
            "upper_sup": e.upper_sup.map(jnum),
            "pass": e.pass,
        })).collect::<Vec<_>>(),
        "partial_integral": jnum(r.partial_integral),
        "covered_vmax": jnum(r.covered_vmax),
        "tail_slope": jnum(r.tail_slope),
        "full_coverage": r.full_coverage,
        "dual_ok": r.dual_ok,
        "psi_o_of_x": r.psi_o_of_x,
    })
}

pub fn class_k_json(r: &ClassKReport) -> Value {
    json!({
        "check": "class-K",
        "verdict": r.verdict,
        "heuristic": r.heuristic,
        "min_a": jnum(r.min_a),
        "reasons": r.reasons,
        "condition_a": condition_a_json(&r.report),
    })
}

pub fn class_k1_json(r: &ClassK1Report) -> Value {
    json!({
        "check": "class-K1",
        "verdict": r.verdict,
        "alpha_hat": jnum(r.alpha_hat),
        "theta_increasing": r.theta_increasing,
        "reasons": r.reasons,
        "alpha_series": r.alpha_series.iter().map(|(x, a)| json!([jnum(*x), jnum(*a)])).collect::<Vec<_>>(),
        "smooth_residuals": r.smooth_residuals.iter().map(|(x, e)| json!([jnum(*x), jnum(*e)])).collect::<Vec<_>>(),
    })
}

pub fn record_json(r: &EstimateRecord) -> Value {
    json!({
        "n": r.n,
        "x": jnum(r.x),
        "reps": r.reps,
        "seed": r.seed,
        "prediction": jnum(r.prediction),
        "p_sum": jnum(r.p_sum),
        "se_sum": jnum(r.se_sum),
        "ratio_sum": jnum(r.ratio_sum),
        "p_max": jnum(r.p_max),
        "se_max": jnum(r.se_max),
        "ratio_max": jnum(r.ratio_max),
        "big_jump": r.big_jump.map(|b| json!({
            "value": jnum(b.value), "se": jnum(b.se), "ratio": jnum(b.ratio),
        })),
        "zone_xlnn": jnum(r.zone_scale),
        "zone_ap5": jnum(r.zone_ap5),
    })
}

pub fn scan_json(s: &ScanResult, psi: Option<&PsiConsistency>) -> Value {
    json!({
        "records": s.records.iter().map(record_json).collect::<Vec<_>>(),
        "band": [s.band.0, s.band.1],
        "zone_scale_increasing": s.zone_scale_increasing,
        "zone_ap5_decreasing": s.zone_ap5_decreasing,
        "ratio_verdicts": {
            "sum": s.ratio_verdicts.sum,
            "max": s.ratio_verdicts.max,
            "bigjump": s.ratio_verdicts.big_jump,
        },
        "overall_pass": s.overall_pass(),
        "warnings": s.warnings,
        "psi_consistency": psi.map(|p| json!({
            "psi": p.psi,
            "psi_lcf": p.psi_lcf,
            "upper_power": p.upper_power,
        })),
    })
}

/// One named series for the line plotter.
pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 0.01 && v.abs() < 10_000.0 {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Minimal line plot: polylines over a framed axis box with five ticks per
/// axis and a dashed guide at y = 1 when it is in range.
pub fn line_plot_svg(title: &str, xlabel: &str, ylabel: &str, series: &[Series<'_>]) -> String {
    let (w, h) = (640.0, 420.0);
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 50.0);
    let (px0, px1) = (left, w - right);
    let (py0, py1) = (h - bottom, top);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in series {
        for &(x, y) in &s.points {
            if x.is_finite() && y.is_finite() {
                xs.push(x);
                ys.push(y);
            }
        }
    }
    let (xmin, xmax) = bounds(&xs);
    let (ymin, ymax) = bounds(&ys);
    let sx = move |x: f64| px0 + (x - xmin) / (xmax - xmin) * (px1 - px0);
    let sy = move |y: f64| py0 + (y - ymin) / (ymax - ymin) * (py1 - py0);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
        w / 2.0,
        xml_escape(title)
    ));
    svg.push_str(&format!(
        "<rect x=\"{px0}\" y=\"{py1}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
        px1 - px0,
        py0 - py1
    ));
    for k in 0..=4 {
        let fx = xmin + (xmax - xmin) * k as f64 / 4.0;
        let fy = ymin + (ymax - ymin) * k as f64 / 4.0;
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{py0}\" x2=\"{0}\" y2=\"{1}\" stroke=\"#333\"/>\n",
            sx(fx),
            py0 + 4.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            sx(fx),
            py0 + 18.0,
            tick_label(fx)
        ));
        svg.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"#333\"/>\n",
            px0 - 4.0,
            sy(fy),
            px0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            px0 - 8.0,
            sy(fy) + 4.0,
            tick_label(fy)
        ));
    }
    if ymin < 1.0 && 1.0 < ymax {
        svg.push_str(&format!(
            "<line x1=\"{px0}\" y1=\"{0}\" x2=\"{px1}\" y2=\"{0}\" stroke=\"#999\" \
             stroke-dasharray=\"6 4\"/>\n",
            sy(1.0)
        ));
    }
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if pts.is_empty() {
            continue;
        }
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>\n",
            px1 - 120.0,
            py1 + 16.0 + 16.0 * i as f64,
            xml_escape(s.label)
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        (px0 + px1) / 2.0,
        h - 12.0,
        xml_escape(xlabel)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (py0 + py1) / 2.0,
        (py0 + py1) / 2.0,
        xml_escape(ylabel)
    ));
    svg.push_str("</svg>\n");
    svg
}

fn bounds(vals: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = (hi - lo) * 0.05;
    (lo - pad, hi + pad)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
