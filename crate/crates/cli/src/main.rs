//! Command-line front end: parse expressions and configs, dispatch the
//! checks and experiments, write CSV/JSON reports and SVG plots.
//!
//! Exit codes: 0 on PASS/success, 1 when a check fails, 2 on usage or
//! configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use psilc_core::config::ExperimentConfig;
use psilc_core::funclass::{
    self, build_lcf, build_psi_lcf, build_svf, check_class_k, check_class_k1, check_psi_lcf_with,
    check_upper_power, gamma, gamma_inverse, theta, theta_inverse, ClassKConfig, PsiSpec,
    RepresentationSpec, Verdict,
};
use psilc_core::ldt::{psi_consistency_report, ratio_scan};
use psilc_core::report::{self, Series};
use psilc_core::{Grid, RealFn};

#[derive(Parser)]
#[command(name = "psilc", version, about = "Locally constant function checks and heavy-tail simulation")]
struct Cli {
    /// Output directory (flag > PSILC_OUT_DIR > config > ./psilc-out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Cap the worker thread count.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// First grid point.
    #[arg(long, default_value_t = 1e3)]
    x_start: f64,
    /// Geometric ratio between grid points.
    #[arg(long, default_value_t = 2.0)]
    x_ratio: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 24)]
    points: usize,
}

impl GridArgs {
    fn build(&self) -> Grid {
        Grid::geometric(self.x_start, self.x_ratio, self.points)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that g is locally constant at scale psi.
    CheckPsiLcf {
        /// Function g as an expression in x.
        #[arg(long)]
        g: String,
        /// Scale function psi as an expression in x.
        #[arg(long)]
        psi: String,
        /// Comma-separated shifts v.
        #[arg(long, default_value = "-2,-1,-0.5,0.5,1,2")]
        v: String,
        #[arg(long, default_value_t = funclass::DEFAULT_TOL)]
        tol: f64,
        /// Domain constant: pairs with x + v psi(x) < c x are excluded.
        #[arg(long, default_value_t = funclass::DEFAULT_DEF1_C)]
        c: f64,
        #[arg(long, default_value_t = 0.0)]
        psi_x0: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Admissibility classes of a scale function psi.
    CheckClass {
        #[arg(long)]
        psi: String,
        #[arg(long, default_value_t = 0.0)]
        psi_x0: f64,
        /// Also require the regularly-varying class (index < 1).
        #[arg(long)]
        k1: bool,
    },
    /// Evaluate the clock gamma(x) = integral of 1/psi from 1 to x, or its
    /// inverse with --t.
    Gamma {
        #[arg(long)]
        psi: String,
        #[arg(long, default_value_t = 0.0)]
        psi_x0: f64,
        #[arg(long, conflicts_with = "t")]
        x: Option<f64>,
        /// Invert: find y with gamma(y) = t.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Evaluate theta(x) = x/psi(x), or its inverse with --t.
    Theta {
        #[arg(long)]
        psi: String,
        #[arg(long, default_value_t = 0.0)]
        psi_x0: f64,
        #[arg(long, conflicts_with = "t")]
        x: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Build a function from a representation pair and print values.
    Build {
        /// Construction: svf | lcf | psi-lcf.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long)]
        eps: String,
        /// Limit of eps (0 for the locally constant constructions, the
        /// index in regularly-varying mode).
        #[arg(long, default_value_t = 0.0)]
        eps_limit: f64,
        #[arg(long, default_value_t = 1.0)]
        c_limit: f64,
        /// Scale function, required for kind = psi-lcf.
        #[arg(long)]
        psi: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        psi_x0: f64,
        /// Comma-separated evaluation points.
        #[arg(long, default_value = "10,100,1000,1000000")]
        at: String,
        /// Also run the membership self-check on the built function.
        #[arg(long)]
        check: bool,
    },
    /// Upper-power check of g.
    UpperPower {
        #[arg(long)]
        g: String,
        /// Smallest compression factor p to test.
        #[arg(long, default_value_t = 0.1)]
        p1: f64,
        #[arg(long, default_value_t = 1e-6)]
        margin: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Run the estimators for an experiment config (no trend verdicts).
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<u64>,
    },
    /// Run the full scan: estimates, zone flags, hypothesis checks and the
    /// trend-toward-1 verdict (exit 1 when it fails).
    RatioScan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        reps: Option<u64>,
    },
    /// Rebuild plot data and the SVG from a results.csv in a run directory.
    Report {
        #[arg(long)]
        dir: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        psilc_core::exec::configure_threads(jobs);
    }
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn out_dir(cli: &Cli, from_config: Option<&str>) -> PathBuf {
    if let Some(dir) = &cli.out_dir {
        return dir.clone();
    }
    if let Ok(dir) = std::env::var("PSILC_OUT_DIR") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    if let Some(dir) = from_config {
        return PathBuf::from(dir);
    }
    PathBuf::from("psilc-out")
}

fn write(path: &Path, contents: &str) -> psilc_core::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, contents)?;
    Ok(())
}

fn manifest(dir: &Path, command: &str, config: Value, verdicts: Value) -> psilc_core::Result<()> {
    let doc = json!({
        "tool": {"name": "psilc", "version": psilc_core::VERSION},
        "command": command,
        "config": config,
        "verdicts": verdicts,
    });
    write(&dir.join("manifest.json"), &serde_json::to_string_pretty(&doc)?)
}

fn exit_for(verdict: Verdict) -> ExitCode {
    if verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn parse_list(text: &str) -> psilc_core::Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| psilc_core::Error::Spec(format!("not a number: `{s}`")))
        })
        .collect()
}

fn run(cli: &Cli) -> psilc_core::Result<ExitCode> {
    match &cli.cmd {
        Cmd::CheckPsiLcf {
            g,
            psi,
            v,
            tol,
            c,
            psi_x0,
            grid,
        } => {
            let gf = RealFn::parse(g)?;
            let ps = PsiSpec::parse(psi, *psi_x0)?;
            let vlist = parse_list(v)?;
            let diag = check_psi_lcf_with(&gf, &ps, &vlist, &grid.build(), *tol, *c)?;
            let dir = out_dir(cli, None);
            write(&dir.join("report.csv"), &report::check_report_csv(&diag))?;
            write(
                &dir.join("summary.json"),
                &serde_json::to_string_pretty(&report::convergence_json(&diag))?,
            )?;
            manifest(
                &dir,
                "check-psi-lcf",
                json!({"g": g, "psi": psi, "v": vlist, "tol": tol, "c": c,
                       "grid": [grid.x_start, grid.x_ratio, grid.points]}),
                json!({"psi_lcf": diag.verdict}),
            )?;
            println!(
                "{}: {} (tail deviation {:e}, tol {:e})",
                diag.check, diag.verdict, diag.tail_deviation, tol
            );
            Ok(exit_for(diag.verdict))
        }
        Cmd::CheckClass { psi, psi_x0, k1 } => {
            let ps = PsiSpec::parse(psi, *psi_x0)?;
            let k = check_class_k(&ps, &ClassKConfig::default())?;
            let dir = out_dir(cli, None);
            write(&dir.join("report.csv"), &report::condition_a_csv(&k.report))?;
            let mut verdicts = json!({"class_k": report::class_k_json(&k)});
            println!("class-K: {} (heuristic; min a = {:.4})", k.verdict, k.min_a);
            let mut overall = k.verdict;
            if *k1 {
                let r1 = check_class_k1(&ps);
                println!("class-K1: {} (alpha_hat = {:.4})", r1.verdict, r1.alpha_hat);
                if !r1.verdict.passed() {
                    overall = Verdict::Fail;
                }
                verdicts["class_k1"] = report::class_k1_json(&r1);
            }
            write(
                &dir.join("summary.json"),
                &serde_json::to_string_pretty(&verdicts)?,
            )?;
            manifest(
                &dir,
                "check-class",
                json!({"psi": psi, "psi_x0": psi_x0, "k1": k1}),
                verdicts,
            )?;
            Ok(exit_for(overall))
        }
        Cmd::Gamma { psi, psi_x0, x, t } => {
            let ps = PsiSpec::parse(psi, *psi_x0)?;
            match (x, t) {
                (Some(x), None) => {
                    println!("{}", gamma(&ps, *x)?);
                    Ok(ExitCode::SUCCESS)
                }
                (None, Some(t)) => {
                    println!("{}", gamma_inverse(&ps, *t)?);
                    Ok(ExitCode::SUCCESS)
                }
                _ => Err(psilc_core::Error::Spec(
                    "pass exactly one of --x (forward) or --t (inverse)".into(),
                )),
            }
        }
        Cmd::Theta { psi, psi_x0, x, t } => {
            let ps = PsiSpec::parse(psi, *psi_x0)?;
            match (x, t) {
                (Some(x), None) => {
                    println!("{}", theta(&ps, *x)?);
                    Ok(ExitCode::SUCCESS)
                }
                (None, Some(t)) => {
                    println!("{}", theta_inverse(&ps, *t)?);
                    Ok(ExitCode::SUCCESS)
                }
                _ => Err(psilc_core::Error::Spec(
                    "pass exactly one of --x (forward) or --t (inverse)".into(),
                )),
            }
        }
        Cmd::Build {
            kind,
            c,
            eps,
            eps_limit,
            c_limit,
            psi,
            psi_x0,
            at,
            check,
        } => {
            let rep = RepresentationSpec::new(
                RealFn::parse(c)?,
                RealFn::parse(eps)?,
                *c_limit,
                *eps_limit,
            )?;
            let (g, ps) = match kind.as_str() {
                "svf" => (build_svf(&rep)?, None),
                "lcf" => (build_lcf(&rep)?, None),
                "psi-lcf" => {
                    let psi = psi.as_deref().ok_or_else(|| {
                        psilc_core::Error::Spec("kind psi-lcf needs --psi".into())
                    })?;
                    let ps = PsiSpec::parse(psi, *psi_x0)?;
                    (build_psi_lcf(&rep, &ps)?, Some(ps))
                }
                other => {
                    return Err(psilc_core::Error::Spec(format!(
                        "unknown kind `{other}` (expected svf, lcf or psi-lcf)"
                    )))
                }
            };
            for x in parse_list(at)? {
                println!("{x},{:e}", g.eval(x)?);
            }
            if *check {
                let scale = match &ps {
                    Some(p) => p.clone(),
                    None => {
                        if kind == "svf" {
                            PsiSpec::parse("x", 1.0)?
                        } else {
                            PsiSpec::unit()
                        }
                    }
                };
                let diag = funclass::check_psi_lcf(
                    &g,
                    &scale,
                    &funclass::default_vlist(),
                    &Grid::default_membership(),
                    funclass::DEFAULT_TOL,
                )?;
                println!("self-check: {}", diag.verdict);
                return Ok(exit_for(diag.verdict));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::UpperPower { g, p1, margin, grid } => {
            let gf = RealFn::parse(g)?;
            let steps = (1..10).map(|k| k as f64 / 10.0);
            let pgrid: Vec<f64> = steps.filter(|p| *p >= *p1 - 1e-12).collect();
            let rep = check_upper_power(&gf, &pgrid, &grid.build(), *margin)?;
            let dir = out_dir(cli, None);
            write(&dir.join("report.csv"), &report::upper_power_csv(&rep))?;
            write(
                &dir.join("summary.json"),
                &serde_json::to_string_pretty(&report::upper_power_json(&rep))?,
            )?;
            manifest(
                &dir,
                "upper-power",
                json!({"g": g, "p1": p1, "margin": margin}),
                json!({"upper_power": rep.verdict, "lcf": rep.lcf}),
            )?;
            println!("upper-power: {} (min c = {:e})", rep.verdict, rep.min_c);
            Ok(exit_for(rep.verdict))
        }
        Cmd::Simulate { config, seed, reps } => {
            let (cfg, exp) = load_experiment(config, *seed, *reps)?;
            let scan = ratio_scan(&exp)?;
            for w in &scan.warnings {
                eprintln!("warning: {w}");
            }
            let dir = out_dir(cli, cfg.out_dir.as_deref());
            write(&dir.join("results.csv"), &report::results_csv(&scan.records))?;
            manifest(
                &dir,
                "simulate",
                serde_json::to_value(&cfg)?,
                report::scan_json(&scan, None),
            )?;
            println!("simulate: wrote {} cells to {}", scan.records.len(), dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Cmd::RatioScan { config, seed, reps } => {
            let (cfg, exp) = load_experiment(config, *seed, *reps)?;
            let scan = ratio_scan(&exp)?;
            for w in &scan.warnings {
                eprintln!("warning: {w}");
            }
            let psi = match psi_consistency_report(&exp) {
                Ok(p) => Some(p),
                Err(e) => {
                    eprintln!("note: hypothesis checks unavailable: {e}");
                    None
                }
            };
            let dir = out_dir(cli, cfg.out_dir.as_deref());
            write(&dir.join("results.csv"), &report::results_csv(&scan.records))?;
            let plot = report::plot_data_csv(&scan.records);
            write(&dir.join("plot_data.csv"), &plot)?;
            write(&dir.join("ratio.svg"), &ratio_svg(&scan.records))?;
            manifest(
                &dir,
                "ratio-scan",
                serde_json::to_value(&cfg)?,
                report::scan_json(&scan, psi.as_ref()),
            )?;
            let pass = scan.overall_pass();
            println!(
                "ratio-scan: {} (sum {}, max {}, bigjump {})",
                if pass { "PASS" } else { "FAIL" },
                scan.ratio_verdicts.sum,
                scan.ratio_verdicts.max,
                scan.ratio_verdicts
                    .big_jump
                    .map_or("-".to_string(), |v| v.to_string()),
            );
            if let Some(p) = &psi {
                println!(
                    "hypotheses: psi = {} | psi-lcf {} | upper-power {}",
                    p.psi, p.psi_lcf, p.upper_power
                );
            }
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Report { dir } => {
            let text = fs::read_to_string(dir.join("results.csv"))?;
            let records = parse_results_csv(&text)?;
            write(&dir.join("plot_data.csv"), &plot_rows_csv(&records))?;
            write(&dir.join("ratio.svg"), &plot_rows_svg(&records))?;
            println!("report: wrote plot_data.csv and ratio.svg to {}", dir.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_experiment(
    path: &Path,
    seed: Option<u64>,
    reps: Option<u64>,
) -> psilc_core::Result<(ExperimentConfig, psilc_core::ldt::Experiment)> {
    let text = fs::read_to_string(path)?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&text)?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    if let Some(reps) = reps {
        cfg.reps = reps;
    }
    let exp = cfg.build()?;
    exp.validate()?;
    Ok((cfg, exp))
}

fn ratio_svg(records: &[psilc_core::ldt::EstimateRecord]) -> String {
    let mut series = Vec::new();
    let sums: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.ratio_sum.is_finite())
        .map(|r| (r.n as f64, r.ratio_sum))
        .collect();
    if !sums.is_empty() {
        series.push(Series { label: "sum", points: sums });
        series.push(Series {
            label: "max",
            points: records
                .iter()
                .filter(|r| r.ratio_max.is_finite())
                .map(|r| (r.n as f64, r.ratio_max))
                .collect(),
        });
    }
    let big: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.big_jump.map(|b| (r.n as f64, b.ratio)))
        .collect();
    if !big.is_empty() {
        series.push(Series { label: "bigjump", points: big });
    }
    report::line_plot_svg("estimate / prediction", "n", "ratio", &series)
}

/// (n, estimator, ratio) rows parsed back from a results.csv.
fn parse_results_csv(text: &str) -> psilc_core::Result<Vec<(f64, String, f64)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 11 {
            return Err(psilc_core::Error::Spec(format!(
                "results.csv line {} has {} columns, expected 11",
                i + 1,
                cols.len()
            )));
        }
        let n: f64 = cols[0]
            .parse()
            .map_err(|_| psilc_core::Error::Spec(format!("bad n at line {}", i + 1)))?;
        let ratio: f64 = cols[6].parse().unwrap_or(f64::NAN);
        out.push((n, cols[2].to_string(), ratio));
    }
    Ok(out)
}

fn plot_rows_csv(rows: &[(f64, String, f64)]) -> String {
    let mut out = String::from("n,estimator,ratio\n");
    for (n, est, ratio) in rows {
        out.push_str(&format!("{n},{est},{}\n", report::fe(*ratio)));
    }
    out
}

fn plot_rows_svg(rows: &[(f64, String, f64)]) -> String {
    let mut series: Vec<Series> = Vec::new();
    for est in ["sum", "max", "bigjump"] {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|(_, e, r)| e == est && r.is_finite())
            .map(|(n, _, r)| (*n, *r))
            .collect();
        if !pts.is_empty() {
            series.push(Series { label: est, points: pts });
        }
    }
    report::line_plot_svg("estimate / prediction", "n", "ratio", &series)
}
