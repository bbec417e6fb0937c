//! Monte Carlo estimation of the deviation probabilities P(Sₙ ≥ x) and
//! P(S̄ₙ ≥ x) against the one-jump prediction n·F₊(x).
//!
//! Replications are partitioned into fixed-size shards with disjoint RNG
//! streams; tallies merge in shard order, so estimates are bit-identical
//! across thread counts. The crude estimator counts indicator hits on
//! simulated paths; the main-term estimator averages n·P(ξ ≥ x − Sₙ₋₁)
//! over a window |Sₙ₋₁| ≤ N√n, the dominant-jump approximation valid in
//! the finite-variance regime.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_shards, shard_counts};
use crate::funclass::{
    check_psi_lcf, check_upper_power, default_vlist, PsiSpec, Verdict, DEFAULT_TOL,
};
use crate::grid::Grid;
use crate::tails::{check_smallness, choose_psi, sigma, Regime, TailModel, ZoneSpec};

const TAG_CRUDE: u64 = 1;
const TAG_BIG_JUMP: u64 = 2;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn cell_seed(seed: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed ^ tag.wrapping_mul(0xD1B54A32D192ED03)) ^ index)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorKind {
    Crude,
    BigJump,
    Both,
}

impl EstimatorKind {
    fn wants_crude(self) -> bool {
        !matches!(self, EstimatorKind::BigJump)
    }

    fn wants_big_jump(self) -> bool {
        !matches!(self, EstimatorKind::Crude)
    }
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub model: TailModel,
    pub zone: ZoneSpec,
    pub n_list: Vec<u64>,
    /// Explicit x per cell; defaults to h(n).
    pub x_list: Option<Vec<f64>>,
    pub reps: u64,
    pub estimator: EstimatorKind,
    pub seed: u64,
    /// Window multiplier N in |Sₙ₋₁| ≤ N√n.
    pub big_jump_window: f64,
    /// Acceptance band for the terminal ratio.
    pub band: (f64, f64),
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        if self.reps < 10_000 {
            return Err(Error::Spec(format!(
                "at least 1e4 replications per cell are required, got {}",
                self.reps
            )));
        }
        if self.n_list.is_empty() {
            return Err(Error::Spec("the n list must not be empty".into()));
        }
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Spec("the n list must be strictly increasing".into()));
        }
        if let Some(&top) = self.n_list.last() {
            if top.saturating_mul(self.reps) > DRAW_BUDGET {
                return Err(Error::Spec(format!(
                    "cell budget exceeded: {top} x {} draws are over the cap {DRAW_BUDGET}",
                    self.reps
                )));
            }
        }
        if let Some(xs) = &self.x_list {
            if xs.len() != self.n_list.len() {
                return Err(Error::Spec("x list length must match the n list".into()));
            }
        }
        if !(self.big_jump_window > 0.0) {
            return Err(Error::Spec(format!(
                "the main-term window multiplier must be positive, got {}",
                self.big_jump_window
            )));
        }
        if !(self.band.0 < 1.0 && 1.0 < self.band.1) {
            return Err(Error::Spec(format!(
                "the acceptance band must straddle 1, got [{}, {}]",
                self.band.0, self.band.1
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BigJumpEstimate {
    pub value: f64,
    pub se: f64,
    pub ratio: f64,
}

/// One (n, x) cell of estimates. `zone_scale` holds the regime's zone
/// statistic (x(n ln n)^{-1/2} with finite variance, x/σ(n) without) and
/// `zone_ap5` the smallness ratio n·V²(x)/F₊(x).
#[derive(Debug, Clone, Serialize)]
pub struct EstimateRecord {
    pub n: u64,
    pub x: f64,
    pub reps: u64,
    pub seed: u64,
    pub prediction: f64,
    pub p_sum: f64,
    pub se_sum: f64,
    pub ratio_sum: f64,
    pub p_max: f64,
    pub se_max: f64,
    pub ratio_max: f64,
    pub big_jump: Option<BigJumpEstimate>,
    pub zone_scale: f64,
    pub zone_ap5: f64,
    pub wall_ms: f64,
}

fn binomial_se(p: f64, reps: u64) -> f64 {
    (p * (1.0 - p) / reps as f64).sqrt()
}

fn crude_tallies_impl(
    model: &TailModel,
    n: u64,
    x: f64,
    reps: u64,
    cell_seed: u64,
    parallel: bool,
) -> (u64, u64) {
    let dk = model.draw_kind();
    let shards = shard_counts(reps);
    let shard = |s: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(cell_seed);
        rng.set_stream(s as u64);
        let mut hit_sum = 0u64;
        let mut hit_max = 0u64;
        for _ in 0..shards[s] {
            let mut sum = 0.0f64;
            let mut running_max = f64::NEG_INFINITY;
            for _ in 0..n {
                sum += dk.draw(&mut rng);
                if sum > running_max {
                    running_max = sum;
                }
            }
            if sum >= x {
                hit_sum += 1;
            }
            if running_max >= x {
                hit_max += 1;
            }
        }
        (hit_sum, hit_max)
    };
    let tallies: Vec<(u64, u64)> = if parallel {
        map_shards(shards.len(), shard)
    } else {
        crate::exec::map_shards_seq(shards.len(), shard)
    };
    tallies
        .into_iter()
        .fold((0, 0), |acc, t| (acc.0 + t.0, acc.1 + t.1))
}

fn crude_tallies(model: &TailModel, n: u64, x: f64, reps: u64, cell_seed: u64) -> (u64, u64) {
    crude_tallies_impl(model, n, x, reps, cell_seed, true)
}

/// Sequential reference for the crude tallies; benchmarks compare it with
/// the sharded parallel path and tests assert bit equality.
pub fn crude_tallies_seq(model: &TailModel, n: u64, x: f64, reps: u64, seed: u64) -> (u64, u64) {
    crude_tallies_impl(model, n, x, reps, cell_seed(seed, TAG_CRUDE, 0), false)
}

/// Parallel-path tallies under the same seeding as [`crude_tallies_seq`].
pub fn crude_tallies_par(model: &TailModel, n: u64, x: f64, reps: u64, seed: u64) -> (u64, u64) {
    crude_tallies_impl(model, n, x, reps, cell_seed(seed, TAG_CRUDE, 0), true)
}

fn zone_scale_finite(n: u64, x: f64) -> f64 {
    if n >= 2 {
        x / (n as f64 * (n as f64).ln()).sqrt()
    } else {
        f64::NAN
    }
}

fn zone_ap5_stat(model: &TailModel, n: u64, x: f64) -> f64 {
    if model.has_v() && x > 1.0 {
        check_smallness(model, n, x).map(|r| r.ratio).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    }
}

/// Desk-scale guard: total draws per cell.
pub const DRAW_BUDGET: u64 = 1 << 40;

/// Indicator-mean estimates of P(Sₙ ≥ x) and P(S̄ₙ ≥ x) from the same
/// paths (S̄ₙ is the running maximum of partial sums, k = 1..n).
pub fn crude_mc(model: &TailModel, n: u64, x: f64, reps: u64, seed: u64) -> Result<EstimateRecord> {
    if n == 0 || reps == 0 {
        return Err(Error::Spec("crude_mc needs n >= 1 and reps >= 1".into()));
    }
    if n.saturating_mul(reps) > DRAW_BUDGET {
        return Err(Error::Spec(format!(
            "cell budget exceeded: {n} x {reps} draws are over the cap {DRAW_BUDGET}"
        )));
    }
    let start = Instant::now();
    let (hit_sum, hit_max) = crude_tallies(model, n, x, reps, cell_seed(seed, TAG_CRUDE, 0));
    let p_sum = hit_sum as f64 / reps as f64;
    let p_max = hit_max as f64 / reps as f64;
    let prediction = n as f64 * model.tail_prob(x);
    Ok(EstimateRecord {
        n,
        x,
        reps,
        seed,
        prediction,
        p_sum,
        se_sum: binomial_se(p_sum, reps),
        ratio_sum: p_sum / prediction,
        p_max,
        se_max: binomial_se(p_max, reps),
        ratio_max: p_max / prediction,
        big_jump: None,
        zone_scale: zone_scale_finite(n, x),
        zone_ap5: zone_ap5_stat(model, n, x),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

fn big_jump_kernel(
    model: &TailModel,
    n: u64,
    x: f64,
    reps: u64,
    window: f64,
    cell: u64,
) -> (f64, f64) {
    let dk = model.draw_kind();
    // The jump that must clear the remaining gap is a centered increment:
    // P(xi >= t) = F(t + m). Without the shift the estimator carries a
    // (1 + m/x)^|alpha| finite-size bias against the crude estimate.
    let m = model.mean();
    let bound = window * (n as f64).sqrt();
    let shards = shard_counts(reps);
    let sums: Vec<(f64, f64)> = map_shards(shards.len(), |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(cell);
        rng.set_stream(s as u64);
        let mut acc = 0.0f64;
        let mut acc2 = 0.0f64;
        for _ in 0..shards[s] {
            let mut sum = 0.0f64;
            for _ in 0..n - 1 {
                sum += dk.draw(&mut rng);
            }
            if sum.abs() <= bound {
                let y = model.tail_prob(x + m - sum);
                acc += y;
                acc2 += y * y;
            }
        }
        (acc, acc2)
    });
    let (total, total2) = sums
        .into_iter()
        .fold((0.0, 0.0), |acc, t| (acc.0 + t.0, acc.1 + t.1));
    let mean = total / reps as f64;
    let var = (total2 / reps as f64 - mean * mean).max(0.0);
    (n as f64 * mean, n as f64 * (var / reps as f64).sqrt())
}

/// Main-term estimate n·E[P(ξ ≥ x − Sₙ₋₁); |Sₙ₋₁| ≤ N√n] with its
/// standard error — the dominant-jump approximation, not an unbiased
/// estimator of the full probability. In model-tail notation the averaged
/// quantity is F₊(x + m − Sₙ₋₁).
pub fn big_jump_main_term(
    model: &TailModel,
    n: u64,
    x: f64,
    reps: u64,
    window: f64,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(window > 0.0) {
        return Err(Error::Spec(format!(
            "window multiplier must be positive, got {window}"
        )));
    }
    if n == 0 || reps == 0 {
        return Err(Error::Spec("big_jump_main_term needs n >= 1 and reps >= 1".into()));
    }
    Ok(big_jump_kernel(model, n, x, reps, window, cell_seed(seed, TAG_BIG_JUMP, 0)))
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioVerdicts {
    pub sum: Verdict,
    pub max: Verdict,
    pub big_jump: Option<Verdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanResult {
    pub records: Vec<EstimateRecord>,
    pub estimator: EstimatorKind,
    pub band: (f64, f64),
    /// Zone statistic strictly increasing along the scan.
    pub zone_scale_increasing: bool,
    /// Smallness ratio strictly decreasing along the scan.
    pub zone_ap5_decreasing: bool,
    pub ratio_verdicts: RatioVerdicts,
    /// Honesty notes, e.g. cells where the predicted probability is too
    /// small for the replication budget (crude MC wants reps >= 100/p).
    pub warnings: Vec<String>,
}

impl ScanResult {
    /// The empirical claim of the scan: every requested estimator's ratio
    /// trends toward 1 into the band.
    pub fn overall_pass(&self) -> bool {
        let crude_ok = !self.estimator.wants_crude()
            || (self.ratio_verdicts.sum.passed() && self.ratio_verdicts.max.passed());
        let big_jump_ok = !self.estimator.wants_big_jump()
            || self.ratio_verdicts.big_jump.is_some_and(Verdict::passed);
        crude_ok && big_jump_ok
    }
}

fn trend_toward_one(ratios: &[f64], ratio_ses: &[f64], band: (f64, f64)) -> Verdict {
    if ratios.iter().any(|r| !r.is_finite()) {
        return Verdict::Indeterminate;
    }
    let last = *ratios.last().unwrap();
    let in_band = band.0 <= last && last <= band.1;
    let monotone = (1..ratios.len()).all(|i| {
        let slack = 3.0 * (ratio_ses[i - 1].powi(2) + ratio_ses[i].powi(2)).sqrt();
        (ratios[i] - 1.0).abs() <= (ratios[i - 1] - 1.0).abs() + slack
    });
    if in_band && monotone {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

/// Run the experiment across its n list with x = h(n) (or the explicit x
/// list), collecting per-cell estimates, zone diagnostics and trend
/// verdicts.
pub fn ratio_scan(exp: &Experiment) -> Result<ScanResult> {
    exp.validate()?;
    let mut records = Vec::with_capacity(exp.n_list.len());
    let mut warnings = Vec::new();
    for (i, &n) in exp.n_list.iter().enumerate() {
        let x = match &exp.x_list {
            Some(xs) => xs[i],
            None => exp.zone.h.eval(n as f64)?,
        };
        let start = Instant::now();
        let prediction = n as f64 * model_tail(exp, x);
        if exp.estimator.wants_crude() && prediction < 100.0 / exp.reps as f64 {
            warnings.push(format!(
                "cell n={n}: predicted probability {prediction:e} is below 100/reps = {:e}; \
                 the crude estimate will be noise-dominated",
                100.0 / exp.reps as f64
            ));
        }
        let (p_sum, se_sum, p_max, se_max) = if exp.estimator.wants_crude() {
            let (hs, hm) = crude_tallies(&exp.model, n, x, exp.reps, cell_seed(exp.seed, TAG_CRUDE, i as u64));
            let ps = hs as f64 / exp.reps as f64;
            let pm = hm as f64 / exp.reps as f64;
            (ps, binomial_se(ps, exp.reps), pm, binomial_se(pm, exp.reps))
        } else {
            (f64::NAN, f64::NAN, f64::NAN, f64::NAN)
        };
        let big_jump = if exp.estimator.wants_big_jump() {
            let (value, se) = big_jump_cell(exp, n, x, i as u64)?;
            Some(BigJumpEstimate {
                value,
                se,
                ratio: value / prediction,
            })
        } else {
            None
        };
        let zone_scale = match exp.zone.regime {
            Regime::FiniteVariance => zone_scale_finite(n, x),
            Regime::InfiniteVariance => {
                let v = exp.model.v_fn()?;
                x / sigma(&v, n as f64)?
            }
        };
        records.push(EstimateRecord {
            n,
            x,
            reps: exp.reps,
            seed: exp.seed,
            prediction,
            p_sum,
            se_sum,
            ratio_sum: p_sum / prediction,
            p_max,
            se_max,
            ratio_max: p_max / prediction,
            big_jump,
            zone_scale,
            zone_ap5: zone_ap5_stat(&exp.model, n, x),
            wall_ms: start.elapsed().as_secs_f64() * 1e3,
        });
    }

    let zone_scale_increasing = records
        .windows(2)
        .all(|w| w[1].zone_scale > w[0].zone_scale);
    let zone_ap5_decreasing = records
        .windows(2)
        .all(|w| w[1].zone_ap5 < w[0].zone_ap5);

    let ratio_verdicts = if exp.estimator.wants_crude() {
        let sum_r: Vec<f64> = records.iter().map(|r| r.ratio_sum).collect();
        let sum_se: Vec<f64> = records.iter().map(|r| r.se_sum / r.prediction).collect();
        let max_r: Vec<f64> = records.iter().map(|r| r.ratio_max).collect();
        let max_se: Vec<f64> = records.iter().map(|r| r.se_max / r.prediction).collect();
        RatioVerdicts {
            sum: trend_toward_one(&sum_r, &sum_se, exp.band),
            max: trend_toward_one(&max_r, &max_se, exp.band),
            big_jump: big_jump_verdict(&records, exp.band),
        }
    } else {
        RatioVerdicts {
            sum: Verdict::Indeterminate,
            max: Verdict::Indeterminate,
            big_jump: big_jump_verdict(&records, exp.band),
        }
    };

    Ok(ScanResult {
        records,
        estimator: exp.estimator,
        band: exp.band,
        zone_scale_increasing,
        zone_ap5_decreasing,
        ratio_verdicts,
        warnings,
    })
}

fn model_tail(exp: &Experiment, x: f64) -> f64 {
    exp.model.tail_prob(x)
}

fn big_jump_cell(exp: &Experiment, n: u64, x: f64, index: u64) -> Result<(f64, f64)> {
    Ok(big_jump_kernel(
        &exp.model,
        n,
        x,
        exp.reps,
        exp.big_jump_window,
        cell_seed(exp.seed, TAG_BIG_JUMP, index),
    ))
}

fn big_jump_verdict(records: &[EstimateRecord], band: (f64, f64)) -> Option<Verdict> {
    let series: Option<Vec<(f64, f64)>> = records
        .iter()
        .map(|r| r.big_jump.map(|b| (b.ratio, b.se / r.prediction)))
        .collect();
    series.map(|s| {
        let ratios: Vec<f64> = s.iter().map(|p| p.0).collect();
        let ses: Vec<f64> = s.iter().map(|p| p.1).collect();
        trend_toward_one(&ratios, &ses, band)
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PsiConsistency {
    pub psi: String,
    pub psi_lcf: Verdict,
    pub upper_power: Verdict,
}

/// Check the structural hypotheses behind the scan: the model tail must be
/// locally constant at the zone's scale ψ and upper-power.
pub fn psi_consistency_report(exp: &Experiment) -> Result<PsiConsistency> {
    let psi = choose_psi(&exp.zone, &exp.model)?;
    psi_consistency_with(exp, &psi)
}

/// As [`psi_consistency_report`] with an explicit scale.
pub fn psi_consistency_with(exp: &Experiment, psi: &PsiSpec) -> Result<PsiConsistency> {
    let tail = exp.model.tail_fn();
    let grid = Grid::default_membership();
    let lcf = check_psi_lcf(&tail, psi, &default_vlist(), &grid, DEFAULT_TOL)?;
    let pgrid: Vec<f64> = (1..10).map(|k| k as f64 / 10.0).collect();
    let up = check_upper_power(&tail, &pgrid, &grid, 1e-6)?;
    Ok(PsiConsistency {
        psi: psi.name().to_string(),
        psi_lcf: lcf.verdict,
        upper_power: up.verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pareto3() -> TailModel {
        TailModel::pareto(-3.0).unwrap()
    }

    #[test]
    fn single_summand_reduces_to_the_tail() {
        // n = 1: P(S1 >= x) = P(xi >= x) = F(x + m); alpha = -3, m = 1.5,
        // x = 8.5 targets F(10) = 1e-3.
        let m = pareto3();
        let reps = 2_000_000;
        let rec = crude_mc(&m, 1, 8.5, reps, 11).unwrap();
        let p = 1e-3;
        let se = binomial_se(p, reps);
        assert!(
            (rec.p_sum - p).abs() <= 4.0 * se,
            "p_sum = {} vs {p} (4se = {})",
            rec.p_sum,
            4.0 * se
        );
        assert_eq!(rec.p_sum, rec.p_max, "n = 1 makes the max the sum");
    }

    #[test]
    fn over_budget_cells_are_rejected() {
        let m = pareto3();
        assert!(crude_mc(&m, u64::MAX / 2, 1.0, 4, 1).is_err());
    }

    #[test]
    fn certain_event_has_probability_one() {
        let rec = crude_mc(&pareto3(), 4, -1e9, 10_000, 1).unwrap();
        assert_eq!(rec.p_sum, 1.0);
        assert_eq!(rec.p_max, 1.0);
    }

    #[test]
    fn pathwise_dominance_every_cell_every_seed() {
        let m = pareto3();
        for seed in [1u64, 2, 3] {
            for (n, x) in [(5u64, 3.0), (20, 10.0), (50, 25.0)] {
                let rec = crude_mc(&m, n, x, 20_000, seed).unwrap();
                assert!(rec.p_max >= rec.p_sum, "n={n} x={x} seed={seed}");
            }
        }
    }

    #[test]
    fn estimates_are_bit_reproducible() {
        let m = pareto3();
        let a = crude_mc(&m, 10, 12.0, 100_000, 77).unwrap();
        let b = crude_mc(&m, 10, 12.0, 100_000, 77).unwrap();
        assert_eq!(a.p_sum.to_bits(), b.p_sum.to_bits());
        assert_eq!(a.p_max.to_bits(), b.p_max.to_bits());
        let (bj1, se1) = big_jump_main_term(&m, 10, 12.0, 100_000, 5.0, 77).unwrap();
        let (bj2, se2) = big_jump_main_term(&m, 10, 12.0, 100_000, 5.0, 77).unwrap();
        assert_eq!(bj1.to_bits(), bj2.to_bits());
        assert_eq!(se1.to_bits(), se2.to_bits());
    }

    #[test]
    fn parallel_and_sequential_tallies_are_identical() {
        // More reps than one shard so the parallel path actually splits.
        let m = pareto3();
        let reps = crate::exec::SHARD_SIZE * 3 + 101;
        let seq = crude_tallies_seq(&m, 7, 9.0, reps, 13);
        let par = crude_tallies_par(&m, 7, 9.0, reps, 13);
        assert_eq!(seq, par);
    }

    #[test]
    fn monotone_in_x_up_to_noise() {
        let m = pareto3();
        let reps = 200_000;
        let mut prev: Option<EstimateRecord> = None;
        for x in [5.0, 10.0, 20.0, 40.0] {
            let rec = crude_mc(&m, 20, x, reps, 5).unwrap();
            if let Some(p) = prev {
                let slack = 3.0 * (p.se_sum.powi(2) + rec.se_sum.powi(2)).sqrt();
                assert!(rec.p_sum <= p.p_sum + slack);
            }
            prev = Some(rec);
        }
    }

    #[test]
    fn prediction_is_exact_for_pure_powers() {
        let m = pareto3();
        let rec = crude_mc(&m, 100, 50.0, 10_000, 3).unwrap();
        let expect = 100.0 * 50.0f64.powi(-3);
        assert!((rec.prediction - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn big_jump_degenerate_cases() {
        let m = pareto3();
        // n = 1: S0 = 0 sits inside any window and the estimate reduces to
        // P(xi >= x) = F(x + m), exactly what the crude estimator targets.
        let (v, se) = big_jump_main_term(&m, 1, 10.0, 10_000, 5.0, 9).unwrap();
        assert!((v - 11.5f64.powi(-3)).abs() < 1e-15, "estimate {v}");
        assert_eq!(se, 0.0);
        // A tiny window truncates mass and can only lower the estimate.
        let (wide, _) = big_jump_main_term(&m, 100, 100.0, 50_000, 5.0, 9).unwrap();
        let (narrow, _) = big_jump_main_term(&m, 100, 100.0, 50_000, 0.01, 9).unwrap();
        assert!(narrow < wide, "narrow {narrow} wide {wide}");
        assert!(big_jump_main_term(&m, 100, 100.0, 1000, 0.0, 9).is_err());
    }

    #[test]
    fn window_sensitivity_sweep() {
        // "N grows slowly": the windowed mean is monotone in N; around the
        // default N = 5 it is stable at large n, while at n = 100 the
        // N = 10 window (bound = x) re-admits paths whose big jump already
        // happened and inflates the main term.
        let m = pareto3();
        let sweep = |n: u64, x: f64| -> Vec<f64> {
            [2.0, 5.0, 10.0]
                .iter()
                .map(|&w| big_jump_main_term(&m, n, x, 200_000, w, 77).unwrap().0)
                .collect()
        };
        let wide = sweep(400, 400.0);
        assert!(wide[0] <= wide[1] && wide[1] <= wide[2], "{wide:?}");
        assert!((wide[2] - wide[1]) / wide[2] < 0.01, "{wide:?}");
        assert!((wide[1] - wide[0]) / wide[1] < 0.05, "{wide:?}");
        let tight = sweep(100, 100.0);
        assert!(tight[0] <= tight[1] && tight[1] <= tight[2], "{tight:?}");
        assert!(tight[2] > 1.2 * tight[1], "too-wide window did not inflate: {tight:?}");
    }

    #[test]
    fn cross_estimator_consistency_on_a_cell() {
        let m = pareto3();
        let reps = 1_000_000;
        let rec = crude_mc(&m, 100, 100.0, reps, 2024).unwrap();
        let (bj, bj_se) = big_jump_main_term(&m, 100, 100.0, reps, 5.0, 2024).unwrap();
        let combined = 3.0 * (rec.se_sum.powi(2) + bj_se.powi(2)).sqrt();
        assert!(
            (rec.p_sum - bj).abs() <= combined,
            "crude {} vs main term {bj} (3 combined se = {combined})",
            rec.p_sum
        );
    }

    #[test]
    fn scan_zone_statistics_follow_the_algebra() {
        let exp = Experiment {
            model: pareto3(),
            zone: ZoneSpec::parse("x", Regime::FiniteVariance).unwrap(),
            n_list: vec![50, 100, 200],
            x_list: None,
            reps: 20_000,
            estimator: EstimatorKind::Crude,
            seed: 7,
            big_jump_window: 5.0,
            band: (0.7, 1.4),
        };
        let scan = ratio_scan(&exp).unwrap();
        assert!(scan.zone_scale_increasing);
        assert!(scan.zone_ap5_decreasing);
        for rec in &scan.records {
            let n = rec.n as f64;
            assert!((rec.zone_scale - n / (n * n.ln()).sqrt()).abs() < 1e-12);
            assert!((rec.zone_ap5 - n.powi(-2)).abs() < 1e-12 * n.powi(-2));
        }
        // A boundary below the zone: h(n) = sqrt(n) makes the statistic
        // decrease; reported, not an error.
        let slow = Experiment {
            zone: ZoneSpec::parse("sqrt(x)", Regime::FiniteVariance).unwrap(),
            ..exp
        };
        let scan = ratio_scan(&slow).unwrap();
        assert!(!scan.zone_scale_increasing);
    }

    #[test]
    fn infinite_variance_zone_statistic() {
        // alpha = -1.5, h(n) = n^0.9: x/sigma(n) = n^{0.9 - 2/3} = n^{7/30}.
        let exp = Experiment {
            model: TailModel::pareto(-1.5).unwrap(),
            zone: ZoneSpec::parse("x^0.9", Regime::InfiniteVariance).unwrap(),
            n_list: vec![50, 100],
            x_list: None,
            reps: 10_000,
            estimator: EstimatorKind::Crude,
            seed: 3,
            big_jump_window: 5.0,
            band: (0.6, 1.6),
        };
        let scan = ratio_scan(&exp).unwrap();
        for rec in &scan.records {
            let n = rec.n as f64;
            let expect = n.powf(0.9) / n.powf(2.0 / 3.0);
            assert!(
                (rec.zone_scale - expect).abs() < 1e-6 * expect,
                "zone {} vs {expect}",
                rec.zone_scale
            );
        }
        assert!(scan.zone_scale_increasing);
    }

    #[test]
    fn psi_hypotheses_across_models() {
        let finite = Experiment {
            model: pareto3(),
            zone: ZoneSpec::parse("x", Regime::FiniteVariance).unwrap(),
            n_list: vec![50, 100],
            x_list: None,
            reps: 10_000,
            estimator: EstimatorKind::Crude,
            seed: 1,
            big_jump_window: 5.0,
            band: (0.7, 1.4),
        };
        let rep = psi_consistency_report(&finite).unwrap();
        assert_eq!(rep.psi_lcf, Verdict::Pass);
        assert_eq!(rep.upper_power, Verdict::Pass);

        let heavy = Experiment {
            model: TailModel::pareto(-1.5).unwrap(),
            zone: ZoneSpec::parse("x", Regime::InfiniteVariance).unwrap(),
            band: (0.6, 1.6),
            ..finite.clone()
        };
        let rep = psi_consistency_report(&heavy).unwrap();
        assert_eq!(rep.psi_lcf, Verdict::Pass);
        assert_eq!(rep.upper_power, Verdict::Pass);

        let control = Experiment {
            model: TailModel::exponential().unwrap(),
            zone: ZoneSpec::parse("x", Regime::FiniteVariance).unwrap(),
            ..finite
        };
        let rep = psi_consistency_report(&control).unwrap();
        assert_eq!(rep.psi_lcf, Verdict::Fail);
    }
}
