//! Monte Carlo estimation of progress statements.
//!
//! Trial `i` of a batch runs with seed `base + i`, so a batch is the same
//! whatever the number of workers; results are collected in trial order.

use std::fmt::Write as _;

use dp_engine::{RunSpec, Simulation};
use rayon::prelude::*;
use serde::Serialize;

use crate::{AnalysisError, StatePredicate, UnlessMonitor};

/// The normal quantile for a two-sided 95% interval.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// The 95% Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The interval touches 0 (or 1) exactly at the extremes; avoid rounding dust.
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (low, high)
}

/// `source →_p target`: from any configuration satisfying `source`, one
/// satisfying `target` is reached with probability at least `bound`.
#[derive(Debug, Clone)]
pub struct ProgressStatement {
    pub source: StatePredicate,
    pub target: StatePredicate,
    pub bound: f64,
}

impl ProgressStatement {
    pub fn new(source: StatePredicate, target: StatePredicate, bound: f64) -> Result<Self, AnalysisError> {
        if !(0.0..=1.0).contains(&bound) {
            return Err(AnalysisError::Domain(format!("probability bound {bound} outside [0, 1]")));
        }
        Ok(ProgressStatement { source, target, bound })
    }

    pub fn label(&self) -> String {
        format!("{} -> {}", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EstimateReport {
    pub label: String,
    /// Trials in which the source predicate was reached.
    pub trials: u64,
    /// Trials in which it never was (excluded from the estimate).
    pub skipped: u64,
    pub successes: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub horizon: u64,
    pub base_seed: u64,
    /// Trials in which `source unless target` failed before the target.
    pub unless_violations: u64,
}

impl EstimateReport {
    pub fn from_counts(label: impl Into<String>, successes: u64, trials: u64, skipped: u64, horizon: u64) -> Self {
        let (ci_low, ci_high) = wilson(successes, trials);
        EstimateReport {
            label: label.into(),
            trials,
            skipped,
            successes,
            point_estimate: if trials == 0 { 0.0 } else { successes as f64 / trials as f64 },
            ci_low,
            ci_high,
            horizon,
            base_seed: 0,
            unless_violations: 0,
        }
    }

    /// Half the width of the confidence interval.
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }

    pub const CSV_HEADER: &'static str =
        "label,trials,skipped,successes,estimate,ci_low,ci_high,horizon,base_seed,unless_violations";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.6},{:.6},{:.6},{},{},{}",
            self.label.replace(',', ";"),
            self.trials,
            self.skipped,
            self.successes,
            self.point_estimate,
            self.ci_low,
            self.ci_high,
            self.horizon,
            self.base_seed,
            self.unless_violations
        )
    }

    pub fn to_csv(reports: &[EstimateReport]) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in reports {
            let _ = writeln!(out, "{}", r.csv_row());
        }
        out
    }
}

/// Runs `f(seed)` for seeds `base .. base + trials` on `workers` threads and
/// returns the results in seed order.
pub fn run_trials<T, F>(base: u64, trials: u64, workers: usize, f: F) -> Result<Vec<T>, AnalysisError>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if workers == 0 {
        return Err(AnalysisError::Domain("workers must be at least 1".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| AnalysisError::Domain(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|i| f(base.wrapping_add(i)))
            .collect()
    }))
}

/// What one estimation trial observed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Step at which the source predicate first held, if it did.
    pub source_at: Option<u64>,
    /// Step at which the target held afterwards, within the window.
    pub target_at: Option<u64>,
    pub unless_held: bool,
}

/// One trial: run until `source` holds (for at most `horizon` steps), then
/// for up to `horizon` more steps or until `target` holds.
pub fn progress_trial(ps: &ProgressStatement, spec: &RunSpec, horizon: u64) -> Result<TrialOutcome, AnalysisError> {
    let mut sim = Simulation::new(spec)?;
    let mut step = 0u64;
    let mut source_at = None;
    while step <= horizon {
        if ps.source.holds(sim.current()) {
            source_at = Some(step);
            break;
        }
        if step == horizon {
            break;
        }
        sim.step()?;
        step += 1;
    }
    let Some(start) = source_at else {
        return Ok(TrialOutcome {
            source_at: None,
            target_at: None,
            unless_held: true,
        });
    };
    let mut unless = UnlessMonitor::new(&ps.source, &ps.target);
    let mut target_at = None;
    for t in start..=start + horizon {
        if t > start {
            sim.step()?;
        }
        unless.observe(t as usize, sim.current());
        if ps.target.holds(sim.current()) {
            target_at = Some(t);
            break;
        }
    }
    Ok(TrialOutcome {
        source_at,
        target_at,
        unless_held: unless.holds(),
    })
}

/// Estimates the probability of `ps` under the template's adversary. The
/// estimate is a finite-horizon lower bound: a success at one horizon is a
/// success at every larger one.
pub fn estimate_progress(
    ps: &ProgressStatement,
    template: &RunSpec,
    trials: u64,
    horizon: u64,
    workers: usize,
) -> Result<EstimateReport, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::Domain("trials must be at least 1".into()));
    }
    let outcomes = run_trials(template.seed, trials, workers, |seed| {
        progress_trial(ps, &template.with_seed(seed), horizon)
    })?;
    let mut eligible = 0;
    let mut successes = 0;
    let mut violations = 0;
    for o in outcomes {
        let o = o?;
        if o.source_at.is_some() {
            eligible += 1;
            successes += o.target_at.is_some() as u64;
            violations += !o.unless_held as u64;
        }
    }
    let label = format!("{} [{}]", ps.label(), template.adversary.label());
    let mut report = EstimateReport::from_counts(label, successes, eligible, trials - eligible, horizon);
    report.base_seed = template.seed;
    report.unless_violations = violations;
    Ok(report)
}
