//! Command dispatch: every command returns a typed report, a pass/fail flag,
//! and the artifacts it wrote.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dp_analysis::{
    self as analysis, distinct_value_enumerate, distinct_value_monte_carlo, distinct_value_probability,
    entry_probability, estimate_progress, explore_no_eat_cycles, lemma_consistency, meal_experiment, no_progress,
    oracle::{format_rational, parse_rational, to_f64},
    parse_expression, product_lower_bound, verify_counterexample, AnalysisError, Composition, EstimateReport,
    ExploreCaps, LemmaCheck, MealGoal, MealReport, NoProgressReport, ProgressStatement, VerificationReport,
};
use dp_engine::{fairness_check, metrics, run, EngineError, RunMetrics};
use dp_topology::PhilosopherId;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::config::{Command, ConfigError, Experiment, ExperimentConfig, FairnessWindow, OracleChecks};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Process exit status of `dpsim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    /// The command ran, but a verification or check failed.
    CheckFailed = 1,
    /// The configuration or the command line is invalid.
    ConfigError = 2,
    /// The command could not complete.
    RuntimeError = 3,
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Usage(_) => ExitCode::ConfigError,
            _ => ExitCode::RuntimeError,
        }
    }
}

/// Command-line values that replace config values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub horizon: Option<u64>,
    pub workers: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) -> Result<(), CliError> {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        for (name, v) in [("trials", self.trials), ("horizon", self.horizon)] {
            if v == Some(0) {
                return Err(CliError::Usage(format!("--{name} must be at least 1")));
            }
        }
        if self.workers == Some(0) {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        cfg.trials = self.trials.unwrap_or(cfg.trials);
        cfg.horizon = self.horizon.unwrap_or(cfg.horizon);
        cfg.workers = self.workers.or(cfg.workers);
        Ok(())
    }
}

/// Where every number in a report comes from.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Randomness {
    pub seed: u64,
    pub trial_seeds: String,
    pub philosopher_draws: String,
    pub adversary_draws: String,
}

impl Randomness {
    fn new(seed: u64) -> Randomness {
        Randomness {
            seed,
            trial_seeds: "trial i of a batch runs with seed + i".into(),
            philosopher_draws: "philosopher p draws from ChaCha8Rng::seed_from_u64(run seed), stream p + 1".into(),
            adversary_draws: "randomized schedulers draw from ChaCha8Rng::seed_from_u64(run seed), stream 0".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Header {
    pub command: String,
    pub topology: String,
    pub algorithm: String,
    pub m: u32,
    pub eat_steps: u32,
    pub draw_bias: String,
    pub courtesy: String,
    pub adversary: String,
    pub initial_nr: Option<Vec<u32>>,
    pub trials: u64,
    pub horizon: u64,
    pub randomness: Randomness,
}

impl Header {
    fn new(command: Command, cfg: &ExperimentConfig) -> Header {
        Header {
            command: command.to_string(),
            topology: cfg.topology_source.clone(),
            algorithm: cfg.system.algorithm.to_string(),
            m: cfg.system.m,
            eat_steps: cfg.system.eat_steps,
            draw_bias: cfg.system.bias.to_string(),
            courtesy: cfg.system.courtesy.to_string(),
            adversary: cfg.adversary.label(),
            initial_nr: cfg.initial_nr.clone(),
            trials: cfg.trials,
            horizon: cfg.horizon,
            randomness: Randomness::new(cfg.seed),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub steps: usize,
    pub eat_count: Vec<usize>,
    pub first_eat_step: Vec<Option<usize>>,
    pub max_hunger_duration: Vec<usize>,
    pub rounds: usize,
    pub max_round_len: usize,
    pub forced_schedules: u64,
    pub fairness_window: Option<usize>,
    pub fairness_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NoProgressSummary {
    #[serde(flatten)]
    pub report: NoProgressReport,
    /// Exact probability that the script's first entry attempt is accepted.
    pub entry_probability: Option<String>,
    /// `entry * ∏_{k=1}^{rounds} (1 - p^k)` with `p` the likelier draw
    /// side: the probability of surviving every round when round `k` fails
    /// with probability at most `p^k`.
    pub analytic_bound: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase", tag = "experiment")]
pub enum EstimateOutput {
    Progress { estimate: EstimateReport },
    NoProgress(NoProgressSummary),
    Meals(MealReport),
    Lemma { estimates: Vec<EstimateReport>, check: LemmaCheck },
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExploreSummary {
    pub reachable_states: usize,
    pub transitions: usize,
    pub meal_free_components: usize,
    pub witnesses: Vec<WitnessSummary>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct WitnessSummary {
    pub states: usize,
    pub actions: usize,
    /// The representative's philosopher program counters and fork holders.
    pub representative: String,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DistinctCheck {
    pub m: u64,
    pub k: u64,
    pub formula: String,
    pub enumeration: String,
    pub equal: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MonteCarloCheck {
    pub m: u32,
    pub k: usize,
    pub samples: u64,
    pub estimate: f64,
    pub exact: f64,
    pub sigmas: f64,
    pub within: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProductCheck {
    pub p: String,
    pub m: u32,
    pub product: String,
    pub bound: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProxyCheck {
    pub p: String,
    pub m: u32,
    pub product: String,
    pub approx: f64,
    pub at_least_quarter: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OracleReport {
    pub distinct: Vec<DistinctCheck>,
    pub monte_carlo: Vec<MonteCarloCheck>,
    pub sigma_limit: f64,
    pub product: Vec<ProductCheck>,
    pub proxy: Option<ProxyCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.distinct.iter().all(|d| d.equal)
            && self.monte_carlo.iter().all(|c| c.within)
            && self.product.iter().all(|c| c.holds)
            && self.proxy.as_ref().map_or(true, |p| p.at_least_quarter)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Report {
    Run(RunReport),
    Estimate(EstimateOutput),
    Verify(Box<VerificationReport>),
    Explore(ExploreSummary),
    Oracle(OracleReport),
}

/// The JSON document written to the report file.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportFile {
    pub header: Header,
    pub passed: bool,
    pub result: Report,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub report: Report,
    /// Human-readable summary for the terminal.
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> ExitCode {
        if self.passed {
            ExitCode::Success
        } else {
            ExitCode::CheckFailed
        }
    }
}

fn write(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    let path = dir.join(name);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    files.push(path);
    Ok(())
}

fn workers(cfg: &ExperimentConfig) -> usize {
    cfg.workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `command` on `cfg`, writing artifacts under `out`.
pub fn dispatch(command: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, CliError> {
    if let Some(declared) = cfg.command {
        if declared != command {
            return Err(CliError::Usage(format!(
                "config declares `command = {declared}` but `{command}` was requested"
            )));
        }
    }
    let mut files = Vec::new();
    let (passed, report, summary) = match command {
        Command::Run => run_command(cfg, out, &mut files)?,
        Command::Estimate => estimate_command(cfg, out, &mut files)?,
        Command::Verify => verify_command(cfg)?,
        Command::Explore => explore_command(cfg)?,
        Command::Oracle => oracle_command(cfg)?,
    };
    let doc = ReportFile {
        header: Header::new(command, cfg),
        passed,
        result: report.clone(),
    };
    let mut json = serde_json::to_string_pretty(&doc)?;
    json.push('\n');
    write(out, &cfg.outputs.report, &json, &mut files)?;
    Ok(Outcome {
        passed,
        report,
        summary,
        files,
    })
}

fn run_command(cfg: &ExperimentConfig, out: &Path, files: &mut Vec<PathBuf>) -> Result<(bool, Report, String), CliError> {
    let trace = run(&cfg.run_spec().with_horizon(cfg.horizon))?;
    let log = trace.adversary_log.clone().unwrap_or_default();
    let max_round_len = log.max_round_len();
    let window = match cfg.fairness_window {
        None => None,
        Some(FairnessWindow::Steps(w)) => Some(w),
        Some(FairnessWindow::MaxRound { factor }) => {
            if max_round_len == 0 {
                return Err(CliError::Usage(format!(
                    "fairnessWindow = max-round needs an adversary that completes rounds; {} completed none",
                    cfg.adversary.label()
                )));
            }
            Some(factor * max_round_len)
        }
    };
    let m: RunMetrics = metrics(&trace, window);
    write(out, &cfg.outputs.trace, &trace.to_tsv(), files)?;
    write(out, &cfg.outputs.metrics, &m.to_csv(), files)?;
    let violations = window.map_or(0, |w| fairness_check(&trace, w).len());
    let report = RunReport {
        steps: trace.len(),
        eat_count: m.eat_count.clone(),
        first_eat_step: m.first_eat_step.clone(),
        max_hunger_duration: m.max_hunger_duration.clone(),
        rounds: log.rounds.len(),
        max_round_len,
        forced_schedules: log.forced_schedules,
        fairness_window: window,
        fairness_violations: violations,
    };
    let mut summary = format!("{} steps; meals per philosopher: {:?}", report.steps, report.eat_count);
    if let Some(w) = window {
        let _ = write!(summary, "; fairness window {w}: {violations} violation(s)");
    }
    Ok((violations == 0, Report::Run(report), summary))
}

fn predicate(cfg: &ExperimentConfig, text: &str) -> Result<analysis::StatePredicate, CliError> {
    Ok(parse_expression(&cfg.system.topology, text)?)
}

fn statement(cfg: &ExperimentConfig, source: &str, target: &str) -> Result<ProgressStatement, CliError> {
    Ok(ProgressStatement::new(predicate(cfg, source)?, predicate(cfg, target)?, 0.0)?)
}

fn estimate_command(
    cfg: &ExperimentConfig,
    out: &Path,
    files: &mut Vec<PathBuf>,
) -> Result<(bool, Report, String), CliError> {
    let experiment = cfg
        .experiment
        .as_ref()
        .ok_or_else(|| CliError::Usage("`estimate` needs an `experiment` key".into()))?;
    let spec = cfg.run_spec().with_horizon(cfg.horizon);
    let (trials, w) = (cfg.trials, workers(cfg));
    let estimate = |source: &str, target: &str, horizon: u64| -> Result<EstimateReport, CliError> {
        Ok(estimate_progress(&statement(cfg, source, target)?, &spec, trials, horizon, w)?)
    };
    let lemma = |estimates: Vec<EstimateReport>, composition: Composition| -> Result<_, CliError> {
        let check = lemma_consistency(&estimates, composition)?;
        let summary = format!(
            "{composition:?}: estimate {:.4} vs bound {:.4} (slack {:.4}, premise {}) -> {}",
            check.lhs,
            check.rhs,
            check.slack,
            check.premise,
            if check.holds { "holds" } else { "fails" }
        );
        Ok((estimates, check, summary))
    };
    let (passed, output, summary, csv) = match experiment {
        Experiment::Progress { source, target } => {
            let r = estimate(source, target, cfg.horizon)?;
            let summary = format!(
                "{}: {}/{} = {:.4} (95% CI {:.4}..{:.4}), {} skipped, {} unless violation(s)",
                r.label, r.successes, r.trials, r.point_estimate, r.ci_low, r.ci_high, r.skipped, r.unless_violations
            );
            let csv = EstimateReport::to_csv(std::slice::from_ref(&r));
            (r.unless_violations == 0, EstimateOutput::Progress { estimate: r }, summary, csv)
        }
        Experiment::Concatenation { chain } => {
            let mut estimates = Vec::new();
            for pair in chain.windows(2) {
                estimates.push(estimate(&pair[0], &pair[1], cfg.horizon)?);
            }
            let links = (chain.len() - 1) as u64;
            estimates.push(estimate(&chain[0], chain.last().expect("chain"), links * cfg.horizon)?);
            let (estimates, check, summary) = lemma(estimates, Composition::Concatenation)?;
            let csv = EstimateReport::to_csv(&estimates);
            (check.holds, EstimateOutput::Lemma { estimates, check }, summary, csv)
        }
        Experiment::Union { parts, target } => {
            let mut estimates = Vec::new();
            for part in parts {
                estimates.push(estimate(part, target, cfg.horizon)?);
            }
            estimates.push(estimate(&parts.join("|"), target, cfg.horizon)?);
            let (estimates, check, summary) = lemma(estimates, Composition::Union)?;
            let csv = EstimateReport::to_csv(&estimates);
            (check.holds, EstimateOutput::Lemma { estimates, check }, summary, csv)
        }
        Experiment::Persistence {
            source,
            target,
            short_horizon,
            threshold,
        } => {
            let estimates = vec![
                estimate(source, target, *short_horizon)?,
                estimate(source, target, cfg.horizon)?,
            ];
            let (estimates, check, summary) = lemma(estimates, Composition::Persistence { target: *threshold })?;
            let csv = EstimateReport::to_csv(&estimates);
            (check.holds, EstimateOutput::Lemma { estimates, check }, summary, csv)
        }
        Experiment::NoProgress { rounds } => {
            let (report, _) = no_progress(&spec, trials, *rounds, w)?;
            let entry = entry_probability(&spec)?;
            let bias = cfg.system.bias;
            let p = BigRational::new(
                BigInt::from(bias.left.max(bias.den - bias.left)),
                BigInt::from(bias.den),
            );
            let bound = if p * BigInt::from(2) == BigRational::from_integer(BigInt::from(1)) {
                let survive = product_lower_bound(&parse_rational("1/2")?, *rounds as u32)?.product;
                Some(entry.approx * to_f64(&survive))
            } else {
                None
            };
            let summary = format!(
                "no in-scope meal for {} rounds: {}/{} = {:.4} (95% CI {:.4}..{:.4}); entry {} ; analytic bound {}; \
                 max round {}; fairness violations {} at window L, {} at 2L; dirty guest books {}",
                report.rounds,
                report.successes,
                report.trials,
                report.point_estimate,
                report.ci_low,
                report.ci_high,
                entry.probability,
                bound.map_or("n/a".into(), |b| format!("{b:.4}")),
                report.max_round_len,
                report.fairness_violations,
                report.fairness_violations_double,
                report.dirty_guest_books
            );
            let csv = format!(
                "rounds,trials,successes,point_estimate,ci_low,ci_high,analytic_bound,max_round_len,fairness_violations,fairness_violations_double,dirty_guest_books\n{},{},{},{},{},{},{},{},{},{},{}\n",
                report.rounds,
                report.trials,
                report.successes,
                report.point_estimate,
                report.ci_low,
                report.ci_high,
                bound.map_or(String::new(), |b| b.to_string()),
                report.max_round_len,
                report.fairness_violations,
                report.fairness_violations_double,
                report.dirty_guest_books
            );
            let summary_report = NoProgressSummary {
                report,
                entry_probability: Some(entry.probability),
                analytic_bound: bound,
            };
            (true, EstimateOutput::NoProgress(summary_report), summary, csv)
        }
        Experiment::Meals {
            goal,
            unless,
            stop_early,
        } => {
            let pairs = unless
                .iter()
                .map(|(s, s2)| Ok((predicate(cfg, s)?, predicate(cfg, s2)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let (report, _) = meal_experiment(&spec, trials, goal, &pairs, *stop_early, w)?;
            let summary = format!(
                "goal {}: {}/{} = {:.4} (95% CI {:.4}..{:.4}); slowest {}; fewest meals {:?}; {} trace(s) violate an unless statement",
                goal_name(&report.goal),
                report.successes,
                report.trials,
                report.point_estimate,
                report.ci_low,
                report.ci_high,
                report.slowest.map_or("-".to_string(), |s| s.to_string()),
                report.min_meals,
                report.unless_violations
            );
            let csv = format!(
                "trials,successes,point_estimate,ci_low,ci_high,slowest,unless_violations\n{},{},{},{},{},{},{}\n",
                report.trials,
                report.successes,
                report.point_estimate,
                report.ci_low,
                report.ci_high,
                report.slowest.map_or(String::new(), |s| s.to_string()),
                report.unless_violations
            );
            (report.unless_violations == 0, EstimateOutput::Meals(report), summary, csv)
        }
    };
    write(out, &cfg.outputs.estimates, &csv, files)?;
    Ok((passed, Report::Estimate(output), summary))
}

fn goal_name(goal: &MealGoal) -> String {
    match goal {
        MealGoal::Anyone => "anyone eats".into(),
        MealGoal::Everyone => "everyone eats".into(),
        MealGoal::Philosopher { id } => format!("{id} eats"),
    }
}

fn verify_command(cfg: &ExperimentConfig) -> Result<(bool, Report, String), CliError> {
    let report = verify_counterexample(&cfg.run_spec().with_horizon(cfg.horizon), cfg.rounds)?;
    let summary = format!(
        "{} on {} ({}): {} of {} round(s) verified; initial phase {} forced draw(s) = {}; entry probability {}; {}",
        report.strategy,
        cfg.topology_source,
        report.algorithm,
        report.rounds.len(),
        report.rounds_requested,
        report.initial_phase_forced_draws,
        report.initial_phase_probability,
        report.entry.probability,
        if report.passed {
            "PASSED".to_string()
        } else {
            format!("FAILED: {}", report.failures.join("; "))
        }
    );
    Ok((report.passed, Report::Verify(Box::new(report)), summary))
}

fn explore_command(cfg: &ExperimentConfig) -> Result<(bool, Report, String), CliError> {
    let caps = ExploreCaps {
        max_states: cfg.max_states,
        ..ExploreCaps::default()
    };
    let initial = cfg.run_spec().initial_configuration()?;
    let r = explore_no_eat_cycles(&initial, caps)?;
    let summary = format!(
        "{} reachable state(s), {} meal-free end component(s), {} fair witness(es)",
        r.reachable_states,
        r.meal_free_components,
        r.witnesses.len()
    );
    let report = ExploreSummary {
        reachable_states: r.reachable_states,
        transitions: r.transitions,
        meal_free_components: r.meal_free_components,
        witnesses: r
            .witnesses
            .iter()
            .map(|w| WitnessSummary {
                states: w.states,
                actions: w.actions,
                representative: describe(&w.representative),
            })
            .collect(),
    };
    Ok((true, Report::Explore(report), summary))
}

fn describe(c: &dp_protocol::Configuration) -> String {
    let mut s = String::new();
    for (p, ph) in c.philosophers.iter().enumerate() {
        let _ = write!(s, "P{p}:{} ", ph.pc);
    }
    for (f, fork) in c.forks.iter().enumerate() {
        let holder = fork.holder.map_or("-".to_string(), |h: PhilosopherId| h.to_string());
        let _ = write!(s, "f{f}:nr={},held={holder} ", fork.nr);
    }
    s.trim_end().to_string()
}

fn oracle_command(cfg: &ExperimentConfig) -> Result<(bool, Report, String), CliError> {
    let checks = cfg
        .oracle
        .as_ref()
        .ok_or_else(|| CliError::Usage("`oracle` configs need `command = oracle`".into()))?;
    let report = oracle_checks(checks, cfg.seed)?;
    let passed = report.passed();
    let summary = format!(
        "{} formula/enumeration pair(s), {} Monte Carlo check(s), {} product check(s){}: {}",
        report.distinct.len(),
        report.monte_carlo.len(),
        report.product.len(),
        report
            .proxy
            .as_ref()
            .map_or(String::new(), |p| format!(", proxy product at m = {} is {:.6}", p.m, p.approx)),
        if passed { "all hold" } else { "SOME FAIL" }
    );
    Ok((passed, Report::Oracle(report), summary))
}

/// Runs the batch oracle checks. Monte Carlo pair `i` uses seed `seed + i`.
pub fn oracle_checks(checks: &OracleChecks, seed: u64) -> Result<OracleReport, CliError> {
    let mut report = OracleReport {
        sigma_limit: checks.sigma_limit,
        ..OracleReport::default()
    };
    if let Some(up_to) = checks.distinct_up_to {
        for m in 1..=up_to {
            for k in 1..=m {
                let formula = distinct_value_probability(m, k)?;
                let enumeration = distinct_value_enumerate(m, k)?;
                report.distinct.push(DistinctCheck {
                    m,
                    k,
                    equal: formula == enumeration,
                    formula: format_rational(&formula),
                    enumeration: format_rational(&enumeration),
                });
            }
        }
    }
    for (i, &(m, k)) in checks.monte_carlo.iter().enumerate() {
        let exact = to_f64(&distinct_value_probability(m as u64, k as u64)?);
        let sample = distinct_value_monte_carlo(m, k, checks.samples, seed.wrapping_add(i as u64));
        let sigmas = sample.sigmas_from(exact);
        report.monte_carlo.push(MonteCarloCheck {
            m,
            k,
            samples: checks.samples,
            estimate: sample.estimate(),
            exact,
            sigmas,
            within: sigmas <= checks.sigma_limit,
        });
    }
    let mut largest: Option<BigRational> = None;
    for text in &checks.product_p {
        let p = parse_rational(text)?;
        for m in 1..=checks.product_m {
            let b = product_lower_bound(&p, m)?;
            report.product.push(ProductCheck {
                p: format_rational(&p),
                m,
                holds: b.holds(),
                product: format_rational(&b.product),
                bound: format_rational(&b.bound),
            });
        }
        if largest.as_ref().map_or(true, |l| p > *l) {
            largest = Some(p);
        }
    }
    if let (Some(m), Some(p)) = (checks.product_proxy_m, largest) {
        let b = product_lower_bound(&p, m)?;
        let quarter = parse_rational("1/4")?;
        report.proxy = Some(ProxyCheck {
            p: format_rational(&p),
            m,
            approx: to_f64(&b.product),
            at_least_quarter: b.product >= quarter,
            product: format_rational(&b.product),
        });
    }
    Ok(report)
}

/// `dpsim oracle distinct M K` and `dpsim oracle product P M`.
pub fn oracle_query(args: &[String]) -> Result<String, CliError> {
    let words: Vec<&str> = args.iter().map(String::as_str).collect();
    let int = |s: &str| {
        s.parse::<u64>()
            .map_err(|_| CliError::Usage(format!("`{s}` is not a non-negative integer")))
    };
    match words.as_slice() {
        ["distinct", m, k] => Ok(format_rational(&distinct_value_probability(int(m)?, int(k)?)?)),
        ["enumerate", m, k] => Ok(format_rational(&distinct_value_enumerate(int(m)?, int(k)?)?)),
        ["product", p, m] => {
            let m = u32::try_from(int(m)?).map_err(|_| CliError::Usage(format!("m = {m} is too large")))?;
            let b = product_lower_bound(&parse_rational(p)?, m)?;
            Ok(format!(
                "product {}\nbound {}\nholds {}",
                format_rational(&b.product),
                format_rational(&b.bound),
                b.holds()
            ))
        }
        _ => Err(CliError::Usage(
            "usage: dpsim oracle distinct M K | enumerate M K | product P M (or --config FILE)".into(),
        )),
    }
}
