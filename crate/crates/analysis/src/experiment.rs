//! Trial batches for the two kinds of question the estimators cannot phrase
//! as a single progress statement: "does a scripted adversary keep its
//! targets hungry for `r` rounds?" and "who eats within the horizon?".

use std::collections::BTreeSet;

use dp_engine::{fairness_check, RunSpec, Simulation};
use dp_protocol::Configuration;
use dp_topology::PhilosopherId;
use serde::Serialize;

use crate::estimate::{run_trials, wilson};
use crate::{AnalysisError, StatePredicate, UnlessMonitor};

/// Per-trial outcome of [`no_progress`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NoProgressTrial {
    pub seed: u64,
    /// `rounds` rounds completed with no in-scope meal.
    pub success: bool,
    /// Step of the first in-scope meal, if any.
    pub first_in_scope_meal: Option<usize>,
    pub rounds: usize,
    pub steps: usize,
    pub max_round_len: usize,
    /// Fairness violations over the completed rounds at window
    /// `max_round_len` (successful trials only).
    pub fairness_violations: usize,
    /// The same at window `2 * max_round_len`: every philosopher takes a step
    /// in every round, so no gap can reach two round lengths.
    pub fairness_violations_double: usize,
    /// Completed rounds ending with a guest-book entry on an in-scope fork.
    pub dirty_guest_books: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NoProgressReport {
    pub adversary: String,
    pub in_scope: Vec<PhilosopherId>,
    pub rounds: usize,
    pub horizon: u64,
    pub base_seed: u64,
    pub trials: u64,
    pub successes: u64,
    /// Trials that hit the step horizon first (counted as failures).
    pub unfinished: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Longest completed round over all trials.
    pub max_round_len: usize,
    pub fairness_violations: usize,
    pub fairness_violations_double: usize,
    pub dirty_guest_books: usize,
}

fn guest_books_clean(c: &Configuration, in_scope: &[PhilosopherId]) -> bool {
    in_scope.iter().all(|&p| {
        let arc = c.topology().arc(p);
        c.fork(arc.left).last_use.is_empty() && c.fork(arc.right).last_use.is_empty()
    })
}

/// One trial of [`no_progress`].
pub fn no_progress_trial(spec: &RunSpec, rounds: usize) -> Result<NoProgressTrial, AnalysisError> {
    if !spec.adversary.kind.is_scripted() {
        return Err(AnalysisError::NotScripted(spec.adversary.label()));
    }
    let mut spec = spec.clone();
    spec.adversary = spec.adversary.clone().with_snapshots(true);
    let mut sim = Simulation::new(&spec)?;
    let in_scope: BTreeSet<PhilosopherId> = sim.adversary().in_scope().into_iter().collect();
    let completed = |sim: &Simulation| sim.adversary().log().map_or(0, |l| l.rounds.len());
    let mut first_meal = None;
    while !sim.finished() && completed(&sim) < rounds {
        let e = sim.step()?;
        if e.is_eating_event() && in_scope.contains(&e.actor) {
            first_meal = Some(sim.steps() - 1);
            break;
        }
    }
    let success = first_meal.is_none() && completed(&sim) >= rounds;
    let steps = sim.steps();
    let mut trace = sim.into_trace();
    let log = trace.adversary_log.clone().unwrap_or_default();
    let scope: Vec<PhilosopherId> = in_scope.into_iter().collect();
    let max_round_len = log.max_round_len();
    let dirty_guest_books = log
        .rounds
        .iter()
        .filter(|r| r.end.as_ref().is_some_and(|c| !guest_books_clean(c, &scope)))
        .count();
    let (mut fairness_violations, mut fairness_violations_double) = (0, 0);
    if success {
        if let Some(last) = log.rounds.last() {
            trace.events.truncate(last.end_step);
            fairness_violations = fairness_check(&trace, max_round_len).len();
            fairness_violations_double = fairness_check(&trace, 2 * max_round_len).len();
        }
    }
    Ok(NoProgressTrial {
        seed: spec.seed,
        success,
        first_in_scope_meal: first_meal,
        rounds: log.rounds.len(),
        steps,
        max_round_len,
        fairness_violations,
        fairness_violations_double,
        dirty_guest_books,
    })
}

/// Probability that a scripted adversary completes `rounds` rounds before
/// any in-scope philosopher eats, within the template's step horizon.
pub fn no_progress(
    template: &RunSpec,
    trials: u64,
    rounds: usize,
    workers: usize,
) -> Result<(NoProgressReport, Vec<NoProgressTrial>), AnalysisError> {
    if trials == 0 || rounds == 0 {
        return Err(AnalysisError::Domain("trials and rounds must be at least 1".into()));
    }
    let in_scope = {
        let sys = template.system.clone();
        template.adversary.build(&sys, template.seed)?.in_scope()
    };
    let results = run_trials(template.seed, trials, workers, |seed| {
        no_progress_trial(&template.with_seed(seed), rounds)
    })?
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let successes = results.iter().filter(|t| t.success).count() as u64;
    let unfinished = results
        .iter()
        .filter(|t| !t.success && t.first_in_scope_meal.is_none())
        .count() as u64;
    let (ci_low, ci_high) = wilson(successes, trials);
    let report = NoProgressReport {
        adversary: template.adversary.label(),
        in_scope,
        rounds,
        horizon: template.horizon,
        base_seed: template.seed,
        trials,
        successes,
        unfinished,
        point_estimate: successes as f64 / trials as f64,
        ci_low,
        ci_high,
        max_round_len: results.iter().map(|t| t.max_round_len).max().unwrap_or(0),
        fairness_violations: results.iter().map(|t| t.fairness_violations).sum(),
        fairness_violations_double: results.iter().map(|t| t.fairness_violations_double).sum(),
        dirty_guest_books: results.iter().map(|t| t.dirty_guest_books).sum(),
    };
    Ok((report, results))
}

/// Which meals make a trial of [`meal_experiment`] a success.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum MealGoal {
    /// Somebody finishes a meal.
    Anyone,
    /// Every philosopher finishes a meal.
    Everyone,
    /// This philosopher finishes a meal.
    Philosopher { id: PhilosopherId },
}

impl MealGoal {
    fn reached(&self, meals: &[u64]) -> bool {
        match self {
            MealGoal::Anyone => meals.iter().any(|&m| m > 0),
            MealGoal::Everyone => meals.iter().all(|&m| m > 0),
            MealGoal::Philosopher { id } => meals.get(id.0).is_some_and(|&m| m > 0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MealTrial {
    pub seed: u64,
    pub success: bool,
    /// Step at which the goal was first met.
    pub reached_at: Option<usize>,
    pub meals: Vec<u64>,
    /// Unless pairs (by index) that failed on this trace.
    pub unless_failures: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MealReport {
    pub adversary: String,
    pub goal: MealGoal,
    pub horizon: u64,
    pub base_seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// `s unless s2` statements monitored on every trace.
    pub unless: Vec<String>,
    /// Traces on which some monitored statement failed.
    pub unless_violations: u64,
    /// Latest step at which a successful trial met the goal.
    pub slowest: Option<usize>,
    /// Fewest meals any philosopher had at the end of a trial.
    pub min_meals: Vec<u64>,
}

/// Runs one trial for `horizon` steps (or, with `stop_early`, until the goal
/// is met) while monitoring every `s unless s2` pair.
pub fn meal_trial(
    spec: &RunSpec,
    goal: &MealGoal,
    unless: &[(StatePredicate, StatePredicate)],
    stop_early: bool,
) -> Result<MealTrial, AnalysisError> {
    let mut sim = Simulation::new(spec)?;
    let mut meals = vec![0u64; sim.current().philosopher_count()];
    let mut monitors: Vec<UnlessMonitor> = unless.iter().map(|(s, s2)| UnlessMonitor::new(s, s2)).collect();
    for m in monitors.iter_mut() {
        m.observe(0, sim.current());
    }
    let mut reached_at = goal.reached(&meals).then_some(0);
    while !sim.finished() && !(stop_early && reached_at.is_some()) {
        let e = sim.step()?;
        let i = sim.steps();
        if e.is_eating_event() {
            meals[e.actor.0] += 1;
        }
        for m in monitors.iter_mut() {
            m.observe(i, sim.current());
        }
        if reached_at.is_none() && goal.reached(&meals) {
            reached_at = Some(i);
        }
    }
    Ok(MealTrial {
        seed: spec.seed,
        success: reached_at.is_some(),
        reached_at,
        meals,
        unless_failures: monitors
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.holds())
            .map(|(i, _)| i)
            .collect(),
    })
}

pub fn meal_experiment(
    template: &RunSpec,
    trials: u64,
    goal: &MealGoal,
    unless: &[(StatePredicate, StatePredicate)],
    stop_early: bool,
    workers: usize,
) -> Result<(MealReport, Vec<MealTrial>), AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::Domain("trials must be at least 1".into()));
    }
    if let MealGoal::Philosopher { id } = goal {
        if id.0 >= template.system.topology.philosopher_count() {
            return Err(AnalysisError::Domain(format!("no philosopher {id}")));
        }
    }
    let results = run_trials(template.seed, trials, workers, |seed| {
        meal_trial(&template.with_seed(seed), goal, unless, stop_early)
    })?
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let successes = results.iter().filter(|t| t.success).count() as u64;
    let (ci_low, ci_high) = wilson(successes, trials);
    let n = template.system.topology.philosopher_count();
    let min_meals = (0..n)
        .map(|p| results.iter().map(|t| t.meals[p]).min().unwrap_or(0))
        .collect();
    let report = MealReport {
        adversary: template.adversary.label(),
        goal: goal.clone(),
        horizon: template.horizon,
        base_seed: template.seed,
        trials,
        successes,
        point_estimate: successes as f64 / trials as f64,
        ci_low,
        ci_high,
        unless: unless.iter().map(|(s, s2)| format!("{s} unless {s2}")).collect(),
        unless_violations: results.iter().filter(|t| !t.unless_failures.is_empty()).count() as u64,
        slowest: results.iter().filter_map(|t| t.reached_at).max(),
        min_meals,
    };
    Ok((report, results))
}
