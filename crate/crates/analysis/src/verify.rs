//! Checking a scripted counterexample with every draw going its way.
//!
//! The harness replaces exactly those protocol draws the script has an
//! opinion on by the outcome it wants and confirms the deterministic
//! skeleton: rounds complete, in-scope philosophers never eat during a
//! round, and every round ends in a configuration isomorphic to its start.
//! Separately, the probability that the one-shot entry draws are usable is
//! computed exactly by enumerating the draw tree of the entry phase.
//!
//! This is instrumentation; production runs never force draws.

use dp_adversary::{Adversary, AdversaryLog, Deviation};
use dp_engine::{RunSpec, Simulation};
use dp_protocol::{isomorphism, Bias, Configuration, Draw, DrawSource, Mapping};
use dp_topology::{PhilosopherId, Side};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::oracle::{format_rational, to_f64};
use crate::AnalysisError;

/// Most leaves the entry draw tree may have.
pub const ENTRY_LEAF_CAP: usize = 1 << 16;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RoundCheck {
    pub index: u64,
    pub start_step: usize,
    pub end_step: usize,
    /// Meals completed by each philosopher during the round.
    pub meals: Vec<usize>,
    pub in_scope_meals: usize,
    pub mapping: Option<Mapping>,
    /// No fork touched by an in-scope philosopher has a guest-book entry.
    pub guest_books_empty: bool,
}

/// Exact probability that the entry draws are usable.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EntryProbability {
    pub probability: String,
    pub approx: f64,
    pub leaves: usize,
    pub accepted_leaves: usize,
    /// Number of draws on the shortest accepted path.
    pub draws_on_accepted_path: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerificationReport {
    pub strategy: String,
    pub algorithm: String,
    pub topology: String,
    pub in_scope: Vec<PhilosopherId>,
    pub rounds_requested: usize,
    pub rounds: Vec<RoundCheck>,
    pub steps: usize,
    /// Draws the harness forced before the entry was accepted, and the
    /// product of their probabilities.
    pub initial_phase_forced_draws: usize,
    pub initial_phase_probability: String,
    pub forced_draws: usize,
    pub entry: EntryProbability,
    pub deviations: Vec<Deviation>,
    pub failures: Vec<String>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn initial_phase_probability(&self) -> Result<BigRational, AnalysisError> {
        crate::oracle::parse_rational(&self.initial_phase_probability)
    }
}

fn draw_weight(draw: Draw, bias: Bias, m: u32) -> BigRational {
    match draw {
        Draw::Side(s) => {
            let (a, b) = bias.weight(s);
            BigRational::new(BigInt::from(a), BigInt::from(b))
        }
        Draw::Label(_) => BigRational::new(BigInt::one(), BigInt::from(m)),
    }
}

fn scripted_log(a: &dyn Adversary) -> Result<&AdversaryLog, AnalysisError> {
    a.log()
        .ok_or_else(|| AnalysisError::NotScripted(a.name()))
}

/// Runs `spec`'s scripted adversary under the forcing harness until
/// `rounds` rounds have completed (or the run's horizon is reached).
pub fn verify_counterexample(spec: &RunSpec, rounds: usize) -> Result<VerificationReport, AnalysisError> {
    if !spec.adversary.kind.is_scripted() {
        return Err(AnalysisError::NotScripted(spec.adversary.label()));
    }
    let sys = spec.system.clone();
    let adversary = spec.adversary.clone().with_snapshots(true).build(&sys, spec.seed)?;
    let mut sim = Simulation::with_adversary(spec, adversary)?;

    let mut forced_draws = 0;
    let mut initial_draws = 0;
    let mut initial_probability = BigRational::one();
    while !sim.finished() {
        let log = scripted_log(sim.adversary())?;
        if log.rounds.len() >= rounds {
            break;
        }
        let p = sim.choose()?;
        // Read after `choose`, which is where the script records its verdicts.
        let log = scripted_log(sim.adversary())?;
        let in_initial_phase = log.rounds.is_empty() && log.entry_successes == 0;
        let forced = sim.adversary().forced_outcome(sim.history(), p);
        let event = sim.apply(p, forced)?;
        if let (Some(want), Some(got)) = (forced, event.draw) {
            debug_assert_eq!(want, got);
            forced_draws += 1;
            if in_initial_phase {
                initial_draws += 1;
                initial_probability *= draw_weight(got, sys.bias, sys.m);
            }
        }
    }

    let entry = entry_probability(spec)?;
    let in_scope = sim.adversary().in_scope();
    let log = scripted_log(sim.adversary())?.clone();
    let events = sim.history().events();
    let mut failures = Vec::new();
    let mut checks = Vec::new();
    for r in &log.rounds {
        let mut meals = vec![0; sys.topology.philosopher_count()];
        for e in &events[r.start_step..r.end_step] {
            if e.is_eating_event() {
                meals[e.actor.0] += 1;
            }
        }
        let in_scope_meals = in_scope.iter().map(|p| meals[p.0]).sum();
        let (Some(start), Some(end)) = (&r.start, &r.end) else {
            failures.push(format!("round {}: no snapshots recorded", r.index));
            continue;
        };
        let mapping = isomorphism(start, end)?;
        let guest_books_empty = guest_books_empty(end, &in_scope);
        if in_scope_meals > 0 {
            failures.push(format!("round {}: in-scope philosophers ate {in_scope_meals} times", r.index));
        }
        if mapping.is_none() {
            failures.push(format!("round {}: end configuration is not isomorphic to the start", r.index));
        }
        checks.push(RoundCheck {
            index: r.index,
            start_step: r.start_step,
            end_step: r.end_step,
            meals,
            in_scope_meals,
            mapping,
            guest_books_empty,
        });
    }
    if checks.len() < rounds {
        failures.push(format!(
            "only {} of {rounds} rounds completed within {} steps",
            checks.len(),
            sim.steps()
        ));
    }
    for d in &log.deviations {
        failures.push(format!("step {}: {}", d.step, d.reason));
    }
    Ok(VerificationReport {
        strategy: spec.adversary.label(),
        algorithm: sys.algorithm.to_string(),
        topology: sys.topology.to_spec(),
        in_scope,
        rounds_requested: rounds,
        rounds: checks,
        steps: sim.steps(),
        initial_phase_forced_draws: initial_draws,
        initial_phase_probability: format_rational(&initial_probability),
        forced_draws,
        entry,
        deviations: log.deviations.clone(),
        passed: failures.is_empty(),
        failures,
    })
}

fn guest_books_empty(c: &Configuration, in_scope: &[PhilosopherId]) -> bool {
    in_scope.iter().all(|&p| {
        let arc = c.topology().arc(p);
        [arc.left, arc.right].iter().all(|&f| c.fork(f).last_use.is_empty())
    })
}

/// Draws along one path of the entry draw tree: a fixed prefix, then the
/// first alternative for every further draw.
struct TreeDraws<'a> {
    prefix: &'a [Draw],
    bias: Bias,
    taken: Vec<Draw>,
    alternatives: Vec<Vec<Draw>>,
}

impl TreeDraws<'_> {
    fn next(&mut self, alternatives: Vec<Draw>) -> Draw {
        let i = self.taken.len();
        let d = self.prefix.get(i).copied().unwrap_or(alternatives[0]);
        self.taken.push(d);
        self.alternatives.push(alternatives);
        d
    }
}

impl DrawSource for TreeDraws<'_> {
    fn side(&mut self, _p: PhilosopherId, _bias: Bias) -> Side {
        let alts = [Side::Left, Side::Right]
            .into_iter()
            .filter(|&s| self.bias.weight(s).0 > 0)
            .map(Draw::Side)
            .collect();
        match self.next(alts) {
            Draw::Side(s) => s,
            Draw::Label(_) => unreachable!("side position replayed as label"),
        }
    }

    fn label(&mut self, _p: PhilosopherId, m: u32) -> u32 {
        match self.next((1..=m).map(Draw::Label).collect()) {
            Draw::Label(l) => l,
            Draw::Side(_) => unreachable!("label position replayed as side"),
        }
    }
}

/// Probability that the first entry attempt of `spec`'s script is accepted,
/// by enumerating every outcome of the draws made before the verdict.
pub fn entry_probability(spec: &RunSpec) -> Result<EntryProbability, AnalysisError> {
    let sys = spec.system.clone();
    let mut stack: Vec<Vec<Draw>> = vec![Vec::new()];
    let mut total = BigRational::zero();
    let mut leaves = 0;
    let mut accepted_leaves = 0;
    let mut shortest: Option<usize> = None;
    while let Some(prefix) = stack.pop() {
        leaves += 1;
        if leaves > ENTRY_LEAF_CAP {
            return Err(AnalysisError::CapExceeded(format!("entry draw tree exceeds {ENTRY_LEAF_CAP} leaves")));
        }
        let adversary = spec.adversary.build(&sys, spec.seed)?;
        let mut sim = Simulation::with_adversary(spec, adversary)?;
        let mut draws = TreeDraws {
            prefix: &prefix,
            bias: sys.bias,
            taken: Vec::new(),
            alternatives: Vec::new(),
        };
        let accepted = loop {
            let log = scripted_log(sim.adversary())?;
            if log.entry_successes > 0 {
                break true;
            }
            if log.entry_rejections > 0 {
                break false;
            }
            if sim.finished() {
                return Err(AnalysisError::Verification(format!(
                    "no entry verdict within {} steps",
                    spec.horizon
                )));
            }
            let p = sim.choose()?;
            sim.apply_with(p, &mut draws)?;
        };
        if accepted {
            accepted_leaves += 1;
            let w = draws
                .taken
                .iter()
                .fold(BigRational::one(), |acc, &d| acc * draw_weight(d, sys.bias, sys.m));
            total += w;
            shortest = Some(shortest.map_or(draws.taken.len(), |s| s.min(draws.taken.len())));
        }
        for i in prefix.len()..draws.taken.len() {
            for &alt in draws.alternatives[i].iter().skip(1) {
                let mut next = draws.taken[..i].to_vec();
                next.push(alt);
                stack.push(next);
            }
        }
    }
    Ok(EntryProbability {
        approx: to_f64(&total),
        probability: format_rational(&total),
        leaves,
        accepted_leaves,
        draws_on_accepted_path: shortest,
    })
}
