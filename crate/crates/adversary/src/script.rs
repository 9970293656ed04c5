//! Scripted stubborn adversaries.
//!
//! A [`Script`] describes a strategy as a sequence of [`Directive`]s, planned
//! batch by batch from the current configuration. [`ScriptedAdversary`]
//! executes the directives one scheduling decision at a time, watches the
//! outcome of every step, and restarts the script whenever the run leaves
//! the planned path.
//!
//! A *stubborn point* is a directive that keeps scheduling one philosopher
//! until its random commitment hits a target fork. Unwrapped, a scripted
//! adversary is unboundedly stubborn (and therefore unfair in the limit).
//! [`fairize`] caps the number of draws at each stubborn point of round `k`
//! by `n_k`; when the cap is hit the round is abandoned, every philosopher is
//! scheduled once in index order, and the script starts over.

use std::collections::VecDeque;
use std::fmt;

use dp_protocol::{Action, Configuration, Draw, Pc};
use dp_topology::{ForkId, PhilosopherId};
use serde::{Deserialize, Serialize};

use crate::log::{RoundRecord, Segment, SegmentKind};
use crate::{Adversary, AdversaryError, AdversaryLog, History};

/// A target state for one philosopher.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Goal {
    /// Waiting at the first-fork test, committed to the fork.
    CommittedTo(ForkId),
    /// Holding the fork as its first fork, before the second test.
    HoldsFirst(ForkId),
    AtPc(Pc),
}

impl Goal {
    pub fn reached(self, c: &Configuration, p: PhilosopherId) -> bool {
        match self {
            Goal::CommittedTo(f) => c.pc(p) == Pc::TakeFirst && c.committed_fork(p) == Some(f),
            Goal::HoldsFirst(f) => {
                matches!(c.pc(p), Pc::Relabel | Pc::TakeSecond) && c.committed_fork(p) == Some(f) && c.holds(p, f)
            }
            Goal::AtPc(pc) => c.pc(p) == pc,
        }
    }

    fn target_fork(self) -> Option<ForkId> {
        match self {
            Goal::CommittedTo(f) | Goal::HoldsFirst(f) => Some(f),
            Goal::AtPc(_) => None,
        }
    }
}

/// An observable fact about a configuration, checked by [`Directive::Expect`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fact {
    Holder(ForkId, Option<PhilosopherId>),
    CommittedTo(PhilosopherId, ForkId),
    AtPc(PhilosopherId, Pc),
    /// No fork is held and nobody is committed.
    Quiescent,
    /// Every shared fork (degree at least two) is held.
    AllHeld,
}

impl Fact {
    pub fn holds(&self, c: &Configuration) -> bool {
        match *self {
            Fact::Holder(f, h) => c.holder(f) == h,
            Fact::CommittedTo(p, f) => Goal::CommittedTo(f).reached(c, p),
            Fact::AtPc(p, pc) => c.pc(p) == pc,
            Fact::Quiescent => quiescent(c),
            Fact::AllHeld => c
                .topology()
                .forks()
                .all(|f| c.topology().degree(f) < 2 || c.holder(f).is_some()),
        }
    }
}

impl fmt::Display for Fact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fact::Holder(fork, Some(p)) => write!(f, "{p} holds {fork}"),
            Fact::Holder(fork, None) => write!(f, "{fork} is free"),
            Fact::CommittedTo(p, fork) => write!(f, "{p} committed to {fork}"),
            Fact::AtPc(p, pc) => write!(f, "{p} at {pc}"),
            Fact::Quiescent => f.write_str("no fork held and no commitment"),
            Fact::AllHeld => f.write_str("every shared fork held"),
        }
    }
}

/// Bookkeeping events a script reports to its executor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mark {
    EntryStart,
    /// The one-shot symmetry-breaking draws came out usable.
    EntryAccepted,
    EntryRejected(String),
    /// The configuration is at the start of the first round.
    SetupComplete,
    RoundStart,
    RoundComplete,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Directive {
    /// Schedule the philosopher exactly once.
    Step(PhilosopherId),
    /// Schedule the (uncommitted) philosopher until it has made one
    /// first-fork commitment. `want` is the outcome the script hopes for;
    /// only the verification harness uses it.
    Draw { who: PhilosopherId, want: Option<ForkId> },
    /// Schedule the philosopher until the goal holds. A stubborn directive
    /// is a stubborn point: its draws count against the fairness budget.
    Until { who: PhilosopherId, goal: Goal, stubborn: bool },
    /// Abandon the plan unless every fact holds.
    Expect { label: String, facts: Vec<Fact> },
    /// Let every holder and committed philosopher finish its attempt until
    /// the configuration is quiescent.
    Drain,
    /// Give up on the current plan.
    Abandon(String),
    Mark(Mark),
}

impl Directive {
    pub fn expect(label: impl Into<String>, facts: Vec<Fact>) -> Directive {
        Directive::Expect {
            label: label.into(),
            facts,
        }
    }

    pub fn stubborn(who: PhilosopherId, goal: Goal) -> Directive {
        Directive::Until { who, goal, stubborn: true }
    }

    pub fn until(who: PhilosopherId, goal: Goal) -> Directive {
        Directive::Until {
            who,
            goal,
            stubborn: false,
        }
    }
}

/// A strategy written as a plan of directives.
pub trait Script: Send {
    fn name(&self) -> String;

    /// Forget all progress; the next plan starts a fresh entry.
    fn reset(&mut self);

    /// The next batch of directives. Called whenever the previous batch has
    /// been executed. Must not return an empty batch.
    fn plan(&mut self, c: &Configuration) -> Vec<Directive>;

    /// Upper bound on stubborn points per round, used by the default budget.
    fn stubborn_points(&self) -> usize;

    /// Philosophers the script keeps from eating during rounds.
    fn in_scope(&self) -> Vec<PhilosopherId>;
}

/// The schedule of retry caps `n_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum StubbornnessBudget {
    /// `n_k = k + ceil(log2 s) + 1` where `s` is the number of stubborn
    /// points per round (the script's own bound unless given). With fair
    /// binary draws a round then fails with probability at most `2^-k`.
    UnionBound { points: Option<usize> },
    /// `n_k = base + per_round * k`.
    Linear { base: u64, per_round: u64 },
}

impl Default for StubbornnessBudget {
    fn default() -> Self {
        StubbornnessBudget::UnionBound { points: None }
    }
}

impl StubbornnessBudget {
    /// The retry cap for round `k` (`k ≥ 1`).
    pub fn retries(&self, k: u64, script_points: usize) -> u64 {
        match *self {
            StubbornnessBudget::UnionBound { points } => {
                let s = points.unwrap_or(script_points).max(1) as u64;
                let log2 = 64 - (s - 1).leading_zeros() as u64;
                k + log2 + 1
            }
            StubbornnessBudget::Linear { base, per_round } => base + per_round * k,
        }
    }
}

/// Steps a single non-`Step` directive may take before the plan is
/// considered stuck.
pub const DEFAULT_DIRECTIVE_STEP_CAP: u64 = 20_000;

/// Decisions inside one `choose` call before the executor reports itself
/// stuck (a script that never schedules anybody is a bug).
const DECISION_GUARD: usize = 100_000;

#[derive(Debug)]
struct Active {
    directive: Directive,
    steps: u64,
    draws: u64,
}

enum Progress {
    Schedule(PhilosopherId),
    Done,
    Fail { reason: String, exhausted: bool },
}

/// Executes a [`Script`], optionally with a stubbornness budget.
pub struct ScriptedAdversary {
    script: Box<dyn Script>,
    budget: Option<StubbornnessBudget>,
    queue: VecDeque<Directive>,
    active: Option<Active>,
    /// Next philosopher of an ongoing fallback rotation.
    fallback: Option<usize>,
    /// Budget round index `k`, starting at 1.
    round: u64,
    round_start: Option<(usize, Option<Configuration>)>,
    segment_start: usize,
    record_snapshots: bool,
    step_cap: u64,
    drain_rotation: usize,
    log: AdversaryLog,
}

impl ScriptedAdversary {
    /// The unboundedly stubborn adversary.
    pub fn new(script: Box<dyn Script>) -> ScriptedAdversary {
        ScriptedAdversary {
            script,
            budget: None,
            queue: VecDeque::new(),
            active: None,
            fallback: None,
            round: 1,
            round_start: None,
            segment_start: 0,
            record_snapshots: false,
            step_cap: DEFAULT_DIRECTIVE_STEP_CAP,
            drain_rotation: 0,
            log: AdversaryLog::default(),
        }
    }

    /// Keep copies of the configurations at every round start and end.
    pub fn with_snapshots(mut self, on: bool) -> Self {
        self.record_snapshots = on;
        self
    }

    pub fn with_step_cap(mut self, cap: u64) -> Self {
        self.step_cap = cap.max(1);
        self
    }

    pub fn budget(&self) -> Option<StubbornnessBudget> {
        self.budget
    }

    pub fn round_index(&self) -> u64 {
        self.round
    }

    fn close_segment(&mut self, now: usize, kind: SegmentKind) {
        self.log.segments.push(Segment {
            kind,
            start: self.segment_start,
            end: now,
        });
        self.segment_start = now;
    }

    fn restart(&mut self, now: usize, kind: SegmentKind) {
        self.queue.clear();
        self.active = None;
        self.round_start = None;
        self.script.reset();
        self.round += 1;
        self.close_segment(now, kind);
        if self.budget.is_some() {
            self.fallback = Some(0);
        }
    }

    fn mark(&mut self, mark: &Mark, now: usize, c: &Configuration) {
        match mark {
            Mark::EntryStart => {
                self.log.entry_attempts += 1;
            }
            Mark::EntryAccepted => self.log.entry_successes += 1,
            Mark::EntryRejected(reason) => {
                self.log.entry_rejections += 1;
                self.log.deviate(now, format!("entry rejected: {reason}"));
                self.restart(now, SegmentKind::Rejected);
            }
            Mark::SetupComplete => {
                self.round += 1;
                self.close_segment(now, SegmentKind::Setup);
            }
            Mark::RoundStart => {
                let snapshot = self.record_snapshots.then(|| c.clone());
                self.round_start = Some((now, snapshot));
            }
            Mark::RoundComplete => {
                let (start_step, start) = self.round_start.take().unwrap_or((self.segment_start, None));
                self.log.rounds.push(RoundRecord {
                    index: self.round,
                    start_step,
                    end_step: now,
                    start,
                    end: self.record_snapshots.then(|| c.clone()),
                });
                self.round += 1;
                self.close_segment(now, SegmentKind::Round);
            }
        }
    }

    fn advance(&mut self, active: &mut Active, history: &History) -> Progress {
        let c = history.current();
        let fail = |reason: String| Progress::Fail {
            reason,
            exhausted: false,
        };
        match &active.directive {
            Directive::Step(p) => {
                if active.steps == 0 {
                    active.steps = 1;
                    Progress::Schedule(*p)
                } else {
                    Progress::Done
                }
            }
            Directive::Draw { who, .. } => {
                let committed_now = active.steps > 0
                    && history.last_event().is_some_and(|e| {
                        e.actor == *who && matches!(e.action, Action::CommitRandom { .. } | Action::CommitPriority { .. })
                    });
                if committed_now {
                    Progress::Done
                } else if c.pc(*who).has_commitment() {
                    fail(format!("{who} was expected to be uncommitted but is at {}", c.pc(*who)))
                } else if active.steps >= self.step_cap {
                    fail(format!("{who} did not reach a draw within {} steps", self.step_cap))
                } else {
                    active.steps += 1;
                    Progress::Schedule(*who)
                }
            }
            Directive::Until { who, goal, stubborn } => {
                if goal.reached(c, *who) {
                    return Progress::Done;
                }
                if active.steps >= self.step_cap {
                    return fail(format!("{who} did not reach {goal:?} within {} steps", self.step_cap));
                }
                if *stubborn && c.pc(*who) == Pc::Choose {
                    if let Some(budget) = self.budget {
                        let cap = budget.retries(self.round, self.script.stubborn_points());
                        if active.draws >= cap {
                            return Progress::Fail {
                                reason: format!("{who} missed {goal:?} in {cap} draws (round {})", self.round),
                                exhausted: true,
                            };
                        }
                    }
                    active.draws += 1;
                }
                active.steps += 1;
                Progress::Schedule(*who)
            }
            Directive::Expect { label, facts } => match facts.iter().find(|f| !f.holds(c)) {
                None => Progress::Done,
                Some(f) => fail(format!("{label}: expected {f}")),
            },
            Directive::Drain => {
                if quiescent(c) {
                    Progress::Done
                } else if active.steps >= 200 * c.philosopher_count() as u64 + 200 {
                    fail("drain did not reach a quiescent configuration".into())
                } else {
                    active.steps += 1;
                    Progress::Schedule(drain_choice(c, &mut self.drain_rotation))
                }
            }
            Directive::Abandon(reason) => fail(reason.clone()),
            Directive::Mark(_) => Progress::Done,
        }
    }
}

/// Wraps a scripted adversary with a stubbornness budget, making it fair.
pub fn fairize(mut a: ScriptedAdversary, budget: StubbornnessBudget) -> ScriptedAdversary {
    a.budget = Some(budget);
    a
}

impl Adversary for ScriptedAdversary {
    fn name(&self) -> String {
        match self.budget {
            Some(_) => format!("fairize({})", self.script.name()),
            None => self.script.name(),
        }
    }

    fn choose(&mut self, history: &History) -> Result<PhilosopherId, AdversaryError> {
        let now = history.len();
        let n = history.current().philosopher_count();
        for _ in 0..DECISION_GUARD {
            if let Some(next) = self.fallback {
                if next < n {
                    self.fallback = Some(next + 1);
                    return Ok(PhilosopherId(next));
                }
                self.fallback = None;
                self.close_segment(now, SegmentKind::Rotation);
            }
            let mut active = match self.active.take() {
                Some(a) => a,
                None => {
                    if self.queue.is_empty() {
                        let plan = self.script.plan(history.current());
                        if plan.is_empty() {
                            return Err(AdversaryError::Stuck(self.name()));
                        }
                        self.queue.extend(plan);
                    }
                    let directive = self.queue.pop_front().expect("queue refilled");
                    Active {
                        directive,
                        steps: 0,
                        draws: 0,
                    }
                }
            };
            if let Directive::Mark(m) = &active.directive {
                let m = m.clone();
                self.mark(&m, now, history.current());
                continue;
            }
            match self.advance(&mut active, history) {
                Progress::Schedule(p) => {
                    self.active = Some(active);
                    return Ok(p);
                }
                Progress::Done => {}
                Progress::Fail { reason, exhausted } => {
                    self.log.abandoned += 1;
                    if exhausted {
                        self.log.budget_exhaustions += 1;
                    }
                    self.log.deviate(now, reason);
                    self.restart(now, SegmentKind::Abandoned);
                }
            }
        }
        Err(AdversaryError::Stuck(self.name()))
    }

    fn forced_outcome(&self, history: &History, p: PhilosopherId) -> Option<Draw> {
        let c = history.current();
        if c.algorithm().prioritized() || c.pc(p) != Pc::Choose || self.fallback.is_some() {
            return None;
        }
        let target = match &self.active.as_ref()?.directive {
            Directive::Draw { who, want } if *who == p => (*want)?,
            Directive::Until { who, goal, .. } if *who == p => goal.target_fork()?,
            _ => return None,
        };
        c.topology().arc(p).side_of(target).map(Draw::Side)
    }

    fn log(&self) -> Option<&AdversaryLog> {
        Some(&self.log)
    }

    fn in_scope(&self) -> Vec<PhilosopherId> {
        self.script.in_scope()
    }
}

/// No fork held and no commitment outstanding.
pub fn quiescent(c: &Configuration) -> bool {
    c.philosophers.iter().all(|s| s.held_count() == 0 && s.committed.is_none())
}

/// Next philosopher to schedule while draining: holders first, then
/// committed philosophers whose first fork can be taken, otherwise rotate.
fn drain_choice(c: &Configuration, rotation: &mut usize) -> PhilosopherId {
    let t = c.topology();
    if let Some(p) = t.philosophers().find(|&p| c.philosopher(p).held_count() > 0) {
        return p;
    }
    let courteous = c.algorithm().courteous();
    let ready = t.philosophers().find(|&p| {
        c.pc(p) == Pc::TakeFirst
            && c.committed_fork(p)
                .is_some_and(|f| c.fork(f).is_free() && (!courteous || c.cond(f, p)))
    });
    if let Some(p) = ready {
        return p;
    }
    let n = c.philosopher_count();
    *rotation = (*rotation + 1) % n;
    PhilosopherId(*rotation)
}
