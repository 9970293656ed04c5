//! Lockout of one philosopher under GDP1.
//!
//! The starved philosopher `A` shares fork `f` with the feeder `B`, and the
//! label on `A`'s other fork `g` is larger than the one on `f`, so `A` always
//! takes `g` first and then tests `f`. The scheduler lets `A` perform that
//! test only while `f` is held (by `B`, who keeps acquiring it and eating).
//! `A` therefore always finds `f` taken, releases `g` and starts over, while
//! still being scheduled in every round.
//!
//! Under GDP2 the same policy breaks down: once `B` has eaten, the courtesy
//! condition stops it from taking `f` again until `A` has eaten. `f` then
//! stays free, and after `stall_bound` decisions without being able to
//! schedule `A` the scheduler gives in and lets `A` take it, to stay fair.

use std::collections::BTreeSet;

use dp_protocol::{Action, Configuration, Pc, System};
use dp_topology::{ForkId, PhilosopherId};
use serde::{Deserialize, Serialize};

use crate::log::{RoundRecord, Segment, SegmentKind};
use crate::{Adversary, AdversaryError, AdversaryLog, History};

const NAME: &str = "gdp1-starver";

/// How the label ordering `nr(g) > nr(f)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "mode")]
pub enum Precondition {
    /// The initial configuration must already satisfy it (labels forced by
    /// the experiment); otherwise the strategy does not apply.
    Required,
    /// Schedule round-robin until the ordering arises; give up after
    /// `max_steps` steps.
    AwaitSetup { max_steps: u64 },
    /// Apply the scheduling rule regardless of labels.
    Ignore,
}

pub struct Gdp1Starver {
    starved: PhilosopherId,
    feeder: PhilosopherId,
    shared: ForkId,
    other: ForkId,
    stall_bound: u64,
    precondition: Precondition,
    armed: bool,
    setup_steps: u64,
    setup_rotation: usize,
    pending: BTreeSet<PhilosopherId>,
    feeder_ate: bool,
    stall: u64,
    closing: u64,
    rotation: usize,
    seen: usize,
    round_start: usize,
    log: AdversaryLog,
}

impl Gdp1Starver {
    /// `feeder` defaults to the lowest-numbered philosopher sharing the
    /// starved philosopher's right fork.
    pub fn new(
        sys: &System,
        starved: PhilosopherId,
        feeder: Option<PhilosopherId>,
        stall_bound: u64,
        precondition: Precondition,
    ) -> Result<Gdp1Starver, AdversaryError> {
        let t = &sys.topology;
        let bad = |reason: String| AdversaryError::StrategyMismatch {
            strategy: NAME.into(),
            reason,
        };
        if starved.0 >= t.philosopher_count() {
            return Err(bad(format!("no philosopher {starved}")));
        }
        if precondition != Precondition::Ignore && !sys.algorithm.prioritized() {
            return Err(bad(format!("label ordering is meaningless under {}", sys.algorithm)));
        }
        let arc = t.arc(starved);
        let feeder = match feeder {
            Some(b) => b,
            None => t
                .incident(arc.right)
                .into_iter()
                .find(|&q| q != starved)
                .ok_or_else(|| bad(format!("nobody shares {} with {starved}", arc.right)))?,
        };
        if feeder.0 >= t.philosopher_count() || feeder == starved {
            return Err(bad(format!("invalid feeder {feeder}")));
        }
        let b = t.arc(feeder);
        let shared = if b.touches(arc.right) {
            arc.right
        } else if b.touches(arc.left) {
            arc.left
        } else {
            return Err(bad(format!("{starved} and {feeder} share no fork")));
        };
        let other = if shared == arc.right { arc.left } else { arc.right };
        Ok(Gdp1Starver {
            starved,
            feeder,
            shared,
            other,
            stall_bound: stall_bound.max(1),
            precondition,
            armed: precondition == Precondition::Ignore,
            setup_steps: 0,
            setup_rotation: 0,
            pending: BTreeSet::new(),
            feeder_ate: false,
            stall: 0,
            closing: 0,
            rotation: 0,
            seen: 0,
            round_start: 0,
            log: AdversaryLog::default(),
        })
    }

    pub fn starved(&self) -> PhilosopherId {
        self.starved
    }

    pub fn feeder(&self) -> PhilosopherId {
        self.feeder
    }

    pub fn shared_fork(&self) -> ForkId {
        self.shared
    }

    /// `nr(g) > nr(f)`.
    pub fn ordering_holds(&self, c: &Configuration) -> bool {
        c.fork(self.other).nr > c.fork(self.shared).nr
    }

    /// The starved philosopher is about to test its second fork and would
    /// find it free.
    fn starved_would_take(&self, c: &Configuration) -> bool {
        c.pc(self.starved) == Pc::TakeSecond && c.second_fork(self.starved).is_some_and(|g| c.fork(g).is_free())
    }

    /// Cycles through everybody except the starved philosopher, so that
    /// whoever holds up the feeder also gets to move.
    fn next_other(&mut self, n: usize) -> PhilosopherId {
        loop {
            let p = PhilosopherId(self.rotation % n);
            self.rotation = (self.rotation + 1) % n;
            if p != self.starved {
                return p;
            }
        }
    }

    fn close_round(&mut self, now: usize) {
        self.log.rounds.push(RoundRecord {
            index: self.log.rounds.len() as u64 + 1,
            start_step: self.round_start,
            end_step: now,
            start: None,
            end: None,
        });
        self.log.segments.push(Segment {
            kind: SegmentKind::Round,
            start: self.round_start,
            end: now,
        });
        self.round_start = now;
        self.feeder_ate = false;
        self.closing = 0;
    }
}

impl Adversary for Gdp1Starver {
    fn name(&self) -> String {
        NAME.into()
    }

    fn choose(&mut self, history: &History) -> Result<PhilosopherId, AdversaryError> {
        let c = history.current();
        let n = c.philosopher_count();
        let now = history.len();

        if !self.armed {
            if self.ordering_holds(c) {
                self.armed = true;
                self.log.entry_successes += 1;
                self.round_start = now;
                self.seen = now;
            } else {
                match self.precondition {
                    Precondition::Required => {
                        return Err(AdversaryError::StrategyMismatch {
                            strategy: NAME.into(),
                            reason: format!(
                                "initial labels violate nr({}) > nr({})",
                                self.other, self.shared
                            ),
                        })
                    }
                    Precondition::AwaitSetup { max_steps } => {
                        if self.setup_steps >= max_steps {
                            return Err(AdversaryError::SetupFailed {
                                strategy: NAME.into(),
                                reason: format!(
                                    "nr({}) > nr({}) did not arise within {max_steps} steps",
                                    self.other, self.shared
                                ),
                            });
                        }
                        self.setup_steps += 1;
                        let p = self.setup_rotation;
                        self.setup_rotation = (p + 1) % n;
                        return Ok(PhilosopherId(p));
                    }
                    Precondition::Ignore => unreachable!("armed from the start"),
                }
            }
        }

        for e in &history.events()[self.seen..] {
            if e.actor == self.feeder && e.action == Action::FinishEat {
                self.feeder_ate = true;
            }
        }
        self.seen = now;

        if self.pending.is_empty() {
            if self.feeder_ate || self.closing >= self.stall_bound {
                if now > self.round_start {
                    self.close_round(now);
                }
                self.pending = (0..n).map(PhilosopherId).collect();
            } else {
                // Everyone had a turn; keep feeding B until it has eaten.
                self.closing += 1;
                return Ok(self.next_other(n));
            }
        }

        let a = self.starved;
        let blocked = self.starved_would_take(c);
        let pick = if self.pending.contains(&a) && !blocked {
            self.stall = 0;
            a
        } else if self.pending.contains(&a) && self.stall >= self.stall_bound {
            self.stall = 0;
            self.log.forced_schedules += 1;
            a
        } else {
            let next = if self.pending.contains(&self.feeder) {
                Some(self.feeder)
            } else {
                self.pending.iter().copied().find(|&q| q != a)
            };
            if self.pending.contains(&a) {
                self.stall += 1;
            }
            match next {
                Some(q) => q,
                None => self.next_other(n),
            }
        };
        self.pending.remove(&pick);
        Ok(pick)
    }

    fn log(&self) -> Option<&AdversaryLog> {
        Some(&self.log)
    }

    fn in_scope(&self) -> Vec<PhilosopherId> {
        vec![self.starved]
    }
}
