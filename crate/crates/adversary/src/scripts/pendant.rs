//! A ring of `k` forks with one pendant philosopher `P` hanging off fork
//! `f = 0` towards a private fork `g`, against LR1.
//!
//! Round-start state: every ring philosopher holds one fork, all in the same
//! direction around the ring, and waits for its second fork; `P` is committed
//! to `f`, which a ring philosopher `w_0` holds. Write `h_0 = f`, `h_{j+1}`
//! for the fork `w_j` waits for, and `w_{j+1}` for its holder. One round:
//!
//! 1. `w_0` finds `h_1` taken and releases `f`; redraw `w_0` until it is
//!    committed to `h_1`.
//! 2. `P` takes `f`, then `g` (nobody else uses `g`), and eats.
//! 3. For `j = 1 … k−1`: `w_j` finds `h_{j+1}` taken (for `j = k−1` that is
//!    `f`, still held by `P`) and releases `h_j`; redraw it until committed
//!    to `h_{j+1}`; `w_{j−1}` takes `h_j`.
//! 4. `P` releases both forks, `w_{k−1}` takes `f`, and `P` is redrawn until
//!    committed to `f` again.
//!
//! Every ring philosopher now holds the fork on its other side: the mirror
//! image of the start. The ring never eats; `P` eats once per round.
//!
//! Entry: every ring philosopher draws once. The draws are usable exactly
//! when no fork of the ring is left without a claimant, i.e. the directions
//! read `R…RL…L` from philosopher 0 (`R` = towards the higher fork). Mixed
//! patterns leave fork `a` (the turning point) contested and fork `f` free
//! for `P`; the setup then lets `P` hold `f` and turns the `R` block around
//! one philosopher at a time before the first round.

use dp_protocol::{Algorithm, Configuration, Pc, System};
use dp_topology::{ring_with_pendant, ForkId, PhilosopherId, Side, Topology};

use super::{check_protocol, mismatch};
use crate::script::{Directive as D, Fact, Goal, Mark, Script};
use crate::AdversaryError;

const NAME: &str = "stubborn-theorem1";

#[derive(Debug, Clone, Copy)]
enum Phase {
    Start,
    Judge,
    Round,
}

pub struct PendantScript {
    topology: Topology,
    k: usize,
    phase: Phase,
}

impl PendantScript {
    pub fn new(sys: &System, ring_size: usize, strict: bool) -> Result<PendantScript, AdversaryError> {
        let expected = ring_with_pendant(ring_size).map_err(|e| mismatch(NAME, e.to_string()))?;
        if sys.topology != expected {
            return Err(mismatch(NAME, format!("topology is not the ring of {ring_size} with a pendant arc")));
        }
        check_protocol(NAME, sys, Algorithm::Lr1, strict)?;
        Ok(PendantScript {
            topology: sys.topology.clone(),
            k: ring_size,
            phase: Phase::Start,
        })
    }

    fn pendant(&self) -> PhilosopherId {
        PhilosopherId(self.k)
    }

    fn ring(&self, i: usize) -> PhilosopherId {
        PhilosopherId(i % self.k)
    }

    /// Fork `i` of the ring (indices wrap).
    fn fork(&self, i: usize) -> ForkId {
        ForkId(i % self.k)
    }

    /// The entry outcome the verification harness forces: the first half
    /// of the ring towards the higher fork, the rest towards the lower one.
    fn canonical_side(&self, i: usize) -> Side {
        if i < self.k / 2 {
            Side::Right
        } else {
            Side::Left
        }
    }

    fn entry(&self) -> Vec<D> {
        let mut plan = vec![
            D::Mark(Mark::EntryStart),
            D::Drain,
            D::expect("entry", vec![Fact::Quiescent]),
        ];
        for i in 0..self.k {
            let p = self.ring(i);
            plan.push(D::Draw {
                who: p,
                want: Some(self.topology.fork_of(p, self.canonical_side(i))),
            });
        }
        plan
    }

    fn judge(&mut self, c: &Configuration) -> Vec<D> {
        let k = self.k;
        let sides: Vec<Option<Side>> = (0..k).map(|i| c.philosopher(self.ring(i)).committed).collect();
        let a = sides.iter().take_while(|s| **s == Some(Side::Right)).count();
        if sides[a..].iter().any(|s| *s != Some(Side::Left)) {
            return vec![D::Mark(Mark::EntryRejected(
                "a ring fork has no claimant (a left choice is followed by a right one)".into(),
            ))];
        }
        let (p, f) = (self.pendant(), self.fork(0));
        let mut plan = vec![D::Mark(Mark::EntryAccepted)];
        // Everyone takes its committed fork; at a contested fork the
        // right-chooser goes first and the left-chooser keeps waiting.
        let waiting = (0 < a && a < k).then(|| self.ring(a));
        for i in 0..k {
            let q = self.ring(i);
            if Some(q) != waiting {
                plan.push(D::Step(q));
                let held = c.committed_fork(q).expect("committed in entry");
                plan.push(D::expect("setup", vec![Fact::Holder(held, Some(q))]));
            }
        }
        if waiting.is_none() {
            plan.push(D::stubborn(p, Goal::CommittedTo(f)));
        } else {
            plan.push(D::stubborn(p, Goal::HoldsFirst(f)));
            for j in (0..a).rev() {
                let (w, next) = (self.ring(j), self.ring(j + 1));
                plan.extend([
                    D::Step(w),
                    D::expect("setup", vec![Fact::Holder(self.fork(j + 1), None), Fact::AtPc(w, Pc::Choose)]),
                    D::stubborn(w, Goal::CommittedTo(self.fork(j))),
                    D::Step(next),
                    D::expect("setup", vec![Fact::Holder(self.fork(j + 1), Some(next))]),
                ]);
            }
            plan.extend([
                D::until(p, Goal::AtPc(Pc::ReleaseBoth)),
                D::Step(p),
                D::Step(self.ring(0)),
                D::expect("setup", vec![Fact::Holder(f, Some(self.ring(0)))]),
                D::stubborn(p, Goal::CommittedTo(f)),
            ]);
        }
        plan.push(D::expect("round start", vec![Fact::AllHeld, Fact::CommittedTo(p, f)]));
        plan.push(D::Mark(Mark::SetupComplete));
        self.phase = Phase::Round;
        plan
    }

    /// Follows the chain of waiting from `f`: `(w_j, h_j)` for `j < k`.
    fn chain(&self, c: &Configuration) -> Option<Vec<(PhilosopherId, ForkId)>> {
        let f = self.fork(0);
        let mut chain = Vec::with_capacity(self.k);
        let mut h = f;
        for _ in 0..self.k {
            let w = c.holder(h)?;
            if w.0 >= self.k || c.pc(w) != Pc::TakeSecond || chain.iter().any(|&(q, _)| q == w) {
                return None;
            }
            chain.push((w, h));
            h = c.second_fork(w)?;
        }
        (h == f).then_some(chain)
    }

    fn round(&self, c: &Configuration) -> Vec<D> {
        let (p, f) = (self.pendant(), self.fork(0));
        let chain = match self.chain(c) {
            Some(chain) if Goal::CommittedTo(f).reached(c, p) => chain,
            _ => return vec![D::Abandon("round does not start from a ring blockade".into())],
        };
        let k = self.k;
        let h = |j: usize| if j == k { f } else { chain[j].1 };
        let w = |j: usize| chain[j].0;
        let mut plan = vec![
            D::Mark(Mark::RoundStart),
            D::Step(w(0)),
            D::expect("w0 gives up f", vec![Fact::Holder(f, None), Fact::AtPc(w(0), Pc::Choose)]),
            D::stubborn(w(0), Goal::CommittedTo(h(1))),
            D::Step(p),
            D::expect("P holds f", vec![Fact::Holder(f, Some(p))]),
            D::until(p, Goal::AtPc(Pc::ReleaseBoth)),
        ];
        for j in 1..k {
            plan.extend([
                D::Step(w(j)),
                D::expect("wave", vec![Fact::Holder(h(j), None), Fact::AtPc(w(j), Pc::Choose)]),
                D::stubborn(w(j), Goal::CommittedTo(h(j + 1))),
                D::Step(w(j - 1)),
                D::expect("wave", vec![Fact::Holder(h(j), Some(w(j - 1)))]),
            ]);
        }
        plan.extend([
            D::Step(p),
            D::Step(w(k - 1)),
            D::expect("f passes on", vec![Fact::Holder(f, Some(w(k - 1)))]),
            D::stubborn(p, Goal::CommittedTo(f)),
            D::expect("mirror state", vec![Fact::AllHeld, Fact::CommittedTo(p, f)]),
            D::Mark(Mark::RoundComplete),
        ]);
        plan
    }
}

impl Script for PendantScript {
    fn name(&self) -> String {
        NAME.into()
    }

    fn reset(&mut self) {
        self.phase = Phase::Start;
    }

    fn plan(&mut self, c: &Configuration) -> Vec<D> {
        match self.phase {
            Phase::Start => {
                self.phase = Phase::Judge;
                self.entry()
            }
            Phase::Judge => self.judge(c),
            Phase::Round => self.round(c),
        }
    }

    fn stubborn_points(&self) -> usize {
        self.k + 1
    }

    fn in_scope(&self) -> Vec<PhilosopherId> {
        (0..self.k).map(PhilosopherId).collect()
    }
}
