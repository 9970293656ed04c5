//! The six-philosopher, three-fork scenario against LR1.
//!
//! Role names follow the classic walkthrough. In the round-start state
//! ("state 1") `P3` holds fork `α` and waits to test `β`; `P1` (on `{α,γ}`)
//! is committed to `γ` and `P2` (on `{β,γ}`) to `β`, neither holding
//! anything; `P4` (the other `{α,γ}` arc), `P5` (other `{β,γ}`) and `P6`
//! (other `{α,β}`) are about to draw. One round:
//!
//! | step | who | effect                                        |
//! |------|-----|-----------------------------------------------|
//! | 1    | P4  | redraw until committed to `α` (held by P3)     |
//! | 2    | P1  | takes `γ`                                      |
//! | 3    | P5  | redraw until committed to `γ`                  |
//! | 4    | P2  | takes `β`                                      |
//! | 5    | P3  | finds `β` taken, releases `α`                  |
//! | 6    | P6  | redraw until committed to `β`                  |
//! | 7    | P2  | finds `γ` taken, releases `β`                  |
//! | 8    | P4  | takes `α`                                      |
//! | 9    | P1  | finds `α` taken, releases `γ`                  |
//!
//! Afterwards P4 holds `α` and waits for `γ`, P6 is committed to `β` and P5
//! to `γ`: state 1 again with roles renamed (`P3←P4`, `P1←P6`, `P2←P5`,
//! `β↔γ`). A wrong draw at a stubborn point is harmless: the other fork is
//! free at that moment, so the philosopher takes it, finds its second fork
//! held, and gives it back.

use dp_protocol::{Algorithm, Configuration, Pc, System};
use dp_topology::{ForkId, PhilosopherId, Topology};

use super::{arcs_between, check_protocol, mismatch, other_end};
use crate::script::{Directive as D, Fact, Goal, Mark, Script};
use crate::AdversaryError;

const NAME: &str = "stubborn-lr1-triangle";

#[derive(Debug, Clone, Copy)]
struct Roles {
    p: [PhilosopherId; 6],
    alpha: ForkId,
    beta: ForkId,
    gamma: ForkId,
}

#[derive(Debug, Clone, Copy)]
enum Phase {
    Start,
    Commit,
    Judge(Roles),
    Round,
}

pub struct TriangleScript {
    topology: Topology,
    phase: Phase,
}

fn is_doubled_triangle(t: &Topology) -> bool {
    t.fork_count() == 3
        && t.philosopher_count() == 6
        && [(0, 1), (1, 2), (0, 2)]
            .iter()
            .all(|&(a, b)| arcs_between(t, ForkId(a), ForkId(b)).len() == 2)
}

impl TriangleScript {
    pub fn new(sys: &System, strict: bool) -> Result<TriangleScript, AdversaryError> {
        if !is_doubled_triangle(&sys.topology) {
            return Err(mismatch(NAME, "topology is not the doubled triangle"));
        }
        check_protocol(NAME, sys, Algorithm::Lr1, strict)?;
        Ok(TriangleScript {
            topology: sys.topology.clone(),
            phase: Phase::Start,
        })
    }

    fn third(a: ForkId, b: ForkId) -> ForkId {
        ForkId(3 - a.0 - b.0)
    }

    /// Assigns P1..P6 given `P3` and the forks.
    fn roles(&self, p3: PhilosopherId, alpha: ForkId, beta: ForkId) -> Roles {
        let t = &self.topology;
        let gamma = Self::third(alpha, beta);
        let ag = arcs_between(t, alpha, gamma);
        let bg = arcs_between(t, beta, gamma);
        let ab = arcs_between(t, alpha, beta);
        let p6 = if ab[0] == p3 { ab[1] } else { ab[0] };
        Roles {
            p: [ag[0], bg[0], p3, ag[1], bg[1], p6],
            alpha,
            beta,
            gamma,
        }
    }

    /// Recognises state 1 and names its roles.
    fn state_one(&self, c: &Configuration) -> Option<Roles> {
        let t = &self.topology;
        let p3 = t
            .philosophers()
            .find(|&p| c.pc(p) == Pc::TakeSecond && c.philosopher(p).held_count() == 1)?;
        let alpha = c.committed_fork(p3)?;
        let beta = c.second_fork(p3)?;
        let gamma = Self::third(alpha, beta);
        let pick = |a: ForkId, b: ForkId, target: ForkId| {
            let arcs = arcs_between(t, a, b);
            let hit = arcs.iter().copied().find(|&q| Goal::CommittedTo(target).reached(c, q))?;
            let other = arcs.into_iter().find(|&q| q != hit)?;
            Some((hit, other))
        };
        let (p1, p4) = pick(alpha, gamma, gamma)?;
        let (p2, p5) = pick(beta, gamma, beta)?;
        let ab = arcs_between(t, alpha, beta);
        let p6 = if ab[0] == p3 { ab[1] } else { ab[0] };
        let idle = [p4, p5, p6].iter().all(|&q| c.pc(q) == Pc::Choose);
        let free = c.holder(beta).is_none() && c.holder(gamma).is_none();
        (idle && free).then_some(Roles {
            p: [p1, p2, p3, p4, p5, p6],
            alpha,
            beta,
            gamma,
        })
    }

    fn round(r: Roles) -> Vec<D> {
        let [p1, p2, p3, p4, p5, p6] = r.p;
        let (a, b, g) = (r.alpha, r.beta, r.gamma);
        vec![
            D::Mark(Mark::RoundStart),
            D::stubborn(p4, Goal::CommittedTo(a)),
            D::Step(p1),
            D::expect("state 2", vec![Fact::Holder(g, Some(p1)), Fact::Holder(a, Some(p3))]),
            D::stubborn(p5, Goal::CommittedTo(g)),
            D::Step(p2),
            D::expect("state 3", vec![Fact::Holder(b, Some(p2))]),
            D::Step(p3),
            D::expect("P3 gives up", vec![Fact::Holder(a, None), Fact::AtPc(p3, Pc::Choose)]),
            D::stubborn(p6, Goal::CommittedTo(b)),
            D::expect("state 4", vec![Fact::CommittedTo(p4, a), Fact::CommittedTo(p5, g)]),
            D::Step(p2),
            D::expect("P2 gives up", vec![Fact::Holder(b, None), Fact::AtPc(p2, Pc::Choose)]),
            D::Step(p4),
            D::expect("state 5", vec![Fact::Holder(a, Some(p4))]),
            D::Step(p1),
            D::expect(
                "state 6",
                vec![
                    Fact::Holder(g, None),
                    Fact::AtPc(p1, Pc::Choose),
                    Fact::AtPc(p4, Pc::TakeSecond),
                    Fact::CommittedTo(p5, g),
                    Fact::CommittedTo(p6, b),
                ],
            ),
            D::Mark(Mark::RoundComplete),
        ]
    }
}

impl Script for TriangleScript {
    fn name(&self) -> String {
        NAME.into()
    }

    fn reset(&mut self) {
        self.phase = Phase::Start;
    }

    fn plan(&mut self, c: &Configuration) -> Vec<D> {
        let p3 = PhilosopherId(0);
        match self.phase {
            Phase::Start => {
                self.phase = Phase::Commit;
                vec![
                    D::Mark(Mark::EntryStart),
                    D::Drain,
                    D::expect("entry", vec![Fact::Quiescent]),
                    D::Draw { who: p3, want: None },
                    D::Step(p3),
                    D::expect("entry", vec![Fact::AtPc(p3, Pc::TakeSecond)]),
                ]
            }
            Phase::Commit => {
                let alpha = c.committed_fork(p3).expect("P3 holds its first fork");
                let beta = other_end(&self.topology, p3, alpha);
                let r = self.roles(p3, alpha, beta);
                self.phase = Phase::Judge(r);
                let [p1, p2, _, p4, p5, p6] = r.p;
                vec![
                    D::Draw {
                        who: p1,
                        want: Some(r.gamma),
                    },
                    D::Draw {
                        who: p2,
                        want: Some(r.beta),
                    },
                    D::until(p4, Goal::AtPc(Pc::Choose)),
                    D::until(p5, Goal::AtPc(Pc::Choose)),
                    D::until(p6, Goal::AtPc(Pc::Choose)),
                ]
            }
            Phase::Judge(r) => {
                let [p1, p2, ..] = r.p;
                if c.committed_fork(p1) == Some(r.gamma) && c.committed_fork(p2) == Some(r.beta) {
                    self.phase = Phase::Round;
                    vec![D::Mark(Mark::EntryAccepted), D::Mark(Mark::SetupComplete)]
                } else {
                    vec![D::Mark(Mark::EntryRejected(
                        "P1 and P2 did not commit to the two forks P3 lacks".into(),
                    ))]
                }
            }
            Phase::Round => match self.state_one(c) {
                Some(r) => Self::round(r),
                None => vec![D::Abandon("round does not start from state 1".into())],
            },
        }
    }

    fn stubborn_points(&self) -> usize {
        3
    }

    fn in_scope(&self) -> Vec<PhilosopherId> {
        self.topology.philosophers().collect()
    }
}
