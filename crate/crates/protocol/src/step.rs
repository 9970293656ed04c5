use std::fmt;

use dp_topology::{PhilosopherId, Side};
use serde::{Deserialize, Serialize};

use crate::{Configuration, Courtesy, Pc};

/// A protocol random draw as recorded in traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Draw {
    /// The first-fork choice of LR1/LR2.
    Side(Side),
    /// A fresh `nr` label of GDP1/GDP2, in `[1, m]`.
    Label(u32),
}

impl fmt::Display for Draw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Draw::Side(s) => write!(f, "{s}"),
            Draw::Label(l) => write!(f, "{l}"),
        }
    }
}

/// Supplier of protocol random draws. `p` is the drawing philosopher, so
/// implementations can keep one independent stream per philosopher.
pub trait DrawSource {
    fn side(&mut self, p: PhilosopherId, bias: crate::Bias) -> Side;
    /// Uniform value in `[1, m]`.
    fn label(&mut self, p: PhilosopherId, m: u32) -> u32;
}

/// What one atomic step did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "kind")]
pub enum Action {
    /// One step of a finite or unending think period.
    Think,
    GetHungry,
    /// Request insertion at the fork on `side` (LR2/GDP2).
    InsertRequest { side: Side },
    CommitRandom { side: Side },
    CommitPriority { side: Side },
    /// Test-and-set on the committed fork.
    TestAndTakeFirst { taken: bool },
    /// The committed fork is free but the courtesy condition fails.
    CondFail,
    /// Both adjacent labels were equal; the held fork got a fresh label.
    Relabel { old: u32, new: u32 },
    /// Adjacent labels already differ; nothing to relabel.
    KeepNr,
    /// The second fork was free and is now held: eating starts.
    TestAndTakeSecond,
    /// The second fork was taken, so the first one is given back.
    ReleaseFirst,
    EatTick,
    FinishEat,
    RemoveRequests,
    SignGuestBooks,
    ReleaseBoth,
}

impl Action {
    pub fn name(&self) -> &'static str {
        match self {
            Action::Think => "think",
            Action::GetHungry => "getHungry",
            Action::InsertRequest { .. } => "insertRequests",
            Action::CommitRandom { .. } => "commitRandom",
            Action::CommitPriority { .. } => "commitPriority",
            Action::TestAndTakeFirst { .. } => "testAndTakeFirst",
            Action::CondFail => "condFail",
            Action::Relabel { .. } => "relabel",
            Action::KeepNr => "keepNr",
            Action::TestAndTakeSecond => "testAndTakeSecond",
            Action::ReleaseFirst => "releaseFirst",
            Action::EatTick => "eatTick",
            Action::FinishEat => "finishEat",
            Action::RemoveRequests => "removeRequests",
            Action::SignGuestBooks => "signGuestBooks",
            Action::ReleaseBoth => "releaseBoth",
        }
    }

    /// Short outcome text for trace files.
    pub fn outcome(&self) -> String {
        match self {
            Action::InsertRequest { side } | Action::CommitRandom { side } | Action::CommitPriority { side } => {
                side.to_string()
            }
            Action::TestAndTakeFirst { taken: true } | Action::TestAndTakeSecond => "taken".into(),
            Action::TestAndTakeFirst { taken: false } | Action::ReleaseFirst => "busy".into(),
            Action::CondFail => "blocked".into(),
            Action::Relabel { old, new } => format!("{old}->{new}"),
            Action::KeepNr => "distinct".into(),
            _ => "ok".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepEvent {
    pub actor: PhilosopherId,
    pub action: Action,
    pub draw: Option<Draw>,
}

impl StepEvent {
    /// Meals are counted when eating completes.
    pub fn is_eating_event(&self) -> bool {
        self.action == Action::FinishEat
    }
}

/// Pure form of [`Configuration::apply`].
pub fn step(c: &Configuration, p: PhilosopherId, draws: &mut dyn DrawSource) -> (Configuration, StepEvent) {
    let mut next = c.clone();
    let event = next.apply(p, draws);
    (next, event)
}

impl Configuration {
    /// Executes exactly one atomic step of philosopher `p` in place.
    pub fn apply(&mut self, p: PhilosopherId, draws: &mut dyn DrawSource) -> StepEvent {
        let system = self.system.clone();
        let alg = system.algorithm;
        let arc = system.topology.arc(p);
        let mut draw = None;
        let st = &mut self.philosophers[p.0];
        let action = match st.pc {
            Pc::Think => match st.think_remaining {
                Some(0) => {
                    st.hungry = true;
                    st.pc = if alg.courteous() { Pc::RequestLeft } else { Pc::Choose };
                    Action::GetHungry
                }
                Some(r) => {
                    st.think_remaining = Some(r - 1);
                    Action::Think
                }
                None => Action::Think,
            },
            Pc::RequestLeft => {
                st.pc = Pc::RequestRight;
                self.forks[arc.left.0].requests.insert(p);
                Action::InsertRequest { side: Side::Left }
            }
            Pc::RequestRight => {
                st.pc = Pc::Choose;
                self.forks[arc.right.0].requests.insert(p);
                Action::InsertRequest { side: Side::Right }
            }
            Pc::Choose => {
                let action = if alg.prioritized() {
                    let (l, r) = (self.forks[arc.left.0].nr, self.forks[arc.right.0].nr);
                    let side = if l > r { Side::Left } else { Side::Right };
                    Action::CommitPriority { side }
                } else {
                    let side = draws.side(p, system.bias);
                    draw = Some(Draw::Side(side));
                    Action::CommitRandom { side }
                };
                let (Action::CommitPriority { side } | Action::CommitRandom { side }) = action else {
                    unreachable!()
                };
                let st = &mut self.philosophers[p.0];
                st.committed = Some(side);
                st.pc = Pc::TakeFirst;
                action
            }
            Pc::TakeFirst => {
                let side = committed(st.committed, p);
                let f = arc.fork(side);
                if self.forks[f.0].holder.is_some() {
                    Action::TestAndTakeFirst { taken: false }
                } else if alg.courteous() && !self.cond(f, p) {
                    Action::CondFail
                } else {
                    self.forks[f.0].holder = Some(p);
                    let st = &mut self.philosophers[p.0];
                    st.set_holding(side, true);
                    st.pc = if alg.prioritized() { Pc::Relabel } else { Pc::TakeSecond };
                    Action::TestAndTakeFirst { taken: true }
                }
            }
            Pc::Relabel => {
                let side = committed(st.committed, p);
                st.pc = Pc::TakeSecond;
                let (f, g) = (arc.fork(side), arc.fork(side.other()));
                if self.forks[f.0].nr == self.forks[g.0].nr {
                    let old = self.forks[f.0].nr;
                    let new = draws.label(p, system.m);
                    draw = Some(Draw::Label(new));
                    self.forks[f.0].nr = new;
                    Action::Relabel { old, new }
                } else {
                    Action::KeepNr
                }
            }
            Pc::TakeSecond => {
                let side = committed(st.committed, p);
                let (f, g) = (arc.fork(side), arc.fork(side.other()));
                let polite = !alg.courteous() || system.courtesy == Courtesy::FirstFork || self.cond(g, p);
                if self.forks[g.0].holder.is_none() && polite {
                    self.forks[g.0].holder = Some(p);
                    let st = &mut self.philosophers[p.0];
                    st.set_holding(side.other(), true);
                    st.pc = Pc::Eat;
                    st.eat_steps_remaining = system.eat_steps;
                    Action::TestAndTakeSecond
                } else {
                    self.forks[f.0].holder = None;
                    let st = &mut self.philosophers[p.0];
                    st.set_holding(side, false);
                    st.committed = None;
                    st.pc = Pc::Choose;
                    Action::ReleaseFirst
                }
            }
            Pc::Eat => {
                if st.eat_steps_remaining > 1 {
                    st.eat_steps_remaining -= 1;
                    Action::EatTick
                } else {
                    st.eat_steps_remaining = 0;
                    st.hungry = false;
                    st.meals += 1;
                    st.pc = if alg.courteous() { Pc::RemoveRequests } else { Pc::ReleaseBoth };
                    Action::FinishEat
                }
            }
            Pc::RemoveRequests => {
                st.pc = Pc::SignGuestBooks;
                self.forks[arc.left.0].requests.remove(&p);
                self.forks[arc.right.0].requests.remove(&p);
                Action::RemoveRequests
            }
            Pc::SignGuestBooks => {
                st.pc = Pc::ReleaseBoth;
                for f in [arc.left, arc.right] {
                    let fork = &mut self.forks[f.0];
                    fork.use_clock += 1;
                    fork.last_use.insert(p, fork.use_clock);
                }
                Action::SignGuestBooks
            }
            Pc::ReleaseBoth => {
                st.pc = Pc::Think;
                st.committed = None;
                st.holding_left = false;
                st.holding_right = false;
                st.think_remaining = system.hunger.think_steps(p, st.meals);
                self.forks[arc.left.0].holder = None;
                self.forks[arc.right.0].holder = None;
                Action::ReleaseBoth
            }
        };
        StepEvent {
            actor: p,
            action,
            draw,
        }
    }
}

fn committed(side: Option<Side>, p: PhilosopherId) -> Side {
    side.unwrap_or_else(|| panic!("internal invariant violation: {p} has no commitment at a take step"))
}
